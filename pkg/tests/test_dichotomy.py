import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from support import G2, R1, R12, R13, TWO, random_flow_point, random_model
from symflow.dichotomy import (
    cycle_lattice,
    recode_constant,
    solve_transfer,
    verify_cycle_map,
    verify_spectrum,
)
from symflow.errors import NotTransitive
from symflow.flow import flow, length_spectrum
from symflow.roof import RoofFunction
from symflow.shift import periodic_points, validate_graph
from symflow.thermo import mme_flow


class TestLattice:
    def test_examples(self):
        assert cycle_lattice(G2, R1).c == 1
        assert cycle_lattice(G2, R12).c == 1
        assert cycle_lattice(TWO, R13).c == 4

    def test_never_dense(self):
        assert not cycle_lattice(G2, R12).dense
        assert cycle_lattice(TWO, R13).theta == pytest.approx(math.pi / 2)

    def test_not_transitive(self):
        g = validate_graph({"vertices": "ab", "edges": ["aa", "bb"]})
        with pytest.raises(NotTransitive):
            cycle_lattice(g, RoofFunction.constant(g))

    @pytest.mark.parametrize("seed", range(5))
    def test_random_walks_in_lattice(self, seed):
        rng = random.Random(seed)
        g, r = random_model(rng, k_choices=(1, 2))
        c = cycle_lattice(g, r).c
        for w in cycle_lattice(g, r).weights:
            assert (w / c).denominator == 1
        for _ in range(50):
            # a random closed walk of length <= 50
            start = rng.choice(g.vertices)
            word = [start]
            for _ in range(rng.randint(1, 45)):
                word.append(rng.choice(g.successors(word[-1])))
            while not g.has_edge(word[-1], start):
                word.append(rng.choice(g.successors(word[-1])))
            assert (r.word_sum(word) / c).denominator == 1


class TestTransfer:
    def test_constant_roof(self):
        tf = solve_transfer(G2, R1, 1)
        assert set(tf.U.values()) == {0}

    def test_two_cycle(self):
        tf = solve_transfer(TWO, R13, 4)
        assert tf.U == {"a": 0, "b": 3}
        assert all((w / 4).denominator == 1 for w in tf.corrected().values())

    def test_integer_roof(self):
        assert set(solve_transfer(G2, R12, 1).U.values()) == {0}

    @pytest.mark.parametrize("seed", range(5))
    def test_cohomology_invariance(self, seed):
        g, r = random_model(random.Random(seed), k_choices=(1, 2, 3))
        tf = solve_transfer(g, r)
        form = tf.form
        idx = form.graph.index
        star = tf.corrected()
        assert all(0 <= u < tf.c for u in tf.U.values())
        for n in range(1, 6):
            for y in periodic_points(g, n):
                states = [form.vertex_of(y, i) for i in range(n + 1)]
                total = sum(star[(idx[states[i]], idx[states[i + 1]])] for i in range(n))
                assert total == r.word_sum(y.window(0, n))

    def test_eigenfunction(self):
        rng = random.Random(3)
        for r in (R13, R12):
            tf = solve_transfer(r.graph, r)
            for _ in range(50):
                z = random_flow_point(r, rng)
                tau = Fraction(rng.randint(-40, 40), rng.randint(1, 5))
                lhs = tf.eigenfunction(flow(r, z, tau))
                rhs = tf.eigenvalue(tau) * tf.eigenfunction(z)
                assert abs(lhs - rhs) <= 1e-9
                assert abs(tf.eigenfunction(z)) == pytest.approx(1)
        assert tf.eigenvalue(tf.c) == pytest.approx(cmath.exp(0))


class TestRecode:
    def test_identity_pipeline(self):
        res = recode_constant(G2, R1)
        assert res.graph == G2 and res.c == 1

    def test_two_cycle(self):
        res = recode_constant(TWO, R13)
        assert len(res.graph.vertices) == 1 and len(res.graph.edges) == 1
        assert res.c == 4
        assert length_spectrum(res.graph, res.roof, 7).as_dict() == {4: 1}
        assert length_spectrum(TWO, R13, 30).as_dict() == {4: 1}

    def test_r12(self):
        res = recode_constant(G2, R12)
        assert len(res.graph.vertices) == 3 and res.c == 1
        assert verify_spectrum(G2, R12, res, 6)

    def test_count_conservation(self):
        for g, r in (random_model(random.Random(s)) for s in range(5)):
            res = recode_constant(g, r)
            contract = res.stages[3]
            pieces = sum(v / res.c for v in contract.roof.values())
            assert pieces == len(res.graph.vertices)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_models(self, seed):
        g, r = random_model(random.Random(200 + seed), k_choices=(1, 2))
        res = recode_constant(g, r)
        assert verify_spectrum(g, r, res, 10)
        assert verify_cycle_map(res, 10)
        h = mme_flow(g, r).h
        assert mme_flow(res.graph, res.roof).h == pytest.approx(h, abs=1e-9)
        radius = max(abs(np.linalg.eigvals(res.graph.adjacency.astype(float))))
        assert math.log(radius) / float(res.c) == pytest.approx(h, abs=1e-9)
