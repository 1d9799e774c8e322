import math
import random

import numpy as np
import pytest

from support import G2, GM, LOG2, LOG_PHI, LOOP, PHI, R1, R12, random_model
from symflow.errors import NotTransitive, ValidationError
from symflow.roof import RoofFunction, edge_form
from symflow.shift import admissible_words, validate_graph
from symflow.thermo import (
    Potential,
    entropy,
    equilibrium,
    integrate,
    markov_measure,
    mme_flow,
    perron,
    pressure,
)


def random_markov(graph, rng):
    n = len(graph.vertices)
    P = np.zeros((n, n))
    for u, v in graph.sorted_edges:
        P[graph.index[u], graph.index[v]] = rng.random() + 0.05
    P /= P.sum(axis=1, keepdims=True)
    return markov_measure(graph, P)


def random_potential(graph, rng, k):
    return Potential(graph, k, {w: rng.uniform(-2, 2) for w in admissible_words(graph, k)})


def charpoly_radius(M):
    # independent oracle: roots of the characteristic polynomial
    return max(abs(np.roots(np.poly(M))))


class TestPressure:
    def test_full_shift(self):
        assert pressure(G2, Potential.zero(G2)) == pytest.approx(LOG2, abs=1e-12)

    def test_golden_mean(self):
        assert pressure(GM, Potential.zero(GM)) == pytest.approx(LOG_PHI, abs=1e-12)

    def test_golden_root(self):
        assert pressure(G2, Potential.from_function(R12, -LOG_PHI)) == pytest.approx(0, abs=1e-12)

    def test_not_transitive(self):
        g = validate_graph({"vertices": "ab", "edges": ["aa", "bb"]})
        with pytest.raises(NotTransitive):
            pressure(g, Potential.zero(g))

    @pytest.mark.parametrize("seed", range(8))
    def test_against_characteristic_polynomial(self, seed):
        rng = random.Random(seed)
        g, _ = random_model(rng, n=rng.choice((2, 3, 4)), k_choices=(1,))
        phi = random_potential(g, rng, rng.choice((1, 2)))
        form = edge_form(phi)
        M = np.zeros((len(form.graph.vertices),) * 2)
        for (i, j), w in form.weights.items():
            M[i, j] = math.exp(w)
        if M.shape[0] <= 4:
            assert math.log(perron(M)[0]) == pytest.approx(math.log(charpoly_radius(M)), abs=1e-9)
        assert pressure(g, phi) == pytest.approx(math.log(max(abs(np.linalg.eigvals(M)))), abs=1e-9)

    def test_periodic_matrix(self):
        # a 2-cycle has eigenvalues +-1; the shifted iteration still converges
        g = validate_graph({"vertices": "ab", "edges": ["ab", "ba"]})
        assert pressure(g, Potential.zero(g)) == pytest.approx(0, abs=1e-12)

    def test_monotone_in_h(self):
        values = [pressure(G2, Potential.from_function(R12, -h)) for h in np.linspace(0, 2, 21)]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestEquilibrium:
    def test_bernoulli(self):
        m = equilibrium(G2, Potential.zero(G2))
        assert np.allclose(m.P, 0.5, atol=1e-12)

    def test_parry(self):
        m = equilibrium(GM, Potential.zero(GM))
        assert m.transition("a", "a") == pytest.approx(1 / PHI, abs=1e-12)
        assert m.transition("a", "b") == pytest.approx(1 / PHI**2, abs=1e-12)
        assert m.transition("b", "a") == pytest.approx(1, abs=1e-12)

    def test_golden_roof(self):
        m = equilibrium(G2, Potential.from_function(R12, -LOG_PHI))
        for u in "ab":
            assert m.transition(u, "a") == pytest.approx(1 / PHI, abs=1e-12)
            assert m.transition(u, "b") == pytest.approx(1 / PHI**2, abs=1e-12)
        assert integrate(m, R12) == pytest.approx(1 / PHI + 2 / PHI**2, abs=1e-12)

    def test_stationary(self):
        rng = random.Random(1)
        g, _ = random_model(rng)
        m = equilibrium(g, random_potential(g, rng, 2))
        assert np.allclose(m.pi @ m.P, m.pi, atol=1e-12)
        assert m.pi.sum() == pytest.approx(1)

    def test_bad_rows(self):
        with pytest.raises(ValidationError):
            markov_measure(GM, [[0.5, 0.5], [0.5, 0.5]])


class TestEntropyIntegrate:
    def test_entropy(self):
        assert entropy(equilibrium(G2, Potential.zero(G2))) == pytest.approx(LOG2, abs=1e-12)
        assert entropy(equilibrium(GM, Potential.zero(GM))) == pytest.approx(LOG_PHI, abs=1e-12)
        assert entropy(markov_measure(LOOP, [[1.0]])) == 0

    def test_integrate(self):
        m = equilibrium(G2, Potential.zero(G2))
        assert integrate(m, R1) == pytest.approx(1)
        assert integrate(m, R12) == pytest.approx(1.5)

    def test_lift_preserves_cylinders(self):
        rng = random.Random(2)
        m = random_markov(G2, rng)
        lifted = m.lift(3)
        for w in admissible_words(G2, 5):
            assert lifted.cylinder(w) == pytest.approx(m.cylinder(w), abs=1e-14)
        assert entropy(lifted) == pytest.approx(entropy(m), abs=1e-12)

    def test_cylinder_consistency(self):
        m = random_markov(GM, random.Random(3))
        for w in admissible_words(GM, 3):
            ext = sum(m.cylinder(w + (v,)) for v in GM.successors(w[-1]))
            assert ext == pytest.approx(m.cylinder(w), abs=1e-14)


class TestVariational:
    @pytest.mark.parametrize("seed", range(4))
    def test_inequality_and_equality(self, seed):
        rng = random.Random(seed)
        g, _ = random_model(rng)
        phi = random_potential(g, rng, rng.choice((1, 2)))
        P = pressure(g, phi)
        for _ in range(20):
            m = random_markov(g, rng)
            assert entropy(m) + integrate(m, phi) <= P + 1e-9
        eq = equilibrium(g, phi)
        assert entropy(eq) + integrate(eq, phi) == pytest.approx(P, abs=1e-9)


class TestMme:
    def test_examples(self):
        assert mme_flow(G2, R1).h == pytest.approx(LOG2, abs=1e-9)
        assert mme_flow(G2, R12).h == pytest.approx(LOG_PHI, abs=1e-9)
        assert np.allclose(mme_flow(G2, R1).measure.P, 0.5)

    def test_single_loop(self):
        assert mme_flow(LOOP, RoofFunction.constant(LOOP, 3)).h == 0

    @pytest.mark.parametrize("seed", range(10))
    def test_abramov(self, seed):
        g, r = random_model(random.Random(50 + seed))
        res = mme_flow(g, r)
        assert res.base_entropy / res.mean_roof == pytest.approx(res.h, abs=1e-9)
        assert pressure(g, Potential.from_function(r, -res.h)) == pytest.approx(0, abs=1e-9)
        lo, hi = res.bracket
        assert lo <= res.h <= hi
