import math
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import G2, GM, LOOP, brute_periodic_words, necklaces, random_point
from symflow.errors import DanglingVertex, ParseError, ValidationError
from symflow.shift import (
    Cylinder,
    SeqPoint,
    base_distance,
    higher_block,
    is_regular,
    is_transitive,
    periodic_points,
    primitive_cycles,
    shift,
    trace_power,
    validate_graph,
)


class TestValidateGraph:
    def test_full_shift(self):
        assert G2.adjacency.tolist() == [[1, 1], [1, 1]]

    def test_golden_mean(self):
        assert GM.adjacency.tolist() == [[1, 1], [1, 0]]

    def test_dangling_vertex(self):
        with pytest.raises(DanglingVertex):
            validate_graph({"vertices": "ab", "edges": ["ab"]})

    def test_unknown_endpoint(self):
        with pytest.raises(ValidationError):
            validate_graph({"vertices": "ab", "edges": ["aa", "ac"]})

    def test_empty(self):
        with pytest.raises(ValidationError):
            validate_graph({"vertices": [], "edges": []})


class TestSeqPoint:
    def test_shift_periodic(self):
        x = SeqPoint.periodic("ab")
        assert shift(x, 1) == SeqPoint.periodic("ab", 1)
        assert shift(x, 1)[0] == "b"

    def test_shift_zero(self):
        x = SeqPoint.parse("a|.b|a")
        assert shift(x, 0) == x

    def test_shift_two(self):
        y = shift(SeqPoint.parse("a|.b|a"), 2)
        assert y[-2] == "b"
        assert [y[n] for n in range(-4, 3) if y[n] == "b"] == ["b"]

    def test_parse_errors(self):
        for bad in ("ab", "a|b|a", "a|.|a", "|.a|a"):
            with pytest.raises(ParseError):
                SeqPoint.parse(bad)

    def test_canonical_equality(self):
        # the same sequence written two ways
        assert SeqPoint.parse("ab|ab.ab|ab") == SeqPoint.periodic("ab")
        assert SeqPoint.parse("a|a.b|a") == SeqPoint.parse("a|.b|a")

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 10**6))
    def test_str_parse_roundtrip(self, seed):
        x = random_point(G2, random.Random(seed))
        assert SeqPoint.parse(str(x)) == x

    def test_is_regular(self):
        assert is_regular(SeqPoint.periodic("a"))
        assert is_regular(SeqPoint.parse("ab|.ba|ab"))


class TestBaseDistance:
    def test_equal(self):
        x = SeqPoint.periodic("ab")
        assert base_distance(x, x) == 0

    def test_differ_at_origin(self):
        assert base_distance(SeqPoint.periodic("a"), SeqPoint.parse("a|.b|a")) == 1.0

    def test_nearest_disagreement(self):
        # b at coordinates 2 and -3
        y = SeqPoint(("a",), tuple("baaaab"), ("a",), 3)
        assert y[2] == "b" and y[-3] == "b"
        assert base_distance(SeqPoint.periodic("a"), y) == pytest.approx(math.exp(-2))

    def test_shift_isometry_bounds(self):
        rng = random.Random(5)
        for _ in range(300):
            x, y = random_point(G2, rng), random_point(G2, rng)
            d = base_distance(x, y)
            for k in (1, -1):
                dk = base_distance(shift(x, k), shift(y, k))
                assert d / math.e * (1 - 1e-12) <= dk <= d * math.e * (1 + 1e-12)

    def test_ultrametric(self):
        rng = random.Random(6)
        for _ in range(300):
            x, y, z = (random_point(GM, rng) for _ in range(3))
            assert base_distance(x, z) <= max(base_distance(x, y), base_distance(y, z)) + 1e-15


class TestPeriodicPoints:
    def test_g2_period_two(self):
        got = {str(p) for p in periodic_points(G2, 2)}
        assert len(periodic_points(G2, 2)) == 4
        assert got == {
            str(SeqPoint.periodic("a")), str(SeqPoint.periodic("b")),
            str(SeqPoint.periodic("ab")), str(SeqPoint.periodic("ab", 1)),
        }

    def test_golden_mean(self):
        assert periodic_points(GM, 1) == [SeqPoint.periodic("a")]
        assert len(periodic_points(GM, 3)) == 4

    @pytest.mark.parametrize("g", [G2, GM])
    def test_count_is_trace(self, g):
        A = np.array(g.adjacency, dtype=object)
        P = np.identity(len(g.vertices), dtype=object)
        for n in range(1, 11):
            P = P.dot(A)
            assert len(periodic_points(g, n)) == int(np.trace(P)) == trace_power(g, n)

    def test_matches_brute_force(self):
        for n in range(1, 7):
            words = brute_periodic_words(GM, n)
            assert sorted(periodic_points(GM, n), key=str) == sorted(
                (SeqPoint.periodic(w) for w in words), key=str
            )

    def test_each_point_is_fixed(self):
        for p in periodic_points(G2, 6):
            assert shift(p, 6) == p


class TestPrimitiveCycles:
    def test_g2_counts(self):
        counts = Counter(c.length for c in primitive_cycles(G2, 3))
        assert counts == {1: 2, 2: 1, 3: 2}

    def test_gm(self):
        assert ["".join(c.word) for c in primitive_cycles(GM, 2)] == ["a", "ab"]

    def test_self_loops_only(self):
        assert [c.word for c in primitive_cycles(G2, 1)] == [("a",), ("b",)]

    def test_necklace_formula(self):
        counts = Counter(c.length for c in primitive_cycles(G2, 12))
        for n in range(1, 13):
            assert counts[n] == necklaces(n)

    @pytest.mark.parametrize("g", [G2, GM])
    def test_decomposition_of_fixed_points(self, g):
        counts = Counter(c.length for c in primitive_cycles(g, 10))
        for n in range(1, 11):
            total = sum(p * counts[p] for p in range(1, n + 1) if n % p == 0)
            assert total == trace_power(g, n)


class TestTransitivity:
    def test_examples(self):
        assert is_transitive(G2)
        assert is_transitive(GM)
        assert not is_transitive(validate_graph({"vertices": "ab", "edges": ["aa", "bb"]}))
        assert is_transitive(LOOP)


class TestHigherBlock:
    def test_identity(self):
        hb = higher_block(G2, 1)
        assert hb.graph == G2
        x = SeqPoint.periodic("ab")
        assert hb.encode(x) == x

    def test_golden_mean_two_blocks(self):
        g = higher_block(GM, 2).graph
        assert ["".join(v) for v in g.vertices] == ["aa", "ab", "ba"]
        edges = {("".join(u), "".join(v)) for u, v in g.edges}
        assert edges == {("aa", "aa"), ("aa", "ab"), ("ab", "ba"), ("ba", "aa"), ("ba", "ab")}

    def test_sizes(self):
        g = higher_block(G2, 2).graph
        assert (len(g.vertices), len(g.edges)) == (4, 8)

    @pytest.mark.parametrize("k", [2, 3])
    def test_conjugacy(self, k):
        rng = random.Random(k)
        hb = higher_block(GM, k)
        for _ in range(1000):
            x = random_point(GM, rng)
            y = hb.encode(x)
            assert hb.graph.contains(y)
            assert hb.decode(y) == x
            assert hb.encode(shift(x, 1)) == shift(y, 1)


def test_cylinder():
    x = SeqPoint.parse("a|.ab|a")
    assert Cylinder(("a", "b")).contains(x)
    assert Cylinder(("b",), 1).contains(x)
    assert not Cylinder(("b",)).contains(x)
