import random
from collections import Counter
from fractions import Fraction

import pytest

from support import G2, GM, R1, R12, brute_periodic_words, necklaces, random_flow_point, random_model
from symflow.errors import NotPeriodic, ParseError, ValidationError
from symflow.flow import (
    FlowPoint,
    closed_orbits,
    flow,
    length_spectrum,
    orbit_multiplicity,
    orbit_of_cycle,
)
from symflow.roof import RoofFunction
from symflow.shift import CycleClass, SeqPoint, primitive_root, shift


def brute_spectrum(graph, r, T):
    """Simple orbit lengths from all closed walks, one per rotation class."""
    found = Counter()
    n_max = int(T / r.inf)
    for n in range(1, n_max + 1):
        seen = set()
        for w in brute_periodic_words(graph, n):
            if primitive_root(w) != w:
                continue
            key = min(w[i:] + w[:i] for i in range(n))
            if key in seen:
                continue
            seen.add(key)
            length = r.word_sum(w)
            if length <= T:
                found[length] += 1
    return tuple(sorted(found.items()))


class TestFlow:
    def test_unit_roof(self):
        x = SeqPoint.parse("a|.b|a")
        z = flow(R1, FlowPoint(x, Fraction(1, 4)), Fraction(5, 2))
        assert z == FlowPoint(shift(x, 2), Fraction(3, 4))

    def test_zero_time(self):
        z = FlowPoint(SeqPoint.periodic("ab"), Fraction(1, 3))
        assert flow(R12, z, 0) == z

    def test_crossings(self):
        x = SeqPoint.periodic("ab")
        assert flow(R12, FlowPoint(x, 0), Fraction(7, 2)) == FlowPoint(shift(x, 2), Fraction(1, 2))

    def test_section_return(self):
        rng = random.Random(3)
        for _ in range(100):
            z = random_flow_point(R12, rng)
            base = FlowPoint(z.base, 0)
            assert flow(R12, base, R12(z.base)) == FlowPoint(shift(z.base, 1), 0)

    @pytest.mark.parametrize("seed", range(3))
    def test_group_law(self, seed):
        rng = random.Random(seed)
        g, r = random_model(rng, k_choices=(1, 2, 3))
        for _ in range(200):
            z = random_flow_point(r, rng)
            t1 = Fraction(rng.randint(-400, 400), rng.randint(1, 4))
            t2 = Fraction(rng.randint(-400, 400), rng.randint(1, 4))
            assert flow(r, z, t1 + t2) == flow(r, flow(r, z, t1), t2)

    def test_height_invariant(self):
        with pytest.raises(ValidationError):
            FlowPoint.make(R12, SeqPoint.periodic("a"), 1)

    def test_parse(self):
        z = FlowPoint.parse("a|.b|a@1/4", R12)
        assert z.height == Fraction(1, 4) and z.base[0] == "b"
        assert str(z) == "a|.b|a@1/4"
        with pytest.raises(ParseError):
            FlowPoint.parse("a|.b|a@x")


class TestOrbits:
    def test_orbit_of_cycle(self):
        assert orbit_of_cycle(R1, CycleClass(("a",))).length == 1
        assert orbit_of_cycle(R12, CycleClass(("a", "b"))).length == 3
        double = orbit_of_cycle(R12, CycleClass(("a", "b")), 2)
        assert double.length == 6 and not double.simple

    def test_multiplicity(self):
        assert orbit_multiplicity(SeqPoint.periodic("ab"), 4) == 2
        assert orbit_multiplicity(SeqPoint.periodic("a"), 1) == 1
        assert orbit_multiplicity(SeqPoint.periodic("aab"), 3) == 1
        with pytest.raises(NotPeriodic):
            orbit_multiplicity(SeqPoint.periodic("ab"), 3)
        with pytest.raises(NotPeriodic):
            orbit_multiplicity(SeqPoint.parse("a|.b|a"), 1)


class TestLengthSpectrum:
    def test_full_shift(self):
        spec = length_spectrum(G2, R1, 3)
        assert spec.as_dict() == {1: 2, 2: 1, 3: 2} and spec.pi == 5

    def test_r12(self):
        spec = length_spectrum(G2, R12, 2)
        assert spec.as_dict() == {1: 1, 2: 1}

    def test_below_inf(self):
        assert length_spectrum(G2, R12, Fraction(1, 2)).pi == 0

    def test_necklace_oracle(self):
        spec = length_spectrum(G2, R1, 16)
        for T in range(1, 17):
            assert spec.pi_at(T) == sum(necklaces(n) for n in range(1, T + 1))

    def test_monotone(self):
        spec = length_spectrum(G2, R12, 12)
        values = [spec.pi_at(Fraction(i, 4)) for i in range(1, 49)]
        assert values == sorted(values)

    @pytest.mark.parametrize("seed", range(6))
    def test_methods_agree_with_brute_force(self, seed):
        rng = random.Random(100 + seed)
        g, r = random_model(rng, k_choices=(1, 2, 3))
        T = 4 * r.inf + Fraction(1, 3)
        dp = length_spectrum(g, r, T)
        assert dp == length_spectrum(g, r, T, method="enumerate")
        assert dp.items == brute_spectrum(g, r, T)

    def test_golden_mean_range_two(self):
        r = RoofFunction(GM, 2, {"aa": Fraction(1, 2), "ab": 1, "ba": Fraction(3, 2)})
        T = Fraction(9)
        assert length_spectrum(GM, r, T).items == brute_spectrum(GM, r, T)

    def test_length_bounds(self):
        for orbit in closed_orbits(G2, R12, 10):
            p = len(orbit.cycle.word)
            assert p * R12.inf <= orbit.length <= p * R12.sup
