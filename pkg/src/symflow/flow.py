"""The suspension (topological Markov) flow over a roof function.

A point of the suspension is a pair ``(x, t)`` with ``0 <= t < r(x)``; the
flow moves ``t`` up at unit speed and jumps to ``(shift(x), 0)`` at the
roof.  Heights and flow times are exact rationals.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .errors import GraphMismatch, NotPeriodic, ParseError, ValidationError
from .roof import RoofFunction, as_fraction, edge_form, format_fraction
from .shift import CycleClass, Graph, SeqPoint, iter_lyndon_cycles


@dataclass(frozen=True)
class FlowPoint:
    """A point ``(base, height)`` of the suspension space.

    The invariant ``0 <= height < r(base)`` depends on the roof and is
    checked by :meth:`make` and :meth:`check`.
    """

    base: SeqPoint
    height: Fraction

    def __post_init__(self):
        object.__setattr__(self, "height", as_fraction(self.height))

    @classmethod
    def make(cls, r: RoofFunction, base: SeqPoint, height=0) -> "FlowPoint":
        return cls(base, height).check(r)

    @classmethod
    def parse(cls, text: str, r: RoofFunction = None) -> "FlowPoint":
        """Parse ``"LEFT|CORE|RIGHT@t"``; the height defaults to 0."""
        point, sep, t = text.partition("@")
        try:
            height = as_fraction(t) if sep else Fraction(0)
        except ValidationError:
            raise ParseError(f"bad height in {text!r}") from None
        z = cls(SeqPoint.parse(point), height)
        if r is not None:
            r.graph.check_point(z.base)
            z.check(r)
        return z

    def check(self, r: RoofFunction) -> "FlowPoint":
        if not 0 <= self.height < r(self.base):
            raise ValidationError(
                f"height {self.height} outside [0, {r(self.base)}) at {self.base}"
            )
        return self

    def __str__(self):
        return f"{self.base}@{format_fraction(self.height)}"


def flow(r: RoofFunction, z: FlowPoint, tau) -> FlowPoint:
    """``sigma_r^tau(x, t) = (shift^n x, t + tau - r_n(x))`` for the unique
    ``n`` placing the height in ``[0, r(shift^n x))``.

    >>> from symflow.shift import validate_graph
    >>> g2 = validate_graph({"vertices": "ab", "edges": ["aa", "ab", "ba", "bb"]})
    >>> r = RoofFunction(g2, 1, {"a": 1, "b": 2})
    >>> str(flow(r, FlowPoint(SeqPoint.periodic("ab"), 0), Fraction(7, 2)))
    'ab|.ab|ab@1/2'
    """
    x, k = z.base, r.k
    s = z.height + as_fraction(tau)
    n = 0
    if s >= 0:
        while True:
            h = r.value(x.window(n, n + k))
            if s < h:
                break
            s -= h
            n += 1
    else:
        while s < 0:
            n -= 1
            s += r.value(x.window(n, n + k))
    return FlowPoint(x.shift(n), s)


@dataclass(frozen=True)
class ClosedOrbit:
    """The closed orbit traced by ``cycle`` repeated ``multiplicity`` times."""

    cycle: CycleClass
    multiplicity: int
    length: Fraction

    @property
    def simple(self) -> bool:
        return self.multiplicity == 1


def orbit_of_cycle(r: RoofFunction, c: CycleClass, m: int = 1) -> ClosedOrbit:
    """Closed orbit of ``c`` taken ``m`` times; its length is
    ``m * r_p(c^inf)`` for the primitive period ``p``."""
    if m < 1:
        raise ValueError("multiplicity must be positive")
    if not r.graph.is_cycle(c.word):
        raise ValidationError(f"{c.word!r} is not a cycle of the graph")
    return ClosedOrbit(c, m, m * r.word_sum(c.word))


def orbit_multiplicity(y: SeqPoint, n: int) -> int:
    """``n / p`` for a point with ``shift^n y == y`` and primitive period ``p``.

    >>> orbit_multiplicity(SeqPoint.periodic("ab"), 4)
    2
    """
    if n < 1 or y.shift(n) != y:
        raise NotPeriodic(f"{y} is not fixed by the {n}-th power of the shift")
    return n // y.period


# ---------------------------------------------------------------------------
# length spectrum

@dataclass(frozen=True)
class LengthSpectrum:
    """Lengths of simple closed orbits up to ``T`` with their multiplicities."""

    T: Fraction
    items: tuple  # ((length, count), ...) sorted by length

    @property
    def pi(self) -> int:
        return sum(c for _, c in self.items)

    def as_dict(self) -> dict:
        return dict(self.items)

    def pi_at(self, T) -> int:
        T = as_fraction(T)
        return sum(c for length, c in self.items if length <= T)

    def __iter__(self) -> Iterator:
        return iter(self.items)


def _mobius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def closed_walk_counts(r: RoofFunction, n_max: int, w_max: int) -> np.ndarray:
    """``N[n, L]``: closed walks of length ``n`` (``1 <= n <= n_max``) whose
    scaled weight ``D * r_n`` equals ``L <= w_max``; ``D = r.denominator``.

    Exact integer counts (object array).
    """
    d, _ = r.scaled()
    form = edge_form(r)
    nv = len(form.graph.vertices)
    out_edges = defaultdict(list)
    for (i, j), q in form.weights.items():
        out_edges[i].append((j, int(q * d)))
    counts = np.zeros((n_max + 1, w_max + 1), dtype=object)
    for s in range(nv):
        cur = np.zeros((nv, w_max + 1), dtype=object)
        cur[s, 0] = 1
        for n in range(1, n_max + 1):
            nxt = np.zeros_like(cur)
            for i in range(nv):
                row = cur[i]
                for j, w in out_edges[i]:
                    if w <= w_max:
                        nxt[j, w:] += row[: w_max + 1 - w]
            cur = nxt
            counts[n] += cur[s]
    return counts


def length_spectrum(graph: Graph, r: RoofFunction, T, method: str = "dp") -> LengthSpectrum:
    """Exact multiset of simple closed orbit lengths ``<= T``.

    ``method="dp"`` counts closed walks by weight with a transfer-matrix
    recursion and removes non-primitive ones by Möbius inversion;
    ``method="enumerate"`` lists the primitive cycles directly.

    >>> from symflow.shift import validate_graph
    >>> g2 = validate_graph({"vertices": "ab", "edges": ["aa", "ab", "ba", "bb"]})
    >>> length_spectrum(g2, RoofFunction.constant(g2), 3).items
    ((Fraction(1, 1), 2), (Fraction(2, 1), 1), (Fraction(3, 1), 2))
    """
    if r.graph != graph:
        raise GraphMismatch("roof is defined on a different graph")
    T = as_fraction(T)
    if T <= 0:
        raise ValueError("T must be positive")
    n_max = int(T / r.inf)
    if n_max < 1:
        return LengthSpectrum(T, ())
    if method == "enumerate":
        found = defaultdict(int)
        for orbit in closed_orbits(graph, r, T):
            found[orbit.length] += 1
        return LengthSpectrum(T, tuple(sorted(found.items())))
    if method != "dp":
        raise ValueError(f"unknown method {method!r}")
    if r.inf == r.sup:
        return _constant_spectrum(graph, r.inf, T)
    d = r.denominator
    w_max = int(T * d)
    N = closed_walk_counts(r, n_max, w_max)
    found = defaultdict(int)
    for n in range(1, n_max + 1):
        for L in range(w_max + 1):
            total = 0
            for e in range(1, n + 1):
                if n % e == 0 and L % e == 0:
                    mu = _mobius(e)
                    if mu:
                        total += mu * N[n // e, L // e]
            if total:
                if total % n:
                    raise AssertionError("primitive point count not divisible by period")
                found[Fraction(L, d)] += total // n
    return LengthSpectrum(T, tuple(sorted(found.items())))


def _trace_powers(graph: Graph, n_max: int) -> list:
    """Exact ``[tr A^0, ..., tr A^n_max]``.

    Uses int64 arithmetic while a float shadow computation shows the entries
    stay far from overflow, and Python integers from there on.
    """
    A = graph.adjacency.astype(np.int64)
    P = np.identity(len(graph.vertices), dtype=np.int64)
    shadow = P.astype(float)
    traces = [len(graph.vertices)]
    n = 0
    while n < n_max:
        shadow = shadow @ A
        if shadow.sum() > 2.0 ** 60:
            break
        P = P @ A
        n += 1
        traces.append(int(P.trace()))
    if n < n_max:
        A, P = A.astype(object), P.astype(object)
        while n < n_max:
            P = P.dot(A)
            n += 1
            traces.append(int(P.trace()))
    return traces


def _constant_spectrum(graph: Graph, c: Fraction, T: Fraction) -> LengthSpectrum:
    """Constant roof: orbit length is ``c`` times the period, and primitive
    periodic point counts follow from traces of ``A^n``."""
    n_max = int(T / c)
    traces = _trace_powers(graph, n_max)
    items = []
    for n in range(1, n_max + 1):
        total = sum(_mobius(e) * traces[n // e] for e in range(1, n + 1) if n % e == 0)
        if total:
            items.append((n * c, total // n))
    return LengthSpectrum(T, tuple(items))


def closed_orbits(graph: Graph, r: RoofFunction, T) -> list:
    """All simple closed orbits of length ``<= T``, by length then word."""
    T = as_fraction(T)
    k = r.k
    verts = graph.vertices
    n_max = int(T / r.inf)
    out = []
    if n_max < 1:
        return out

    def step(a, t):
        # blocks wholly inside the prefix a[1..t]; a lower bound on the total
        if t < k:
            return 0
        return r.value(tuple(verts[i] for i in a[t - k + 1 : t + 1]))

    def visit(word):
        c = CycleClass(tuple(verts[i] for i in word))
        length = r.word_sum(c.word)
        if length <= T:
            out.append(ClosedOrbit(c, 1, length))

    iter_lyndon_cycles(graph, n_max, visit, step_weight=step, bound=T)
    out.sort(key=lambda o: (o.length, len(o.cycle.word), graph.word_key(o.cycle.word)))
    return out
