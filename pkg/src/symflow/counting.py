"""Closed orbit counting: windows of periodic points, the weighted sum
``S(T)``, loop counts at a vertex and growth tables for ``pi(T)``.
"""
from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import EpsilonTooLarge, GraphMismatch
from .flow import length_spectrum
from .roof import RoofFunction, as_fraction, edge_form, format_fraction
from .shift import Cylinder, Graph, periodic_points

LN2 = math.log(2)


def _check_eps(r: RoofFunction, eps: Fraction):
    # the boundary value eps = inf(r)/10 is admitted
    if not 0 < eps <= r.inf / 10:
        raise EpsilonTooLarge(f"need 0 < eps <= inf(r)/10 = {r.inf / 10}, got {eps}")


def _check_graph(graph: Graph, r: RoofFunction):
    if r.graph != graph:
        raise GraphMismatch("roof is defined on a different graph")


def _weight(h: float, length: Fraction) -> float:
    """``exp(-h * length)``, evaluated as a power of two so that
    ``h = log 2`` with an integer length is exact."""
    return 2.0 ** (-(h / LN2) * float(length))


def upsilon(graph: Graph, r: RoofFunction, A: Cylinder, T, n: int, eps) -> list:
    """Periodic points ``y`` in ``A`` with ``shift^n y = y`` and
    ``|r_n(y) - T| < 2 eps``, in lexicographic order."""
    _check_graph(graph, r)
    T, eps = as_fraction(T), as_fraction(eps)
    _check_eps(r, eps)
    out = []
    for y in periodic_points(graph, n):
        if A.contains(y) and abs(r.word_sum(y.window(0, n)) - T) < 2 * eps:
            out.append(y)
    return out


def _cylinder_walk_counts(r: RoofFunction, word: tuple, n: int, w_lo: int, w_hi: int) -> dict:
    """Number of ``y`` with ``shift^n y = y``, ``y_0 .. y_{m-1} = word`` and
    scaled weight ``D r_n(y) = L`` for ``w_lo <= L <= w_hi``."""
    d = r.denominator
    form = edge_form(r)
    g = form.graph
    verts = g.vertices
    m = len(word)

    def first(i):
        v = verts[i]
        return v if form.level == 1 else v[0]

    if m > n:
        # the cylinder word must itself be n-periodic
        if any(word[i] != word[i % n] for i in range(m)):
            return {}
        word = word[:n]
        m = n
    out_edges = defaultdict(list)
    for (i, j), q in form.weights.items():
        out_edges[i].append((j, int(q * d)))
    counts = defaultdict(int)
    for s in range(len(verts)):
        if first(s) != word[0]:
            continue
        cur = {s: np.zeros(w_hi + 1, dtype=object)}
        cur[s][0] = 1
        for step in range(1, n + 1):
            nxt = {}
            for i, row in cur.items():
                for j, w in out_edges[i]:
                    if step < m and first(j) != word[step]:
                        continue
                    if step == n and j != s:
                        continue
                    if w > w_hi:
                        continue
                    acc = nxt.setdefault(j, np.zeros(w_hi + 1, dtype=object))
                    acc[w:] += row[: w_hi + 1 - w]
            cur = nxt
        if s in cur:
            for L in range(w_lo, w_hi + 1):
                if cur[s][L]:
                    counts[L] += int(cur[s][L])
    return dict(counts)


def s_of_t(graph: Graph, r: RoofFunction, A: Cylinder, T, eps, h: float) -> float:
    """``sum_n sum_{shift^n y = y, y in A, |r_n(y) - T| <= 2 eps} exp(-h r_n(y))``.

    Only ``n <= (T + 2 eps) / inf r`` can contribute.  Periodic sums are
    shift invariant, so the cylinder is moved to offset 0 first.
    """
    _check_graph(graph, r)
    T, eps = as_fraction(T), as_fraction(eps)
    _check_eps(r, eps)
    d = r.denominator
    lo, hi = T - 2 * eps, T + 2 * eps
    w_lo, w_hi = max(0, math.ceil(lo * d)), math.floor(hi * d)
    if w_hi < w_lo:
        return 0.0
    n_max = int(hi / r.inf)
    terms = []
    for n in range(1, n_max + 1):
        for L, c in _cylinder_walk_counts(r, A.word, n, w_lo, w_hi).items():
            terms.append(c * _weight(h, Fraction(L, d)))
    return math.fsum(terms)


def gurevich_count(graph: Graph, v, n: int) -> int:
    """Closed walks of length ``n`` through ``v``: ``(A^n)_{vv}``, exact."""
    if n < 1:
        raise ValueError("n must be positive")
    i = graph.index[v]
    A = np.array(graph.adjacency, dtype=object)
    P = np.identity(len(graph.vertices), dtype=object)
    base, e = A, n
    while e:
        if e & 1:
            P = P.dot(base)
        base = base.dot(base)
        e >>= 1
    return int(P[i, i])


@dataclass(frozen=True)
class GrowthRow:
    T: Fraction
    pi: int
    predictor: float
    ratio: float
    S: float = None


def growth_table(
    graph: Graph, r: RoofFunction, T_max, steps: int, h: float = None,
    cylinder: Cylinder = None, eps=None,
) -> list:
    """Rows ``(T, pi(T), e^{hT}/T, pi(T) T e^{-hT})`` on the grid
    ``T = T_max * i / steps``; with a cylinder and ``eps`` also ``S(T)``.

    ``h`` defaults to the flow entropy from :func:`symflow.thermo.mme_flow`.
    """
    _check_graph(graph, r)
    T_max = as_fraction(T_max)
    if steps < 1:
        raise ValueError("steps must be positive")
    if h is None:
        from .thermo import mme_flow

        h = mme_flow(graph, r).h
    spectrum = length_spectrum(graph, r, T_max)
    rows = []
    for i in range(1, steps + 1):
        T = T_max * i / steps
        pi = spectrum.pi_at(T)
        predictor = math.exp(h * float(T)) / float(T)
        ratio = pi / predictor
        S = None
        if cylinder is not None:
            S = s_of_t(graph, r, cylinder, T, eps, h)
        rows.append(GrowthRow(T, pi, predictor, ratio, S))
    return rows


def growth_csv(rows: list) -> str:
    """CSV text with exact ``T`` and 12 significant digits for reals."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    with_s = any(row.S is not None for row in rows)
    w.writerow(["T", "pi", "predictor", "ratio"] + (["S"] if with_s else []))
    for row in rows:
        line = [format_fraction(row.T), row.pi, f"{row.predictor:.12g}", f"{row.ratio:.12g}"]
        if with_s:
            line.append(f"{row.S:.12g}")
        w.writerow(line)
    return buf.getvalue()
