"""The Bowen-Walters metric on suspension spaces.

On the unit suspension a *basic path* alternates horizontal moves (same
height, change of base point) and vertical moves (along a flow line).  The
metric ``d_1`` is the infimum of basic path lengths, which has no finite
formula, so :func:`d1_interval` returns certified bounds:

* ``hi`` is the length of an explicit basic path, found by a shortest path
  search over a finite graph of candidate corner points;
* ``lo`` comes from flowing both points so that one sits at height 1/2 and
  bounding every short path there from below.

``d_r`` on a general suspension is ``d_1`` after rescaling heights by the
roof.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import HeightMismatch, NotOnOrbit
from .flow import FlowPoint, flow
from .roof import RoofFunction, as_fraction
from .shift import SeqPoint, base_distance_exponent

E = math.e
GRID = 32
SHIFT_RADIUS = 2
HALF = Fraction(1, 2)


@lru_cache(maxsize=1 << 16)
def _d(x: SeqPoint, y: SeqPoint) -> float:
    m = base_distance_exponent(x, y)
    return 0.0 if m is None else math.exp(-m)


def _unit_flow(z: FlowPoint, tau) -> FlowPoint:
    s = z.height + as_fraction(tau)
    n = math.floor(s)
    return FlowPoint(z.base.shift(n), s - n)


def _check_unit(z: FlowPoint):
    if not 0 <= z.height < 1:
        raise HeightMismatch(f"height {z.height} outside [0, 1)")


def orbit_offset(x: SeqPoint, y: SeqPoint):
    """Some ``m`` with ``shift(x, m) == y``, or ``None``.

    For periodic ``x`` the answer is unique modulo the period and the
    least nonnegative one is returned.
    """
    if x.is_purely_periodic:
        p = x.period
        for m in range(p):
            if x.shift(m) == y:
                return m
        return None
    reach = (
        len(x.core) + len(y.core) + abs(x.origin) + abs(y.origin)
        + math.lcm(len(x.left), len(y.left)) + math.lcm(len(x.right), len(y.right))
    )
    for m in range(-reach, reach + 1):
        if x.shift(m) == y:
            return m
    return None


def horizontal_length(z: FlowPoint, w: FlowPoint) -> float:
    """``(1 - t) d(x, y) + t d(shift x, shift y)`` for ``z = (x, t)``,
    ``w = (y, t)``.

    >>> a, b = SeqPoint.periodic("a"), SeqPoint.parse("a|.b|a")
    >>> round(horizontal_length(FlowPoint(a, 0.5), FlowPoint(b, 0.5)), 4)
    0.6839
    """
    _check_unit(z)
    _check_unit(w)
    if z.height != w.height:
        raise HeightMismatch(f"heights {z.height} and {w.height} differ")
    t = float(z.height)
    x, y = z.base, w.base
    return (1 - t) * _d(x, y) + t * _d(x.shift(1), y.shift(1))


def vertical_length(z: FlowPoint, w: FlowPoint) -> float:
    """``min{|t| > 0 : w = psi^t(z)}`` for the unit suspension flow ``psi``.

    Returns ``inf`` for ``z == w`` on a non-periodic orbit (no positive
    return time exists).
    """
    _check_unit(z)
    _check_unit(w)
    m = orbit_offset(z.base, w.base)
    if m is None:
        raise NotOnOrbit(f"{w} is not on the flow line of {z}")
    delta = m + w.height - z.height
    if z.base.is_purely_periodic:
        p = z.base.period
        delta %= p
        return float(min(delta, p - delta)) if delta else float(p)
    return float(abs(delta)) if delta else math.inf


# ---------------------------------------------------------------------------
# certified intervals

@dataclass(frozen=True)
class BasicPath:
    """Corner points of a basic path and the kind of each segment
    (``"h"`` or ``"v"``)."""

    points: tuple
    kinds: tuple

    def length(self) -> float:
        total = 0.0
        for (p, q), kind in zip(zip(self.points, self.points[1:]), self.kinds):
            total += horizontal_length(p, q) if kind == "h" else vertical_length(p, q)
        return total

    def __str__(self):
        if not self.points:
            return ""
        parts = [str(self.points[0])]
        for kind, p in zip(self.kinds, self.points[1:]):
            parts.append(f" -{kind}-> {p}")
        return "".join(parts)


@dataclass(frozen=True)
class BwInterval:
    lo: float
    hi: float
    witness_path: BasicPath

    def __post_init__(self):
        if self.lo > self.hi * (1 + 1e-12) + 1e-15:
            raise AssertionError(f"empty interval [{self.lo}, {self.hi}]")


def lower_bound(z: FlowPoint, w: FlowPoint) -> float:
    """Lower bound for ``d_1(z, w)``.

    Flow both points by ``tau`` (``|tau| < 1``) so that one of them sits at
    height 1/2.  A basic path shorter than 1/2 from there never reaches
    the roof, so its vertical parts cover the height gap and its horizontal
    parts cover at least ``e^-1`` times the base distance.  Flowing changes
    ``d_1`` by at most the factor ``1 + 2 e^2 |tau|``.
    """
    if z == w:
        return 0.0
    best = 0.0
    for p, q in ((z, w), (w, z)):
        for target in (HALF, HALF + 1, HALF - 1):
            tau = target - p.height
            if abs(tau) >= 1:
                continue
            p1, q1 = _unit_flow(p, tau), _unit_flow(q, tau)
            gap = abs(float(q1.height - HALF)) + _d(p1.base, q1.base) / E
            best = max(best, min(0.5, gap) / (1 + 2 * E * E * abs(float(tau))))
    return best


def _group_points(points: Sequence[SeqPoint]) -> list:
    """Assign ``(group, offset)`` to each point so that points in one group
    are ``shift(rep, offset)`` of the group's representative."""
    reps = []
    out = []
    for x in points:
        for g, rep in enumerate(reps):
            m = orbit_offset(rep, x)
            if m is not None:
                out.append((g, m))
                break
        else:
            reps.append(x)
            out.append((len(reps) - 1, 0))
    return out, reps


def d1_interval(
    z: FlowPoint, w: FlowPoint, K: int = 4, via: Sequence[FlowPoint] = (),
    shift_radius: int = SHIFT_RADIUS, grid: int = GRID,
) -> BwInterval:
    """Certified interval for ``d_1(z, w)`` on the unit suspension.

    Candidate corners are ``(shift^j b, h)`` for ``b`` a base of ``z``,
    ``w`` or a ``via`` point, ``|j| <= shift_radius``, and ``h`` one of the
    endpoint heights, via heights or ``i / grid``.  ``hi`` is the shortest
    basic path with at most ``K`` segments through these corners.
    """
    if K < 1:
        raise ValueError("K must be positive")
    for p in (z, w, *via):
        _check_unit(p)
    if z == w:
        return BwInterval(0.0, 0.0, BasicPath((z,), ()))

    sources = [z.base, w.base] + [p.base for p in via]
    groups, reps = _group_points(sources)
    bases, seen = [], {}
    for (g, m) in groups:
        rep = reps[g]
        for j in range(-shift_radius, shift_radius + 1):
            b = rep.shift(m + j)
            if b not in seen:
                seen[b] = len(bases)
                bases.append((b, g, m + j))
    heights = sorted(
        {z.height, w.height, *(p.height for p in via)}
        | {Fraction(i, grid) for i in range(grid)}
    )
    nb, nh = len(bases), len(heights)
    hf = np.array([float(h) for h in heights])

    D = np.zeros((nb, nb))
    Ds = np.zeros((nb, nb))
    for i in range(nb):
        for j in range(i + 1, nb):
            bi, bj = bases[i][0], bases[j][0]
            D[i, j] = D[j, i] = _d(bi, bj)
            Ds[i, j] = Ds[j, i] = _d(bi.shift(1), bj.shift(1))

    # node (i, a) -> index a * nb + i
    n = nb * nh
    M = np.full((n, n), np.inf)
    kind = np.zeros((n, n), dtype="<U1")
    for a in range(nh):
        blk = (1 - hf[a]) * D + hf[a] * Ds
        np.fill_diagonal(blk, np.inf)
        sl = slice(a * nb, (a + 1) * nb)
        M[sl, sl] = blk
        kind[sl, sl] = "h"
    period = {g: (rep.period if rep.is_purely_periodic else None) for g, rep in enumerate(reps)}
    times = np.array([[bases[i][2] + hf[a] for i in range(nb)] for a in range(nh)]).ravel()
    group = np.tile(np.array([bases[i][1] for i in range(nb)]), nh)
    for g in set(group.tolist()):
        idx = np.flatnonzero(group == g)
        diff = np.abs(times[idx][:, None] - times[idx][None, :])
        if period[g] is not None:
            p = period[g]
            diff = np.mod(diff, p)
            diff = np.minimum(diff, p - diff)
        np.fill_diagonal(diff, np.inf)
        sub = np.ix_(idx, idx)
        better = diff < M[sub]
        M[sub] = np.where(better, diff, M[sub])
        kind[sub] = np.where(better, "v", kind[sub])

    def node(p: FlowPoint) -> int:
        return heights.index(p.height) * nb + seen[p.base]

    src, dst = node(z), node(w)
    dist = np.full(n, np.inf)
    dist[src] = 0.0
    preds = []
    for _ in range(K):
        cand = dist[:, None] + M
        arg = np.argmin(cand, axis=0)
        new = cand[arg, np.arange(n)]
        keep = dist <= new
        arg = np.where(keep, -1, arg)
        dist = np.where(keep, dist, new)
        preds.append(arg)

    hi = float(dist[dst])
    # recover the witness
    chain, cur = [dst], dst
    for arg in reversed(preds):
        if arg[cur] >= 0:
            cur = int(arg[cur])
            chain.append(cur)
    chain.reverse()

    def point(v: int) -> FlowPoint:
        a, i = divmod(v, nb)
        return FlowPoint(bases[i][0], heights[a])

    pts = tuple(point(v) for v in chain)
    kinds = tuple(str(kind[u, v]) for u, v in zip(chain, chain[1:]))
    lo = lower_bound(z, w)
    return BwInterval(min(lo, hi), hi, BasicPath(pts, kinds))


def normalize(r: RoofFunction, z: FlowPoint) -> FlowPoint:
    """``(x, t) -> (x, t / r(x))``, exact."""
    return FlowPoint(z.base, z.height / r(z.base))


def dr_interval(r: RoofFunction, z: FlowPoint, w: FlowPoint, K: int = 4, **kw) -> BwInterval:
    """Certified interval for ``d_r(z, w) = d_1(normalize(z), normalize(w))``."""
    z.check(r)
    w.check(r)
    return d1_interval(normalize(r, z), normalize(r, w), K, **kw)


# ---------------------------------------------------------------------------
# the comparison lemma

@dataclass(frozen=True)
class BwConstants:
    """Explicit constants for the comparison inequalities between ``d_r``
    and the product structure, for a roof with Hölder data ``(H, 1)``.

    ``A`` bounds base distances, ``B`` normalised height gaps, ``E`` raw
    height gaps, ``C1`` the upper comparison and ``C3`` the flow estimate
    for ``|tau| < 1``, obtained by iterating ``N`` steps of length below
    ``inf r / 2`` with one-step constant ``C3p``.
    """

    inf: float
    sup: float
    H: float
    kappa: float
    C1: float
    A: float
    B: float
    E: float
    C3p: float
    N: int
    C3: float

    @classmethod
    def of(cls, r: RoofFunction) -> "BwConstants":
        I, S, H = float(r.inf), float(r.sup), r.holder_constant
        B = 1 + 2 * E * E
        A = E * B
        Econst = B * S + H * A
        C1 = max(1 / I, H / I + E)
        D0 = I / (2 * max(A, B * S))
        C3p = max(2 / D0, E * E * A + 2 * (Econst + 2 * B * S + (1 + 2 * E) * H * A) / I)
        N = math.ceil(1 / min(1.0, I / 2))
        return cls(I, S, H, 1.0, C1, A, B, Econst, C3p, N, C3p ** N)


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: float
    rhs: float
    applicable: bool = True

    @property
    def passed(self) -> bool:
        return (not self.applicable) or self.lhs <= self.rhs * (1 + 1e-12) + 1e-15


@dataclass(frozen=True)
class BwLemmaReport:
    checks: tuple
    interval: BwInterval
    image_interval: BwInterval
    constants: BwConstants

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def by_part(self, prefix: str) -> list:
        return [c for c in self.checks if c.name.startswith(prefix)]


def check_bw_lemma(r: RoofFunction, z: FlowPoint, w: FlowPoint, tau, K: int = 4) -> BwLemmaReport:
    """Evaluate the comparison inequalities for ``d_r`` at ``(z, w, tau)``.

    Upper-bounded quantities use the interval's ``hi``; bounds in terms of
    ``d_r`` use its ``lo``.  Parts:

    * ``(1)``  ``d_r(z, w) <= C1 (d(x, y)^kappa + |t - s|)``;
    * ``(2a)`` if ``|t/r(x) - s/r(y)| <= 1/2``: ``d(x, y) <= A d_r``,
      ``|delta| <= B d_r`` and ``|s - t| <= E d_r^kappa``;
    * ``(2b)`` if ``t/r(x) - s/r(y) > 1/2``: ``d(shift x, y) <= A d_r``,
      ``delta' <= B d_r`` and ``s, |t - r(x)| <= B sup(r) d_r``
      (and symmetrically with the roles of ``z`` and ``w`` exchanged);
    * ``(3)``  ``d_r(flow^tau z, flow^tau w) <= C3 d_r(z, w)^kappa``.
    """
    tau = as_fraction(tau)
    if abs(tau) >= 1:
        raise ValueError("part (3) needs |tau| < 1")
    c = BwConstants.of(r)
    iv = dr_interval(r, z, w, K)
    z1, w1 = flow(r, z, tau), flow(r, w, tau)
    iv_img = dr_interval(r, z1, w1, K)
    lo, hi = iv.lo, iv.hi
    x, y, t, s = z.base, w.base, z.height, w.height
    tn, sn = normalize(r, z).height, normalize(r, w).height
    delta = sn - tn
    checks = [
        Inequality("(1)", hi, c.C1 * (_d(x, y) ** c.kappa + float(abs(t - s)))),
    ]
    near = abs(delta) <= HALF
    checks += [
        Inequality("(2a) base", _d(x, y), c.A * lo, near),
        Inequality("(2a) normalised height", float(abs(delta)), c.B * lo, near),
        Inequality("(2a) height", float(abs(s - t)), c.E * lo ** c.kappa, near),
    ]
    for name, (p, q, pn, qn) in (("", (z, w, tn, sn)), (" swapped", (w, z, sn, tn))):
        ok = pn - qn > HALF
        dprime = float(1 - (pn - qn))
        checks += [
            Inequality(f"(2b{name}) base", _d(p.base.shift(1), q.base), c.A * lo, ok),
            Inequality(f"(2b{name}) normalised height", dprime, c.B * lo, ok),
            Inequality(f"(2b{name}) height", float(q.height), c.B * c.sup * lo, ok),
            Inequality(
                f"(2b{name}) roof gap", float(abs(p.height - r(p.base))), c.B * c.sup * lo, ok
            ),
        ]
    checks.append(Inequality("(3)", iv_img.hi, c.C3 * lo ** c.kappa))
    return BwLemmaReport(tuple(checks), iv, iv_img, c)
