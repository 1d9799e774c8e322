"""Pressure, equilibrium measures and the measure of maximal entropy.

Locally constant potentials are rewritten on the edges of a block graph,
where the transfer operator is the finite matrix
``M(u, v) = exp(phi(u, v))``.  Its Perron root gives the pressure and its
Perron vectors give the equilibrium Markov measure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConsistencyFailure, NotTransitive, ValidationError
from .roof import BlockFunction, RoofFunction, edge_form
from .shift import Graph, admissible_words, higher_block, is_transitive

TOL = 1e-13


@dataclass(frozen=True, eq=False)
class Potential(BlockFunction):
    """Real-valued locally constant potential of range ``k``."""

    def _convert(self, value):
        try:
            v = float(value)
        except (TypeError, ValueError):
            raise ValidationError(f"not a real value: {value!r}") from None
        if not math.isfinite(v):
            raise ValidationError(f"potential values must be finite, got {value!r}")
        return v

    @classmethod
    def zero(cls, graph: Graph) -> "Potential":
        return cls(graph, 1, {(v,): 0.0 for v in graph.vertices})

    @classmethod
    def from_function(cls, f: BlockFunction, scale=1.0) -> "Potential":
        """``scale * f`` as a potential, e.g. ``from_function(r, -h)``."""
        return cls(f.graph, f.k, {w: float(scale) * float(v) for w, v in f.table.items()})


def _power(M: np.ndarray) -> np.ndarray:
    """Positive Perron vector of an irreducible nonnegative matrix.

    Iterates ``M + cI`` (``c`` the least row sum) from the all-ones vector,
    which also converges for periodic matrices.  When convergence is slow
    the iteration matrix is squared (and rescaled), which keeps the
    eigenvector and speeds up the contraction; the result is then polished
    with the unsquared matrix.
    """
    n = M.shape[0]
    c = M.sum(axis=1).min()
    S = M + c * np.eye(n)
    B = S / S.max()
    v = np.ones(n)

    def iterate(mat, v, steps):
        for _ in range(steps):
            w = mat @ v
            w /= w.max()
            if np.max(np.abs(w - v)) <= TOL * np.max(np.abs(w)):
                return w, True
            v = w
        return v, False

    for _ in range(64):
        v, done = iterate(B, v, 64)
        if done:
            break
        B = B @ B
        B /= B.max()
    else:
        raise ConsistencyFailure("power iteration did not converge")
    v, done = iterate(S, v, 256)
    if not done:
        raise ConsistencyFailure("power iteration did not converge")
    return v


def perron(M: np.ndarray) -> tuple:
    """``(lam, left, right)`` for an irreducible nonnegative matrix."""
    right = _power(M)
    left = _power(M.T)
    lam = float(left @ M @ right) / float(left @ right)
    return lam, left, right


def _matrix(form) -> np.ndarray:
    n = len(form.graph.vertices)
    M = np.zeros((n, n))
    for (i, j), w in form.weights.items():
        M[i, j] = math.exp(float(w))
    return M


def _require_transitive(graph: Graph):
    if not is_transitive(graph):
        raise NotTransitive("graph is not strongly connected; decompose it first")


def pressure(graph: Graph, phi: BlockFunction) -> float:
    """Topological pressure ``log`` of the Perron root of ``exp(phi)``.

    >>> from symflow.shift import validate_graph
    >>> g2 = validate_graph({"vertices": "ab", "edges": ["aa", "ab", "ba", "bb"]})
    >>> round(pressure(g2, Potential.zero(g2)), 12) == round(math.log(2), 12)
    True
    """
    _require_transitive(graph)
    if phi.graph != graph:
        raise ValidationError("potential is defined on a different graph")
    lam, _, _ = perron(_matrix(edge_form(phi)))
    return math.log(lam)


# ---------------------------------------------------------------------------
# Markov measures

@dataclass(frozen=True, eq=False)
class MarkovMeasure:
    """Stationary Markov chain on the ``level``-block graph of ``base``.

    ``P[i, j]`` is the transition probability between states (vertices of
    ``states``); ``pi`` is the stationary vector.  ``lam``, ``left`` and
    ``right`` hold the Perron data when the measure came from a potential.
    """

    base: Graph
    level: int
    states: Graph
    P: np.ndarray = field(repr=False)
    pi: np.ndarray = field(repr=False)
    lam: float = None
    left: np.ndarray = field(default=None, repr=False)
    right: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        n = len(self.states.vertices)
        if self.P.shape != (n, n):
            raise ValidationError("transition matrix has the wrong shape")
        adj = self.states.adjacency.astype(bool)
        if np.any(self.P[~adj] != 0):
            raise ValidationError("transition probabilities off the graph's edges")
        if np.any(self.P < 0) or not np.allclose(self.P.sum(axis=1), 1, atol=1e-12, rtol=0):
            raise ValidationError("rows must be probability vectors")

    def _state(self, word: Sequence):
        return word[0] if self.level == 1 else tuple(word)

    def transition(self, u, v) -> float:
        idx = self.states.index
        return float(self.P[idx[u], idx[v]])

    def stationary(self, u) -> float:
        return float(self.pi[self.states.index[u]])

    def cylinder(self, word: Sequence) -> float:
        """Measure of the cylinder ``[x_0 ... x_{m-1}] = word``."""
        word = tuple(word)
        ell = self.level
        if not self.base.is_path(word):
            return 0.0
        if len(word) < ell:
            return sum(
                self.cylinder(word + tail[1:])
                for tail in admissible_words(self.base, ell - len(word) + 1)
                if tail[0] == word[-1]
            )
        idx = self.states.index
        states = [idx[self._state(word[i : i + ell])] for i in range(len(word) - ell + 1)]
        p = float(self.pi[states[0]])
        for a, b in zip(states, states[1:]):
            p *= float(self.P[a, b])
        return p

    def lift(self, level: int) -> "MarkovMeasure":
        """The same measure presented on a longer block graph."""
        if level < self.level:
            raise ValueError("cannot lower the level")
        if level == self.level:
            return self
        g = higher_block(self.base, level).graph
        idx, sidx = g.index, self.states.index
        n = len(g.vertices)
        P = np.zeros((n, n))
        pi = np.array([self.cylinder(b if level > 1 else (b,)) for b in g.vertices])
        for u, v in g.sorted_edges:
            a = self._state(u[-self.level :])
            b = self._state(v[-self.level :])
            P[idx[u], idx[v]] = self.P[sidx[a], sidx[b]]
        return MarkovMeasure(self.base, level, g, P, pi)


def markov_measure(graph: Graph, P, level: int = 1) -> MarkovMeasure:
    """Markov measure with transition matrix ``P`` on the ``level``-block
    graph; the stationary vector is computed (the chain must be irreducible)."""
    states = higher_block(graph, level).graph
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    A = np.vstack([P.T - np.eye(n), np.ones(n)])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    return MarkovMeasure(graph, level, states, P, np.clip(pi, 0, None) / np.clip(pi, 0, None).sum())


def equilibrium(graph: Graph, phi: BlockFunction) -> MarkovMeasure:
    """Equilibrium measure of ``phi``: ``p(u, v) = M(u, v) R(v) / (lam R(u))``
    and ``pi(u)`` proportional to ``L(u) R(u)``."""
    _require_transitive(graph)
    if phi.graph != graph:
        raise ValidationError("potential is defined on a different graph")
    form = edge_form(phi)
    M = _matrix(form)
    lam, left, right = perron(M)
    P = M * right[None, :] / (lam * right[:, None])
    P /= P.sum(axis=1, keepdims=True)
    pi = left * right
    pi /= pi.sum()
    return MarkovMeasure(graph, form.level, form.graph, P, pi, lam, left, right)


def entropy(m: MarkovMeasure) -> float:
    """``-sum_u pi(u) sum_v p(u, v) log p(u, v)``."""
    P = m.P
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(P > 0, np.log(np.where(P > 0, P, 1.0)), 0.0)
    return float(max(0.0, -(m.pi[:, None] * P * logs).sum()))


def integrate(m: MarkovMeasure, f: BlockFunction) -> float:
    """``sum over edges of pi(u) p(u, v) f(u, v)`` after aligning ranges."""
    need = max(1, f.k - 1)
    if need > m.level:
        m = m.lift(need)
    form = edge_form(f, m.level)
    total = 0.0
    for (i, j), w in form.weights.items():
        total += m.pi[i] * m.P[i, j] * float(w)
    return float(total)


# ---------------------------------------------------------------------------
# measure of maximal entropy of the flow

@dataclass(frozen=True)
class MmeResult:
    """Flow entropy ``h`` with its bisection bracket and the base measure."""

    h: float
    bracket: tuple
    measure: MarkovMeasure = field(repr=False)
    base_entropy: float
    mean_roof: float


def mme_flow(graph: Graph, r: RoofFunction, tol: float = 1e-12) -> MmeResult:
    """Root ``h`` of ``P(-h r) = 0`` by bisection and the base measure
    ``nu = equilibrium(-h r)``; checks ``h = h_nu / int r dnu``.

    >>> from symflow.shift import validate_graph
    >>> g2 = validate_graph({"vertices": "ab", "edges": ["aa", "ab", "ba", "bb"]})
    >>> res = mme_flow(g2, RoofFunction(g2, 1, {"a": 1, "b": 2}))
    >>> round(res.h, 9) == round(math.log((1 + math.sqrt(5)) / 2), 9)
    True
    """
    _require_transitive(graph)
    if r.graph != graph:
        raise ValidationError("roof is defined on a different graph")
    form = edge_form(r)
    R = np.zeros((len(form.graph.vertices),) * 2)
    mask = np.zeros_like(R, dtype=bool)
    for (i, j), w in form.weights.items():
        R[i, j] = float(w)
        mask[i, j] = True

    def P(h):
        M = np.where(mask, np.exp(-h * R), 0.0)
        return math.log(perron(M)[0])

    lo, hi = 0.0, max(P(0.0), 0.0) / float(r.inf)
    if hi > 0:
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if P(mid) > 0:
                lo = mid
            else:
                hi = mid
    h = 0.5 * (lo + hi)
    nu = equilibrium(graph, Potential.from_function(r, -h))
    hnu = entropy(nu)
    mean = integrate(nu, r)
    if abs(hnu / mean - h) > 1e-9:
        raise ConsistencyFailure(f"entropy ratio {hnu / mean} differs from root {h}")
    return MmeResult(h, (lo, hi), nu, hnu, mean)
