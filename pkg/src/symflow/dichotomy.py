"""Lattice detection for cycle weights and recoding to a constant roof.

With rational roof values every closed-orbit length lies in ``c Z`` for a
largest ``c > 0`` (the gcd of the simple-cycle weights).  The roof is then
cohomologous to a ``c Z``-valued one, ``r* = r + U o shift - U``, and the
flow is conjugate to a suspension with constant roof ``c`` over a finite
graph.  :func:`recode_constant` builds that graph stage by stage and keeps
a map of cycles through every stage as a certificate.
"""
from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import networkx as nx

from .errors import ConsistencyFailure, NotTransitive
from .flow import FlowPoint, closed_orbits, length_spectrum
from .roof import EdgeForm, RoofFunction, edge_form
from .shift import Graph, SeqPoint, higher_block, is_transitive, label_str, primitive_root


def _fraction_gcd(values) -> Fraction:
    values = [Fraction(v) for v in values]
    d = math.lcm(*(v.denominator for v in values))
    return Fraction(reduce(math.gcd, (int(v * d) for v in values)), d)


def _require_transitive(graph: Graph):
    if not is_transitive(graph):
        raise NotTransitive("graph is not strongly connected")


@dataclass(frozen=True)
class LatticeReport:
    """``c``: largest number with every cycle weight in ``c Z``.

    ``weights`` are the distinct simple-cycle weights of the edge presentation.
    """

    c: Fraction
    weights: tuple

    @property
    def dense(self) -> bool:
        # rational roofs always generate a lattice
        return False

    @property
    def theta(self) -> float:
        return 2 * math.pi / float(self.c)


def simple_cycle_weights(form: EdgeForm) -> list:
    """Weights of all simple directed cycles of the edge presentation."""
    g = nx.DiGraph()
    g.add_nodes_from(range(len(form.graph.vertices)))
    g.add_edges_from(form.weights)
    out = []
    for cyc in nx.simple_cycles(g):
        out.append(
            sum(
                (form.weights[(cyc[i], cyc[(i + 1) % len(cyc)])] for i in range(len(cyc))),
                Fraction(0),
            )
        )
    return out


def cycle_lattice(graph: Graph, r: RoofFunction) -> LatticeReport:
    """gcd of the simple-cycle weights.

    Every closed walk splits into simple cycles, so all periodic Birkhoff
    sums lie in ``c Z``.

    >>> from symflow.shift import validate_graph
    >>> two = validate_graph({"vertices": "ab", "edges": ["ab", "ba"]})
    >>> cycle_lattice(two, RoofFunction(two, 1, {"a": 1, "b": 3})).c
    Fraction(4, 1)
    """
    _require_transitive(graph)
    weights = simple_cycle_weights(edge_form(r))
    return LatticeReport(_fraction_gcd(weights), tuple(sorted(set(weights))))


@dataclass(frozen=True)
class TransferFunction:
    """``U`` on the vertices of the edge presentation with values in
    ``[0, c)`` and ``r(u, v) + U(v) - U(u)`` in ``c Z`` on every edge."""

    form: EdgeForm
    c: Fraction
    U: dict = field(repr=False)

    def value(self, x: SeqPoint) -> Fraction:
        return self.U[self.form.vertex_of(x)]

    def corrected(self) -> dict:
        """``r*`` on edges ``(i, j)`` of the edge presentation (indices)."""
        verts = self.form.graph.vertices
        return {
            (i, j): w + self.U[verts[j]] - self.U[verts[i]]
            for (i, j), w in self.form.weights.items()
        }

    def eigenfunction(self, z: FlowPoint) -> complex:
        """``F(x, t) = exp(-i theta t) exp(i theta U(x))`` with
        ``theta = 2 pi / c``; ``F(flow^tau z) = exp(-i theta tau) F(z)``."""
        theta = 2 * math.pi / float(self.c)
        return cmath.exp(-1j * theta * float(z.height)) * cmath.exp(1j * theta * float(self.value(z.base)))

    def eigenvalue(self, tau) -> complex:
        return cmath.exp(-1j * 2 * math.pi * float(Fraction(tau) / self.c))


def solve_transfer(graph: Graph, r: RoofFunction, c=None) -> TransferFunction:
    """Propagate ``U(v) = (U(u) - r(u, v)) mod c`` along a breadth-first
    spanning tree from the first vertex, then verify every edge."""
    _require_transitive(graph)
    c = cycle_lattice(graph, r).c if c is None else Fraction(c)
    form = edge_form(r)
    g = form.graph
    verts = g.vertices
    U = {verts[0]: Fraction(0)}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in g.succ_idx[i]:
            if verts[j] not in U:
                U[verts[j]] = (U[verts[i]] - form.weights[(i, j)]) % c
                queue.append(j)
    tf = TransferFunction(form, c, U)
    for (i, j), w in tf.corrected().items():
        if (w / c).denominator != 1:
            raise ConsistencyFailure(f"edge {verts[i]!r}->{verts[j]!r} breaks the lattice")
    return tf


# ---------------------------------------------------------------------------
# recoding

@dataclass(frozen=True)
class Stage:
    """One stage of the recoding: a graph, a vertex roof (``None`` when the
    roof still lives on edges) and, for each vertex, what it came from."""

    name: str
    graph: Graph
    roof: dict = field(default=None, repr=False)
    origin: dict = field(default=None, repr=False)


@dataclass(frozen=True)
class RecodingResult:
    """Constant-roof model conjugate to the source flow.

    ``graph`` carries the constant roof ``c``; ``stages`` record the
    pipeline and :meth:`map_cycle` carries a source cycle through it.
    """

    source: Graph
    source_roof: RoofFunction = field(repr=False)
    graph: Graph
    c: Fraction
    transfer: TransferFunction = field(repr=False)
    stages: tuple = field(repr=False)
    labels: dict = field(repr=False)  # last stage vertex -> final label
    paired: bool = True  # whether r* had to be moved onto edge-graph vertices

    @property
    def roof(self) -> RoofFunction:
        return RoofFunction.constant(self.graph, self.c)

    def map_cycle(self, word: Sequence) -> tuple:
        """Image in ``graph`` of a cycle ``word`` of the source graph."""
        word = tuple(word)
        n = len(word)
        form = self.transfer.form
        ell = form.level
        states = [
            word[i] if ell == 1 else tuple(word[(i + j) % n] for j in range(ell))
            for i in range(n)
        ]
        if self.paired:
            pairs = [(states[i], states[(i + 1) % n]) for i in range(n)]
        else:
            pairs = states
        roof = self.stages[2].roof
        start = next(i for i, p in enumerate(pairs) if roof[p] > 0)
        pairs = pairs[start:] + pairs[:start]
        runs = []
        for p in pairs:
            if roof[p] > 0:
                runs.append([p])
            else:
                runs[-1].append(p)
        split = self.stages[3].roof
        out = []
        for run in runs:
            v = tuple(run)
            out.extend(self.labels[(v, i)] for i in range(int(split[v] / self.c)))
        return tuple(out)


def _contract(graph: Graph, roof: dict) -> tuple:
    """Merge each positive-roof vertex with the zero-roof run after it."""
    positive = [v for v in graph.vertices if roof[v] > 0]
    pos_set = set(positive)
    words = []
    limit = len(graph.vertices) + 1
    for p in positive:
        stack = [(p,)]
        while stack:
            w = stack.pop()
            if len(w) > limit:
                raise ConsistencyFailure("cycle with zero total roof")
            succ = graph.successors(w[-1])
            if any(s in pos_set for s in succ):
                words.append(w)
            for s in reversed(succ):
                if s not in pos_set:
                    stack.append(w + (s,))
    words.sort(key=lambda w: tuple(graph.index[v] for v in w))
    first = {}
    for w in words:
        first.setdefault(w[0], []).append(w)
    edges = set()
    for w in words:
        for s in graph.successors(w[-1]):
            for w2 in first.get(s, ()):
                edges.add((w, w2))
    g = Graph(tuple(words), frozenset(edges))
    return g, {w: roof[w[0]] for w in words}


def recode_constant(graph: Graph, r: RoofFunction) -> RecodingResult:
    """Conjugate the flow to a suspension with constant roof ``c``.

    Stages: edge presentation; coboundary correction ``r*``; pairing so
    that ``r*`` sits on vertices; contraction of zero-roof vertices; and
    splitting each vertex ``v`` into ``r*(v)/c`` unit-time vertices.

    >>> from symflow.shift import validate_graph
    >>> g2 = validate_graph({"vertices": "ab", "edges": ["aa", "ab", "ba", "bb"]})
    >>> res = recode_constant(g2, RoofFunction(g2, 1, {"a": 1, "b": 2}))
    >>> len(res.graph.vertices), res.c
    (3, Fraction(1, 1))
    """
    _require_transitive(graph)
    lattice = cycle_lattice(graph, r)
    c = lattice.c
    tf = solve_transfer(graph, r, c)
    form = tf.form
    W = form.graph
    corrected = tf.corrected()
    stages = [Stage("blocks", W, None, {v: v for v in W.vertices})]
    stages.append(Stage("transfer", W, None, dict(tf.U)))

    idx = W.index
    succ = W.succ_idx
    paired = any(len({corrected[(i, j)] for j in succ[i]}) > 1 for i in range(len(W.vertices)))
    if paired:
        # r* depends on the edge: move it onto the vertices of the edge graph
        E = higher_block(W, 2).graph
        pair_roof = {(u, v): corrected[(idx[u], idx[v])] for (u, v) in E.vertices}
    else:
        E = W
        pair_roof = {u: corrected[(idx[u], succ[idx[u]][0])] for u in W.vertices}
    stages.append(Stage("pairs", E, pair_roof, {e: e for e in E.vertices}))

    C, contracted_roof = _contract(E, pair_roof)
    stages.append(Stage("contract", C, contracted_roof, {w: w for w in C.vertices}))

    split_vertices = []
    split_edges = set()
    for v in C.vertices:
        n = int(contracted_roof[v] / c)
        split_vertices.extend((v, i) for i in range(n))
        split_edges.update(((v, i), (v, i + 1)) for i in range(n - 1))
    for u, v in C.edges:
        split_edges.add(((u, int(contracted_roof[u] / c) - 1), (v, 0)))
    S = Graph(tuple(split_vertices), frozenset(split_edges))

    names = {}
    for v, i in split_vertices:
        name = ".".join(label_str(e) for e in v)
        names[(v, i)] = name if contracted_roof[v] == c else f"{name}:{i}"
    if len(set(names.values())) != len(names):
        names = {v: f"v{n}:{v[1]}" for n, v in enumerate(split_vertices)}
    final = Graph(
        tuple(names[v] for v in split_vertices),
        frozenset((names[u], names[v]) for u, v in split_edges),
    )
    stages.append(Stage("split", S, {v: contracted_roof[v] for v in C.vertices}, {names[v]: v for v in split_vertices}))
    if is_transitive(final) != is_transitive(graph):
        raise ConsistencyFailure("recoding changed transitivity")
    return RecodingResult(graph, r, final, c, tf, tuple(stages), names, paired)


def verify_spectrum(graph: Graph, r: RoofFunction, result: RecodingResult, T) -> bool:
    """Exact equality of the simple closed orbit length spectra up to ``T``."""
    src = length_spectrum(graph, r, T)
    dst = length_spectrum(result.graph, result.roof, T)
    return src.items == dst.items


def verify_cycle_map(result: RecodingResult, T) -> bool:
    """Every primitive source cycle of length ``<= T`` maps to a primitive
    cycle of the target with the same flow length, injectively."""
    r = result.source_roof
    seen = set()
    for orbit in closed_orbits(result.source, r, T):
        img = result.map_cycle(orbit.cycle.word)
        if not result.graph.is_cycle(img) or primitive_root(img) != img:
            return False
        if len(img) * result.c != orbit.length:
            return False
        key = min(img[i:] + img[:i] for i in range(len(img)))
        if key in seen:
            return False
        seen.add(key)
    return True
