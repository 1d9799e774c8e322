"""Topological Markov shifts on finite directed graphs.

A :class:`Graph` is a finite directed graph in which every vertex has at
least one incoming and one outgoing edge.  Points of the two-sided path
space are represented exactly by :class:`SeqPoint`, an eventually periodic
bi-infinite word ``...LLL C RRR...``.  Arbitrary (non eventually periodic)
paths are not representable; everything periodic-orbit counting and the
metric computations need is.

Vertex order is fixed at construction and drives every enumeration, so
outputs are reproducible.
"""
from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DanglingVertex,
    DuplicateVertex,
    GraphMismatch,
    InvalidPoint,
    ParseError,
    UnknownEndpoint,
    ValidationError,
)

Label = Hashable
Word = tuple


def label_str(label) -> str:
    """Printable form of a vertex label (tuples from block codes are joined)."""
    if isinstance(label, tuple):
        return "".join(label_str(part) for part in label)
    return str(label)


@dataclass(frozen=True)
class Graph:
    """Finite directed graph with every vertex on some bi-infinite path.

    Parameters
    ----------
    vertices : sequence of hashable labels
        Their order is the canonical order used by every enumeration.
    edges : iterable of ``(u, v)`` pairs
    """

    vertices: tuple
    edges: frozenset

    def __post_init__(self):
        verts = tuple(self.vertices)
        seen = set()
        for v in verts:
            if v in seen:
                raise DuplicateVertex(f"vertex {v!r} listed twice")
            seen.add(v)
        edges = []
        for e in self.edges:
            u, v = tuple(e)
            for end in (u, v):
                if end not in seen:
                    raise UnknownEndpoint(f"edge {u!r}->{v!r} uses unknown vertex {end!r}")
            edges.append((u, v))
        edge_set = frozenset(edges)
        if len(edge_set) != len(edges):
            raise ValidationError("duplicate edge")
        outs = {u for u, _ in edge_set}
        ins = {v for _, v in edge_set}
        for v in verts:
            if v not in outs:
                raise DanglingVertex(v, "outgoing")
            if v not in ins:
                raise DanglingVertex(v, "ingoing")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edge_set)

    def __repr__(self):
        return f"Graph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def succ_idx(self) -> tuple:
        """Successor index lists, each sorted in canonical order."""
        out = [[] for _ in self.vertices]
        for u, v in self.edges:
            out[self.index[u]].append(self.index[v])
        return tuple(tuple(sorted(s)) for s in out)

    @cached_property
    def pred_idx(self) -> tuple:
        inc = [[] for _ in self.vertices]
        for u, v in self.edges:
            inc[self.index[v]].append(self.index[u])
        return tuple(tuple(sorted(s)) for s in inc)

    @cached_property
    def edge_idx(self) -> frozenset:
        return frozenset((self.index[u], self.index[v]) for u, v in self.edges)

    @cached_property
    def sorted_edges(self) -> tuple:
        """Edges in canonical (lexicographic by vertex index) order."""
        return tuple(
            (self.vertices[i], self.vertices[j]) for i, j in sorted(self.edge_idx)
        )

    @cached_property
    def adjacency(self) -> np.ndarray:
        n = len(self.vertices)
        a = np.zeros((n, n), dtype=np.int64)
        for i, j in self.edge_idx:
            a[i, j] = 1
        return a

    def successors(self, v) -> tuple:
        return tuple(self.vertices[j] for j in self.succ_idx[self.index[v]])

    def has_edge(self, u, v) -> bool:
        return (u, v) in self.edges

    def is_path(self, word: Sequence) -> bool:
        if any(v not in self.index for v in word):
            return False
        return all((word[i], word[i + 1]) in self.edges for i in range(len(word) - 1))

    def is_cycle(self, word: Sequence) -> bool:
        """True if ``word`` repeated forever is a path."""
        return len(word) > 0 and self.is_path(tuple(word) + (word[0],))

    def word_key(self, word: Sequence) -> tuple:
        """Sort key giving lexicographic order with respect to vertex order."""
        return tuple(self.index[v] for v in word)

    def contains(self, x: "SeqPoint") -> bool:
        """True if every adjacent pair of ``x`` is an edge."""
        lo = -x.origin - len(x.left)
        hi = len(x.core) + len(x.right) - x.origin + 1
        return self.is_path(x.window(lo, hi))

    def check_point(self, x: "SeqPoint") -> "SeqPoint":
        if not self.contains(x):
            raise InvalidPoint(f"{x} is not a path on this graph")
        return x

    def point(self, text: str) -> "SeqPoint":
        """Parse a ``LEFT|CORE|RIGHT`` literal and check it against the graph."""
        return self.check_point(SeqPoint.parse(text))


def validate_graph(spec) -> Graph:
    """Build a :class:`Graph` from a raw description.

    ``spec`` is a mapping with ``"vertices"`` and ``"edges"`` keys, or a
    ``(vertices, edges)`` pair.

    Examples
    --------
    >>> g = validate_graph({"vertices": ["a", "b"], "edges": [["a", "a"], ["a", "b"], ["b", "a"]]})
    >>> g.adjacency.tolist()
    [[1, 1], [1, 0]]
    """
    if isinstance(spec, Mapping):
        try:
            vertices, edges = spec["vertices"], spec["edges"]
        except KeyError as exc:
            raise ValidationError(f"model is missing {exc.args[0]!r}") from None
    else:
        vertices, edges = spec
    if not vertices:
        raise ValidationError("graph has no vertices")
    pairs = []
    for e in edges:
        e = tuple(e)
        if len(e) != 2:
            raise ValidationError(f"edge {e!r} is not a pair")
        pairs.append(e)
    if len(set(pairs)) != len(pairs):
        raise ValidationError("duplicate edge")
    return Graph(tuple(vertices), frozenset(pairs))


# ---------------------------------------------------------------------------
# words

def primitive_root(word: Sequence) -> tuple:
    """Shortest ``u`` with ``word == u * m``."""
    word = tuple(word)
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


def rotate(word: Sequence, i: int) -> tuple:
    word = tuple(word)
    if not word:
        return word
    i %= len(word)
    return word[i:] + word[:i]


def min_rotation(word: Sequence, key: Callable = None) -> tuple:
    rots = [rotate(word, i) for i in range(len(word))]
    return min(rots, key=key) if key else min(rots)


def _split_tokens(segment: str, tokenized: bool) -> list:
    if tokenized:
        return [t for t in re.split(r"[,\s]+", segment.strip()) if t]
    return list(segment)


def _canonical(left, core, right, origin):
    left = primitive_root(left)
    right = primitive_root(right)
    # pull core symbols that continue the left cycle into it
    i = 0
    while i < len(core) and core[i] == left[i % len(left)]:
        i += 1
    if i:
        left = rotate(left, i)
        core = core[i:]
        origin -= i
    if core:
        j = 0
        while j < len(core) and core[-1 - j] == right[(-1 - j) % len(right)]:
            j += 1
        if j:
            right = rotate(right, -j)
            core = core[: len(core) - j]
        return left, core, right, origin
    # empty core: the left tail may continue into the right one
    bound = len(left) + len(right)
    j = 0
    while j < bound and right[j % len(right)] == left[j % len(left)]:
        j += 1
    if j >= bound:
        # same periodic sequence both ways (Fine-Wilf)
        w = rotate(left, origin)
        return w, (), w, 0
    if j:
        left = rotate(left, j)
        right = rotate(right, j)
        origin -= j
    return left, core, right, origin


@dataclass(frozen=True)
class SeqPoint:
    """Eventually periodic bi-infinite sequence.

    The sequence is ``... left left core right right ...`` where coordinate
    ``n`` sits at position ``origin + n`` and position 0 is the first core
    symbol (or the first symbol of ``right`` when the core is empty).
    Instances are stored in canonical form (primitive cycles, shortest
    core, purely periodic points with ``origin == 0``), so ``==`` is
    equality of sequences.
    """

    left: tuple
    core: tuple
    right: tuple
    origin: int = 0

    def __post_init__(self):
        left, core, right = tuple(self.left), tuple(self.core), tuple(self.right)
        if not left or not right:
            raise ValueError("left and right cycles must be nonempty")
        left, core, right, origin = _canonical(left, core, right, int(self.origin))
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "core", core)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "origin", origin)

    @classmethod
    def periodic(cls, word: Sequence, origin: int = 0) -> "SeqPoint":
        """The point ``word^infinity`` with ``x_0 = word[origin]``."""
        word = tuple(word)
        return cls(word, (), word, origin)

    @classmethod
    def parse(cls, text: str) -> "SeqPoint":
        """Parse ``"LEFT|CORE|RIGHT"`` with a ``.`` before coordinate 0.

        Symbols are single characters unless a segment contains commas or
        spaces, in which case those separate the symbols.
        """
        parts = text.split("|")
        if len(parts) != 3:
            raise ParseError(f"point literal {text!r} needs exactly two '|'")
        left_s, core_s, right_s = parts
        if core_s.count(".") != 1:
            raise ParseError(f"point literal {text!r} needs one '.' in the core")
        tokenized = "," in text or " " in text.strip()
        before, after = core_s.split(".")
        core_before = _split_tokens(before, tokenized)
        core_after = _split_tokens(after, tokenized)
        if not core_after:
            raise ParseError(f"'.' in {text!r} must precede a symbol")
        left = _split_tokens(left_s, tokenized)
        right = _split_tokens(right_s, tokenized)
        if not left or not right:
            raise ParseError(f"point literal {text!r} has an empty cycle")
        return cls(tuple(left), tuple(core_before + core_after), tuple(right), len(core_before))

    # -- coordinates -------------------------------------------------------
    def _at(self, pos: int):
        if pos < 0:
            return self.left[pos % len(self.left)]
        if pos < len(self.core):
            return self.core[pos]
        return self.right[(pos - len(self.core)) % len(self.right)]

    def __getitem__(self, n: int):
        return self._at(self.origin + n)

    def window(self, a: int, b: int) -> tuple:
        """Coordinates ``x_a, ..., x_{b-1}``."""
        return tuple(self._at(self.origin + n) for n in range(a, b))

    def shift(self, k: int = 1) -> "SeqPoint":
        return SeqPoint(self.left, self.core, self.right, self.origin + k)

    @property
    def is_purely_periodic(self) -> bool:
        return not self.core and self.left == self.right and self.origin == 0

    @property
    def period(self):
        """Primitive period, or ``None`` if the point is not periodic."""
        return len(self.left) if self.is_purely_periodic else None

    def symbols(self) -> set:
        return set(self.left) | set(self.core) | set(self.right)

    def __str__(self):
        # widen the core so that it holds coordinate 0
        lo = min(0, self.origin)
        hi = max(len(self.core), self.origin + 1)
        if self.is_purely_periodic:
            hi = len(self.left)
        core = tuple(self._at(p) for p in range(lo, hi))
        left = rotate(self.left, lo)
        right = rotate(self.right, hi - len(self.core))
        dot = self.origin - lo
        syms = self.symbols()
        single = all(isinstance(s, str) and len(s) == 1 and s not in "|., " for s in syms)
        join = "".join if single else ",".join
        c = [label_str(s) for s in core]
        c[dot] = "." + c[dot]
        return f"{join(label_str(s) for s in left)}|{join(c)}|{join(label_str(s) for s in right)}"


@dataclass(frozen=True)
class CycleClass:
    """Rotation class of a primitive cyclic word; ``word`` is the
    lexicographically least rotation in vertex order."""

    word: tuple

    @classmethod
    def from_word(cls, graph: Graph, word: Sequence) -> "CycleClass":
        word = tuple(word)
        if not graph.is_cycle(word):
            raise InvalidPoint(f"{word!r} is not a cycle of the graph")
        if primitive_root(word) != word:
            raise ValueError(f"{word!r} is a proper power")
        return cls(min_rotation(word, key=graph.word_key))

    @property
    def length(self) -> int:
        return len(self.word)

    def point(self) -> SeqPoint:
        return SeqPoint.periodic(self.word)


# ---------------------------------------------------------------------------
# operations

def shift(x: SeqPoint, k: int = 1) -> SeqPoint:
    """Left shift applied ``k`` times: ``shift(x, k)[n] == x[n + k]``."""
    return x.shift(k)


def _disagreement_index(x: SeqPoint, y: SeqPoint):
    if x == y:
        return None
    reach = max(
        len(x.core) - x.origin, len(y.core) - y.origin, x.origin, y.origin, 0
    )
    bound = (
        reach
        + math.lcm(len(x.left), len(y.left))
        + math.lcm(len(x.right), len(y.right))
        + 1
    )
    for m in range(bound + 1):
        if x[m] != y[m] or x[-m] != y[-m]:
            return m
    raise AssertionError("unequal points agree on the decisive window")


def base_distance(x: SeqPoint, y: SeqPoint, graph: Graph = None) -> float:
    """``exp(-min{|n| : x_n != y_n})``, or 0 when ``x == y``.

    When ``graph`` is given both points must be paths on it.
    """
    if graph is not None and not (graph.contains(x) and graph.contains(y)):
        raise GraphMismatch("points are not both paths on the given graph")
    m = _disagreement_index(x, y)
    return 0.0 if m is None else math.exp(-m)


def base_distance_exponent(x: SeqPoint, y: SeqPoint):
    """The integer ``m`` with ``d(x, y) = e^-m``; ``None`` if equal."""
    return _disagreement_index(x, y)


def is_regular(x: SeqPoint) -> bool:
    """Regular-part membership: some symbol recurs infinitely often in each tail.

    Eventually periodic tails always recur, so this is ``True`` for every
    representable point.
    """
    return bool(x.left) and bool(x.right)


def _closed_walks(graph: Graph, n: int) -> Iterable[tuple]:
    succ = graph.succ_idx
    edges = graph.edge_idx
    for start in range(len(graph.vertices)):
        stack = [(start,)]
        while stack:
            path = stack.pop()
            if len(path) == n:
                if (path[-1], start) in edges:
                    yield path
                continue
            for j in reversed(succ[path[-1]]):
                stack.append(path + (j,))


def periodic_points(graph: Graph, n: int) -> list:
    """All fixed points of the n-th power of the shift, in lexicographic order.

    Examples
    --------
    >>> g = validate_graph({"vertices": "ab", "edges": ["aa", "ab", "ba"]})
    >>> [str(p) for p in periodic_points(g, 3)]
    ['a|.a|a', 'aab|.aab|aab', 'aba|.aba|aba', 'baa|.baa|baa']
    """
    if n < 1:
        raise ValueError("n must be positive")
    verts = graph.vertices
    return [
        SeqPoint.periodic(tuple(verts[i] for i in w)) for w in _closed_walks(graph, n)
    ]


def iter_lyndon_cycles(
    graph: Graph,
    n_max: int,
    visit: Callable,
    step_weight: Callable = None,
    bound=None,
) -> None:
    """Call ``visit(word_idx)`` for every Lyndon word of length <= n_max
    that is a cycle of the graph (words are tuples of vertex indices).

    Prenecklaces are generated with the Fredricksen-Kessler-Maiorana
    recursion; prefixes that are not paths are pruned.  If ``step_weight``
    is given, ``step_weight(prefix)`` must return a nonnegative increment
    for the newly completed part of the prefix, and prefixes whose running
    total exceeds ``bound`` are pruned.
    """
    k = len(graph.vertices)
    edges = graph.edge_idx
    succ = graph.succ_idx
    a = [0] * (n_max + 1)
    partial = [0] * (n_max + 1)

    def gen(t, p):
        if t > n_max:
            return
        start = a[t - p]
        choices = range(start, k) if t == 1 else [j for j in succ[a[t - 1]] if j >= start]
        for j in choices:
            a[t] = j
            q = p if (j == start and t > 1) else t
            if step_weight is not None:
                partial[t] = partial[t - 1] + step_weight(a, t)
                if partial[t] > bound:
                    continue
            if q == t and (a[t], a[1]) in edges:
                visit(tuple(a[1 : t + 1]))
            gen(t + 1, q)

    gen(1, 1)


def primitive_cycles(graph: Graph, n_max: int) -> list:
    """One :class:`CycleClass` per rotation class of primitive cycles of
    length <= n_max, ordered by length then lexicographically."""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    found = []
    iter_lyndon_cycles(graph, n_max, found.append)
    found.sort(key=lambda w: (len(w), w))
    verts = graph.vertices
    return [CycleClass(tuple(verts[i] for i in w)) for w in found]


def _reachable(adj: Sequence, start: int) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def is_transitive(graph: Graph) -> bool:
    """True iff the graph is strongly connected."""
    n = len(graph.vertices)
    return len(_reachable(graph.succ_idx, 0)) == n and len(_reachable(graph.pred_idx, 0)) == n


# ---------------------------------------------------------------------------
# higher block recoding

def sliding_code(x: SeqPoint, k: int, f: Callable) -> SeqPoint:
    """Apply the k-window map ``y_n = f((x_n, ..., x_{n+k-1}))``."""
    lo = -(k - 1)
    L, C, R = len(x.left), len(x.core), len(x.right)

    def win(p):
        return f(tuple(x._at(p + i) for i in range(k)))

    left = tuple(win(p) for p in range(lo - L, lo))
    core = tuple(win(p) for p in range(lo, C))
    right = tuple(win(p) for p in range(C, C + R))
    return SeqPoint(left, core, right, x.origin - lo)


@dataclass(frozen=True)
class HigherBlock:
    """The k-block presentation of a graph together with the conjugacy.

    Vertices of ``graph`` are the admissible words ``(x_0, ..., x_{k-1})``
    (tuples of base labels) and edges are the admissible (k+1)-words.  For
    ``k == 1`` the base graph itself is used.
    """

    base: Graph
    k: int
    graph: Graph = field(compare=False)

    def encode(self, x: SeqPoint) -> SeqPoint:
        if self.k == 1:
            return x
        return sliding_code(x, self.k, lambda w: w)

    def decode(self, y: SeqPoint) -> SeqPoint:
        if self.k == 1:
            return y
        return sliding_code(y, 1, lambda w: w[0][0])

    def __iter__(self):
        return iter((self.graph, self.encode, self.decode))


def admissible_words(graph: Graph, length: int) -> list:
    """All paths with ``length`` vertices, lexicographic in vertex order."""
    succ = graph.succ_idx
    words = [(i,) for i in range(len(graph.vertices))]
    for _ in range(length - 1):
        words = [w + (j,) for w in words for j in succ[w[-1]]]
    verts = graph.vertices
    return [tuple(verts[i] for i in w) for w in words]


def higher_block(graph: Graph, k: int) -> HigherBlock:
    """k-block recoding using forward windows ``(x_0, ..., x_{k-1})``.

    Examples
    --------
    >>> g = validate_graph({"vertices": "ab", "edges": ["aa", "ab", "ba"]})
    >>> hb = higher_block(g, 2)
    >>> ["".join(v) for v in hb.graph.vertices]
    ['aa', 'ab', 'ba']
    """
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return HigherBlock(graph, 1, graph)
    blocks = admissible_words(graph, k)
    edges = [(w[:-1], w[1:]) for w in admissible_words(graph, k + 1)]
    return HigherBlock(graph, k, Graph(tuple(blocks), frozenset(edges)))


def trace_power(graph: Graph, n: int) -> int:
    """Exact trace of A^n (number of closed walks of length n)."""
    a = np.array(graph.adjacency, dtype=object)
    p = np.identity(len(graph.vertices), dtype=object)
    for _ in range(n):
        p = p.dot(a)
    return int(sum(p[i, i] for i in range(len(graph.vertices))))


@dataclass(frozen=True)
class Cylinder:
    """The set ``{x : x_offset ... x_{offset+len(word)-1} == word}``."""

    word: tuple
    offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(self.word))
        if not self.word:
            raise ValueError("cylinder word must be nonempty")

    def __len__(self):
        return len(self.word)

    def contains(self, x: SeqPoint) -> bool:
        return x.window(self.offset, self.offset + len(self.word)) == self.word
