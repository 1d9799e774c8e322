"""Finite-range roof functions and their Birkhoff cocycle.

A roof of range ``k`` is a table from admissible k-blocks
``(x_0, ..., x_{k-1})`` to positive rationals.  All sums are exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Mapping, Sequence

from .errors import MissingBlock, NeverReturns, ValidationError
from .shift import (
    Cylinder,
    Graph,
    SeqPoint,
    admissible_words,
    higher_block,
    label_str,
)


def as_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or ``"p/q"``.

    Floats are converted through their shortest repr, so ``0.1`` becomes
    ``1/10`` rather than the binary expansion.

    >>> as_fraction("3/4"), as_fraction(2), as_fraction(0.1)
    (Fraction(3, 4), Fraction(2, 1), Fraction(1, 10))
    """
    if isinstance(value, bool):
        raise ValidationError(f"not a rational value: {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValidationError(f"not a finite value: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"not a rational literal: {value!r}") from None
    raise ValidationError(f"not a rational value: {value!r}")


def format_fraction(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _block_key(graph: Graph, key, k: int) -> tuple:
    """Normalise a table key to a tuple of vertex labels."""
    if isinstance(key, tuple):
        return key
    if isinstance(key, list):
        return tuple(key)
    if k == 1 and key in graph.index:
        return (key,)
    if isinstance(key, str):
        if "," in key:
            return tuple(part.strip() for part in key.split(","))
        return tuple(key)
    raise ValidationError(f"cannot read block key {key!r}")


@dataclass(frozen=True, eq=False)
class BlockFunction:
    """A locally constant function given by a table on admissible k-blocks.

    Parameters
    ----------
    graph : Graph
    k : int
        Range: the value at ``x`` depends on ``x_0 ... x_{k-1}``.
    table : mapping
        Keys are k-tuples of labels (strings of one-character labels and
        comma-separated strings are accepted).
    """

    graph: Graph
    k: int
    table: Mapping = field(repr=False)

    def _convert(self, value):
        return value

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ValidationError("range k must be a positive integer")
        table = {}
        for key, value in dict(self.table).items():
            block = _block_key(self.graph, key, self.k)
            if len(block) != self.k or not self.graph.is_path(block):
                raise ValidationError(
                    f"table key {key!r} is not an admissible {self.k}-block"
                )
            table[block] = self._convert(value)
        for block in admissible_words(self.graph, self.k):
            if block not in table:
                raise MissingBlock(
                    f"no table entry for block {''.join(map(label_str, block))!r}"
                )
        object.__setattr__(self, "table", table)

    def value(self, block: Sequence):
        try:
            return self.table[tuple(block)]
        except KeyError:
            raise MissingBlock(f"no table entry for block {tuple(block)!r}") from None

    def __call__(self, x: SeqPoint):
        return self.value(x.window(0, self.k))

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.graph == other.graph
            and self.k == other.k
            and self.table == other.table
        )

    def __hash__(self):
        return hash((type(self).__name__, self.graph, self.k))

    def extend(self, k: int):
        """The same function presented with a longer range ``k``."""
        if k < self.k:
            raise ValueError("cannot shorten the range")
        table = {w: self.table[w[: self.k]] for w in admissible_words(self.graph, k)}
        return type(self)(self.graph, k, table)

    def edge_form(self, level: int = None) -> "EdgeForm":
        return edge_form(self, level)


@dataclass(frozen=True, eq=False)
class RoofFunction(BlockFunction):
    """Positive rational roof of finite range.

    Hölder data are fixed as ``alpha = 1`` and
    ``H = (sup r - inf r) * e**k``.

    Examples
    --------
    >>> from symflow.shift import validate_graph
    >>> g2 = validate_graph({"vertices": "ab", "edges": ["aa", "ab", "ba", "bb"]})
    >>> r = RoofFunction(g2, 1, {"a": 1, "b": 2})
    >>> r(SeqPoint.parse("a|.b|a")), r.inf, r.sup
    (Fraction(2, 1), Fraction(1, 1), Fraction(2, 1))
    """

    def _convert(self, value):
        q = as_fraction(value)
        if q <= 0:
            raise ValidationError(f"roof values must be positive, got {q}")
        return q

    @classmethod
    def constant(cls, graph: Graph, c=1) -> "RoofFunction":
        return cls(graph, 1, {(v,): c for v in graph.vertices})

    @classmethod
    def from_vertex_values(cls, graph: Graph, values: Mapping) -> "RoofFunction":
        return cls(graph, 1, {(v,): values[v] for v in graph.vertices})

    @cached_property
    def inf(self) -> Fraction:
        return min(self.table.values())

    @cached_property
    def sup(self) -> Fraction:
        return max(self.table.values())

    @property
    def alpha(self) -> float:
        return 1.0

    @cached_property
    def holder_constant(self) -> float:
        return float(self.sup - self.inf) * math.exp(self.k)

    @cached_property
    def denominator(self) -> int:
        """Least common denominator of the table values."""
        return math.lcm(*(q.denominator for q in self.table.values()))

    def scaled(self) -> tuple:
        """``(D, table)`` with integer values ``D * r`` on each block."""
        d = self.denominator
        return d, {w: int(q * d) for w, q in self.table.items()}

    def word_sum(self, word: Sequence, cyclic: bool = True) -> Fraction:
        """Sum of r over the ``len(word)`` shifts of the periodic point
        ``word^inf`` (``cyclic=True``), or over the blocks fully contained in
        a finite word."""
        word = tuple(word)
        n = len(word)
        if cyclic:
            ext = word * (1 + (self.k - 1 + n - 1) // n)
            return sum((self.value(ext[i : i + self.k]) for i in range(n)), Fraction(0))
        return sum(
            (self.value(word[i : i + self.k]) for i in range(n - self.k + 1)), Fraction(0)
        )


@dataclass(frozen=True)
class EdgeForm:
    """A block function rewritten as a weight on the edges of a block graph.

    ``graph`` is the ``level``-block graph of ``base``; the edge ``u -> v``
    stands for the base word ``word(u, v)`` of length ``level + 1`` and has
    weight ``weights[(i, j)]`` (vertex indices of ``graph``).
    """

    base: Graph
    level: int
    graph: Graph
    weights: dict = field(repr=False)

    def word(self, u, v) -> tuple:
        if self.level == 1:
            return (u, v)
        return tuple(u) + (v[-1],)

    def vertex_of(self, x: SeqPoint, n: int = 0):
        """Vertex of ``graph`` visited at time ``n`` by the coding of ``x``."""
        if self.level == 1:
            return x[n]
        return x.window(n, n + self.level)


def edge_form(f: BlockFunction, level: int = None) -> EdgeForm:
    """Rewrite ``f`` on the edges of its ``max(1, k-1)``-block graph."""
    need = max(1, f.k - 1)
    level = need if level is None else level
    if level < need:
        raise ValueError(f"level must be at least {need}")
    g = higher_block(f.graph, level).graph
    idx = g.index
    form = EdgeForm(f.graph, level, g, {})
    for u, v in g.sorted_edges:
        form.weights[(idx[u], idx[v])] = f.value(form.word(u, v)[: f.k])
    return form


# ---------------------------------------------------------------------------
# cocycle

def evaluate(r: RoofFunction, x: SeqPoint) -> Fraction:
    """Table value at the block ``x_0 ... x_{k-1}``."""
    return r(x)


def birkhoff(r: RoofFunction, x: SeqPoint, n: int) -> Fraction:
    """Two-sided Birkhoff sum: ``r_n = sum_{i<n} r o shift^i`` for
    ``n >= 0`` and ``r_n = -r_{|n|} o shift^n`` for ``n < 0``.

    >>> from symflow.shift import validate_graph
    >>> g2 = validate_graph({"vertices": "ab", "edges": ["aa", "ab", "ba", "bb"]})
    >>> r = RoofFunction(g2, 1, {"a": 1, "b": 2})
    >>> x = SeqPoint.periodic("ab")
    >>> birkhoff(r, x, 3), birkhoff(r, x, -2)
    (Fraction(4, 1), Fraction(-3, 1))
    """
    k = r.k
    if n >= 0:
        w = x.window(0, n + k - 1)
        return sum((r.value(w[i : i + k]) for i in range(n)), Fraction(0))
    w = x.window(n, k - 1)
    return -sum((r.value(w[i : i + k]) for i in range(-n)), Fraction(0))


# ---------------------------------------------------------------------------
# Hölder control of Birkhoff sums

def holder_tail_bound(H: float, alpha: float, n0: int) -> float:
    """``2 H e^{-alpha n0} / (1 - e^{-alpha})``."""
    if n0 < 0:
        raise ValueError("n0 must be nonnegative")
    return 2.0 * H * math.exp(-alpha * n0) / (1.0 - math.exp(-alpha))


def holder_block_bound(r: RoofFunction, n0: int) -> float:
    """Analytic bound on ``|r_l(x) - r_l(y)|`` over pairs agreeing on
    coordinates ``-n0 .. n0 + l``, from the roof's Hölder data."""
    return holder_tail_bound(r.holder_constant, r.alpha, n0)


def _continuations(graph: Graph, last, length: int) -> list:
    """All words ``u`` of the given length with ``(last,) + u`` a path."""
    out = [()]
    for _ in range(length):
        out = [
            u + (v,)
            for u in out
            for v in graph.successors(u[-1] if u else last)
        ]
    return out


def exact_variation(r: RoofFunction, n0: int) -> Fraction:
    """Exact ``sup |r_l(x) - r_l(y)|`` over ``l >= 1`` and pairs agreeing on
    coordinates ``-n0 .. n0 + l``.

    Only summands whose block pokes past coordinate ``n0 + l`` can differ,
    and there are ``k - n0 - 2`` free coordinates, so the variation is zero
    when ``k <= n0 + 2``.  Otherwise the seam configurations are enumerated;
    they stop changing once ``l`` exceeds ``k``.
    """
    if n0 < 0:
        raise ValueError("n0 must be nonnegative")
    k = r.k
    free = k - n0 - 2
    if free <= 0:
        return Fraction(0)
    g = r.graph
    best = Fraction(0)
    for ell in range(1, k + 1):
        first = max(0, n0 + ell - k + 2)  # first summand reading a free coordinate
        matched = n0 + ell - first + 1  # matched coordinates first .. n0+ell
        for p in admissible_words(g, matched):
            sums = []
            for u in _continuations(g, p[-1], free):
                w = p + u
                sums.append(
                    sum(r.value(w[i - first : i - first + k]) for i in range(first, ell))
                )
            best = max(best, max(sums) - min(sums))
    return Fraction(best)


def block_n0(r: RoofFunction, eps, exact: bool = True) -> int:
    """Least ``n0`` whose variation bound (exact or analytic) is below ``eps``."""
    eps = as_fraction(eps)
    n0 = 0
    while True:
        if exact:
            if exact_variation(r, n0) < eps:
                return n0
        elif holder_block_bound(r, n0) < eps:
            return n0
        n0 += 1


# ---------------------------------------------------------------------------
# first return to a cylinder

@dataclass(frozen=True)
class ReturnWord:
    """One symbol of the induced alphabet.

    ``word`` is ``x_0 ... x_{n_A - 1}``; ``path`` is the window from the
    cylinder offset through the closing occurrence of the cylinder.
    """

    word: tuple
    path: tuple
    n_A: int
    r_A: Fraction


@dataclass(frozen=True)
class InducedSystem:
    cylinder: Cylinder
    words: tuple
    truncated: bool
    L_max: int

    def __iter__(self):
        return iter(self.words)

    def __len__(self):
        return len(self.words)


def induced_system(graph: Graph, r: RoofFunction, A: Cylinder, L_max: int) -> InducedSystem:
    """First-return words to the cylinder ``A`` with return time at most ``L_max``.

    The cylinder must satisfy ``offset <= 0`` and
    ``offset + len(word) >= k`` so that the induced roof is determined by
    the return path; lengthen the cylinder word otherwise.

    >>> from symflow.shift import validate_graph
    >>> g2 = validate_graph({"vertices": "ab", "edges": ["aa", "ab", "ba", "bb"]})
    >>> ind = induced_system(g2, RoofFunction.constant(g2), Cylinder(("a",)), 3)
    >>> [("".join(w.word), w.n_A, w.r_A) for w in ind], ind.truncated
    ([('a', 1, Fraction(1, 1)), ('ab', 2, Fraction(2, 1)), ('abb', 3, Fraction(3, 1))], True)
    """
    if L_max < 1:
        raise ValueError("L_max must be positive")
    if r.graph != graph:
        raise ValidationError("roof is defined on a different graph")
    w, o, m = A.word, A.offset, len(A.word)
    if not graph.is_path(w):
        raise ValidationError(f"cylinder word {w!r} is not admissible")
    if o > 0 or o + m < r.k:
        raise ValueError(
            "cylinder must cover coordinates 0 .. k-1 and start at or before 0"
        )
    found = []
    truncated = False
    # path[i] is coordinate o + i
    stack = [(w, 0)]
    while stack:
        path, j = stack.pop()
        if j == L_max:
            truncated = True
            continue
        for v in reversed(graph.successors(path[-1])):
            nxt = path + (v,)
            if nxt[j + 1 : j + 1 + m] == w:
                n = j + 1
                seq = nxt[-o : -o + n]
                r_A = r.word_sum(nxt[-o : -o + n + r.k - 1], cyclic=False)
                found.append(ReturnWord(seq, nxt, n, r_A))
            else:
                stack.append((nxt, j + 1))
    if not found:
        raise NeverReturns(f"no return to the cylinder within {L_max} steps")
    key = graph.word_key
    found.sort(key=lambda rw: (rw.n_A, key(rw.word)))
    return InducedSystem(A, tuple(found), truncated, L_max)
