"""Shared models, random generators and independent oracles for the tests."""
from __future__ import annotations

import math
import random
from contextlib import contextmanager
from fractions import Fraction

import networkx as nx

from symflow.flow import FlowPoint
from symflow.roof import RoofFunction
from symflow.shift import SeqPoint, primitive_cycles, validate_graph

G2 = validate_graph({"vertices": "ab", "edges": ["aa", "ab", "ba", "bb"]})
GM = validate_graph({"vertices": "ab", "edges": ["aa", "ab", "ba"]})
TWO = validate_graph({"vertices": "ab", "edges": ["ab", "ba"]})
LOOP = validate_graph({"vertices": "a", "edges": ["aa"]})

R1 = RoofFunction.constant(G2)
R12 = RoofFunction(G2, 1, {"a": 1, "b": 2})
RM1 = RoofFunction.constant(GM)
R13 = RoofFunction(TWO, 1, {"a": 1, "b": 3})

LOG2 = math.log(2)
PHI = (1 + math.sqrt(5)) / 2
LOG_PHI = math.log(PHI)

# acceptance lines, filled by tests/test_acceptance.py and printed at the end
RESULTS: list = []


def mobius(n: int) -> int:
    # straightforward factorisation, independent of the library's version
    result, d = 1, 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    return -result if n > 1 else result


def necklaces(n: int, q: int = 2) -> int:
    """Primitive necklaces of length ``n`` over ``q`` letters."""
    return sum(mobius(d) * q ** (n // d) for d in range(1, n + 1) if n % d == 0) // n


def brute_periodic_words(graph, n):
    """All closed walks of length ``n`` as words, by plain recursion."""
    out = []

    def rec(word):
        if len(word) == n:
            if graph.has_edge(word[-1], word[0]):
                out.append(tuple(word))
            return
        for v in graph.successors(word[-1]):
            rec(word + [v])

    for v in graph.vertices:
        rec([v])
    return out


def random_point(graph, rng: random.Random, core_max: int = 5, cycle_max: int = 3) -> SeqPoint:
    """Random eventually periodic point on a transitive graph."""
    cycles = primitive_cycles(graph, cycle_max)
    left = list(rng.choice(cycles).word)
    i = rng.randrange(len(left))
    left = left[i:] + left[:i]
    right_cycle = rng.choice(cycles).word
    core, cur = [], left[-1]
    for _ in range(rng.randrange(core_max + 1)):
        cur = rng.choice(graph.successors(cur))
        core.append(cur)
    g = nx.DiGraph(list(graph.edges))
    s = rng.choice(graph.successors(cur))
    targets = set(right_cycle)
    lengths, paths = nx.single_source_shortest_path_length(g, s), nx.single_source_shortest_path(g, s)
    v = min((t for t in targets if t in lengths), key=lambda t: (lengths[t], graph.index[t]))
    core += paths[v][:-1]
    j = right_cycle.index(v)
    right = right_cycle[j:] + right_cycle[:j]
    origin = rng.randrange(-3, len(core) + 4)
    x = SeqPoint(tuple(left), tuple(core), tuple(right), origin)
    assert graph.contains(x)
    return x


def random_height(r: RoofFunction, x: SeqPoint, rng: random.Random, den: int = 8) -> Fraction:
    top = r(x)
    return Fraction(rng.randrange(int(top * den)), den)


def random_flow_point(r: RoofFunction, rng: random.Random, **kw) -> FlowPoint:
    x = random_point(r.graph, rng, **kw)
    return FlowPoint(x, random_height(r, x, rng))


def random_model(rng: random.Random, n: int = 3, k_choices=(1, 2)):
    """Random transitive graph on ``n`` vertices with a rational roof."""
    from symflow.shift import admissible_words, is_transitive

    labels = "abcdefgh"[:n]
    while True:
        edges = [u + v for u in labels for v in labels if rng.random() < 0.5]
        try:
            g = validate_graph({"vertices": labels, "edges": edges})
        except Exception:
            continue
        if is_transitive(g):
            break
    k = rng.choice(k_choices)
    table = {
        w: Fraction(rng.randint(2, 8), rng.choice((2, 3, 4)))
        for w in admissible_words(g, k)
    }
    return g, RoofFunction(g, k, table)


def record(number: int, ok: bool, detail: str) -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    RESULTS.append(line)
    print(line)
    return line


@contextmanager
def criterion(number: int, title: str):
    """Record one acceptance line; a failing assertion inside marks FAIL.

    The block may append measured values to the yielded list; they are
    shown after the title.
    """
    notes: list = []
    try:
        yield notes
    except BaseException as exc:
        record(number, False, "; ".join([title, *notes, f"{type(exc).__name__}: {exc}"]))
        raise
    record(number, True, "; ".join([title, *notes]))
