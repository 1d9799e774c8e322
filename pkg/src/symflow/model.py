"""JSON model files: a graph plus a roof table.

::

    {"vertices": ["a", "b"],
     "edges": [["a", "a"], ["a", "b"], ["b", "a"]],
     "roof": {"range": 1, "table": {"a": "1", "b": "3/2"}},
     "name": "golden mean", "notes": "..."}

A missing ``roof`` means ``r = 1``.  Table keys are blocks written either
as concatenated one-character labels (``"ab"``) or comma separated
(``"x1,x2"``).  Values are integers or ``"p/q"`` strings.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import MissingBlock, ParseError, ValidationError
from .roof import RoofFunction, format_fraction
from .shift import Graph, label_str, validate_graph


@dataclass(frozen=True)
class Model:
    graph: Graph
    roof: RoofFunction
    name: str = ""
    notes: str = ""


def parse_model(text: str) -> Model:
    """Parse model JSON; syntax errors raise :class:`ParseError` with the
    line and column, structural problems raise :class:`ValidationError`."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return model_from_dict(data)


def _label(v) -> str:
    # integer labels are read as strings so table keys can refer to them
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise ValidationError(f"vertex label {v!r} must be a string or integer")
    return str(v)


def _block_count(graph: Graph, k: int) -> int:
    """Number of admissible ``k``-blocks, without listing them."""
    A = graph.adjacency.astype(object)
    row = np.ones(len(graph.vertices), dtype=object)
    for _ in range(k - 1):
        row = row.dot(A)
        if sum(row) > 10**7:
            break
    return int(sum(row))


def model_from_dict(data) -> Model:
    if not isinstance(data, dict):
        raise ValidationError("model must be a JSON object")
    for key in ("vertices", "edges"):
        if not isinstance(data.get(key), list):
            raise ValidationError(f"model field {key!r} must be a list")
    vertices = [_label(v) for v in data["vertices"]]
    edges = []
    for e in data["edges"]:
        if isinstance(e, str) and len(e) == 2:
            edges.append((e[0], e[1]))
        elif isinstance(e, list) and len(e) == 2:
            edges.append((_label(e[0]), _label(e[1])))
        else:
            raise ValidationError(f"edge {e!r} must be a pair")
    graph = validate_graph({"vertices": vertices, "edges": edges})
    roof = data.get("roof")
    if roof is None:
        r = RoofFunction.constant(graph)
    else:
        if not isinstance(roof, dict) or not isinstance(roof.get("table"), dict):
            raise ValidationError("roof must be an object with a 'table'")
        k = roof.get("range", 1)
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise ValidationError("roof range must be a positive integer")
        # a key naming k labels has at least k characters
        longest = max((len(key) for key in roof["table"]), default=0)
        if k > longest or _block_count(graph, k) > len(roof["table"]):
            raise MissingBlock(f"roof table does not cover all admissible {k}-blocks")
        r = RoofFunction(graph, k, roof["table"])
    name, notes = data.get("name", ""), data.get("notes", "")
    if not isinstance(name, str) or not isinstance(notes, str):
        raise ValidationError("name and notes must be strings")
    return Model(graph, r, name, notes)


def load_model(path) -> Model:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise ParseError(f"{path} is not UTF-8 text") from None
    return parse_model(text)


def _block_text(block: tuple) -> str:
    labels = [label_str(v) for v in block]
    if all(len(s) == 1 and s != "," for s in labels):
        return "".join(labels)
    return ",".join(labels)


def model_to_dict(graph: Graph, roof: RoofFunction, name: str = "", notes: str = "") -> dict:
    """Inverse of :func:`model_from_dict` (labels are written as strings)."""
    out = {
        "vertices": [label_str(v) for v in graph.vertices],
        "edges": [[label_str(u), label_str(v)] for u, v in graph.sorted_edges],
        "roof": {
            "range": roof.k,
            "table": {
                _block_text(b): format_fraction(roof.table[b])
                for b in sorted(roof.table, key=graph.word_key)
            },
        },
    }
    if name:
        out["name"] = name
    if notes:
        out["notes"] = notes
    return out
