"""Text formats for graphs, initial states and labelings.

Complex edge list: first non-comment line ``n``, then ``i j r phi`` lines.
Directed edge list: first line ``n``, then ``i j w`` lines. ``#`` starts a
comment anywhere on a line. Floats are written with ``repr`` so a save/load
round trip is bit-exact.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, ParseError
from .graph import ComplexGraph, DirectedGraph, build_directed_graph, build_graph


def _records(path, width: int, kinds):
    text = Path(path).read_text()
    n = None
    recs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 1:
                raise ParseError("first line must hold the node count", lineno)
            try:
                n = int(fields[0])
            except ValueError:
                raise ParseError(f"bad node count {fields[0]!r}", lineno) from None
            continue
        if len(fields) != width:
            raise ParseError(f"expected {width} fields, got {len(fields)}", lineno)
        try:
            recs.append(tuple(kind(f) for kind, f in zip(kinds, fields)))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    if n is None:
        raise ParseError("empty edge list")
    return n, recs


def load_edge_list(path, *, allow_disconnected: bool = False) -> ComplexGraph:
    n, recs = _records(path, 4, (int, int, float, float))
    return build_graph(n, recs, allow_disconnected=allow_disconnected)


def save_edge_list(g: ComplexGraph, path) -> None:
    lines = [str(g.n)] + [f"{i} {j} {r!r} {phi!r}" for i, j, r, phi in g.edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_directed_edge_list(path) -> DirectedGraph:
    n, recs = _records(path, 3, (int, int, float))
    return build_directed_graph(n, recs)


def save_directed_edge_list(h: DirectedGraph, path) -> None:
    lines = [str(h.n)] + [f"{i} {j} {w!r}" for i, j, w in h.edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_initial_state(path, n: int) -> np.ndarray:
    """Lines ``i re im``; unlisted nodes are 0."""
    x = np.zeros(n, dtype=complex)
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ParseError("expected 'i re im'", lineno)
        try:
            i, re, im = int(fields[0]), float(fields[1]), float(fields[2])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if not 0 <= i < n:
            raise DimensionMismatch(f"line {lineno}: node {i} out of range for n={n}")
        x[i] = complex(re, im)
    return x


def load_labels(path) -> np.ndarray:
    """A JSON list of labels, or whitespace/newline separated integers."""
    text = Path(path).read_text().strip()
    if text.startswith("[") or text.startswith("{"):
        data = json.loads(text)
        if isinstance(data, dict):
            data = data.get("labels", data.get("level_one"))
        return np.asarray(data)
    try:
        return np.array([int(tok) for tok in text.split()])
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(d: dict) -> np.ndarray:
    return np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
