"""Problem files, path files and per-node record output.

Matrices are dense CSV (one row per line) or JSON (a list of rows, or an
object with ``K``, optional ``y`` and ``w``). Vectors are CSV with the
values on one line or one per line. Rational values are written ``p/q``
(or ``p``); under the rational backend anything else is a parse error.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import numpy as np

from .field import FLOAT, RATIONAL, Field, ParseError, format_scalar
from .problem import Problem

__all__ = [
    "RECORD_FIELDS",
    "backend_field",
    "read_matrix",
    "read_vector",
    "read_problem",
    "read_path_file",
    "write_path_file",
    "write_matrix",
    "write_vector",
    "node_record",
    "RecordWriter",
]

RECORD_FIELDS = (
    "counter", "time", "x", "misfit", "remainder", "penalty", "support",
    "l1norm", "discrepancy", "support_size", "fixed_point_residual",
)


def backend_field(name: str) -> Field:
    return {"rational": RATIONAL, "float": FLOAT}[name]


def _rows(text: str) -> list[list[str]]:
    rows = []
    for row in csv.reader(io.StringIO(text)):
        cells = [c.strip() for c in row]
        if not cells or cells[0].startswith("#") or all(c == "" for c in cells):
            continue
        rows.append([c for c in cells if c != ""])
    return rows


def _scalar(token, fld: Field):
    if isinstance(token, bool):
        raise ParseError(f"not a number: {token!r}")
    if isinstance(token, float) and fld.exact:
        raise ParseError(f"decimal value {token!r} under the rational backend")
    if isinstance(token, (int, float)):
        return fld.scalar(token)
    return fld.parse(str(token))


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def read_matrix(path, fld: Field) -> np.ndarray:
    if str(path).endswith(".json"):
        data = _load_json(path)
        rows = data["K"] if isinstance(data, dict) else data
    else:
        with open(path) as fh:
            rows = _rows(fh.read())
    if not rows or not all(rows):
        raise ParseError(f"{path}: empty matrix")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ParseError(f"{path}: ragged matrix rows")
    return fld.array([[_scalar(t, fld) for t in r] for r in rows])


def read_vector(path, fld: Field, key: str | None = None) -> np.ndarray:
    if str(path).endswith(".json"):
        data = _load_json(path)
        vals = data[key] if isinstance(data, dict) else data
    else:
        with open(path) as fh:
            vals = [t for r in _rows(fh.read()) for t in r]
    if not vals:
        raise ParseError(f"{path}: empty vector")
    return fld.array([_scalar(t, fld) for t in vals])


def read_problem(matrix, data=None, weights=None, backend: str = "rational") -> Problem:
    """Assemble a :class:`Problem` from files; ``data``/``weights`` may come from a JSON matrix file."""
    fld = backend_field(backend)
    K = read_matrix(matrix, fld)
    container = _load_json(matrix) if str(matrix).endswith(".json") else None
    if data is not None:
        y = read_vector(data, fld, "y")
    elif isinstance(container, dict) and "y" in container:
        y = fld.array([_scalar(t, fld) for t in container["y"]])
    else:
        raise ParseError("no data vector given")
    if weights is not None:
        w = read_vector(weights, fld, "w")
    elif isinstance(container, dict) and "w" in container:
        w = fld.array([_scalar(t, fld) for t in container["w"]])
    else:
        w = None
    return Problem(K, y, w, backend=fld)


def read_path_file(path):
    """Read ``lam, x_1, ..., x_n`` rows.

    Returns ``(lambdas, xs, exact)``; ``exact`` is false when any entry is
    not an exact rational, in which case values are returned as floats.
    """
    with open(path) as fh:
        rows = _rows(fh.read())
    if not rows:
        raise ParseError(f"{path}: no nodes")
    try:
        vals = [[RATIONAL.parse(t) for t in r] for r in rows]
        exact = True
    except ParseError:
        vals = [[FLOAT.parse(t) for t in r] for r in rows]
        exact = False
    lambdas = [r[0] for r in vals]
    xs = [r[1:] for r in vals]
    return lambdas, xs, exact


def write_path_file(path, lambdas, xs):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for lam, x in zip(lambdas, xs):
            writer.writerow([format_scalar(lam)] + [format_scalar(v) for v in x])


def write_matrix(path, K):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in K:
            writer.writerow([format_scalar(v) for v in row])


def write_vector(path, v):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(format_scalar(t) for t in v) + "\n")


def _json_scalar(v):
    if isinstance(v, (Fraction, int, np.integer)):
        return format_scalar(v)
    return float(v)


def node_record(state, fields, problem: Problem, lam=None) -> dict:
    """Select ``fields`` from a path node or iteration state.

    Vectors are lists; rational scalars become ``p/q`` strings and floats
    stay numbers. ``support`` is 1-based. ``lam`` overrides the penalty
    used by ``fixed_point_residual`` (iterative schemes know their target).
    """
    out = {}
    pen = state.penalty if lam is None else lam
    for f in fields:
        if f == "counter":
            out[f] = int(state.counter)
        elif f == "time":
            out[f] = float(state.elapsed)
        elif f in ("x", "misfit", "remainder"):
            vec = state.x if f == "x" else getattr(state, f)
            out[f] = [_json_scalar(v) for v in vec]
        elif f == "penalty":
            out[f] = _json_scalar(state.penalty)
        elif f == "support":
            out[f] = [i + 1 for i in state.support]
        elif f == "l1norm":
            out[f] = _json_scalar(state.l1norm)
        elif f == "discrepancy":
            out[f] = _json_scalar(state.discrepancy)
        elif f == "support_size":
            out[f] = int(state.support_size)
        elif f == "fixed_point_residual":
            out[f] = _fixed_point_residual(state, problem, pen)
        else:
            raise ValueError(f"unknown record field {f!r}; choose from {', '.join(RECORD_FIELDS)}")
    return out


def _fixed_point_residual(state, problem, lam) -> float:
    from .ops import soft_threshold

    x = np.asarray(state.x, dtype=float)
    r = np.asarray(state.remainder, dtype=float)
    thr = np.asarray(problem.w, dtype=float) * float(lam)
    nx = float(np.linalg.norm(x))
    if nx == 0:
        return 0.0
    return float(np.linalg.norm(x - soft_threshold(x + r, thr))) / nx


class RecordWriter:
    """Stream records as CSV (vector cells JSON-encoded) or JSON lines."""

    def __init__(self, stream, fields, fmt: str = "csv"):
        if fmt not in ("csv", "jsonl"):
            raise ValueError(f"unknown format {fmt!r}")
        self.stream, self.fields, self.fmt = stream, list(fields), fmt
        self._csv = None
        if fmt == "csv":
            self._csv = csv.writer(stream, lineterminator="\n")
            self._csv.writerow(self.fields)

    def write(self, record: dict):
        if self.fmt == "jsonl":
            self.stream.write(json.dumps(record) + "\n")
            return
        cells = []
        for f in self.fields:
            v = record[f]
            cells.append(json.dumps(v) if isinstance(v, list) else (v if isinstance(v, str) else repr(v)))
        self._csv.writerow(cells)
