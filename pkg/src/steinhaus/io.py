"""JSON/CSV serialization with atomic writes.

Exact values travel as ``"p/q"`` strings; in float mode they are plain JSON
numbers.  Every document carries ``schema_version``.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InvalidInput
from .scalar import exact
from .sets import Ball, ConvexPolytope, GridSandwich, GridSet, IntervalUnion, PointSet

SCHEMA_VERSION = 1
TRACE_COLUMNS = ("n", "vol_inner", "vol_outer", "dH", "dH_err", "r_ball", "diam")


def encode_scalar(x, mode: str = "exact"):
    if x is None:
        return None
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x)) if mode == "exact" else int(x)
    if isinstance(x, Fraction):
        return str(x) if mode == "exact" else float(x)
    return float(x)


def decode_scalar(x) -> Fraction:
    if isinstance(x, bool) or x is None:
        raise InvalidInput(f"expected a number, got {x!r}")
    try:
        return exact(x)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InvalidInput(f"bad scalar {x!r}") from exc


# --------------------------------------------------------------------------
# sets


def set_to_json(K, mode: str = "exact") -> dict:
    enc = lambda v: encode_scalar(v, mode)  # noqa: E731
    doc = {"schema_version": SCHEMA_VERSION}
    if isinstance(K, IntervalUnion):
        doc.update(kind="intervals", dimension=1,
                   intervals=[[enc(a), enc(b)] for a, b in K.intervals])
    elif isinstance(K, PointSet):
        doc.update(kind="points", dimension=K.dimension,
                   points=[[enc(Fraction(int(c), K.denom)) for c in row] for row in K.numer])
    elif isinstance(K, ConvexPolytope):
        doc.update(kind="polytope", dimension=K.dimension,
                   vertices=[[enc(c) for c in v] for v in K.vertices])
    elif isinstance(K, GridSet):
        doc.update(kind="grid", dimension=K.dimension, h=enc(K.h),
                   cells=K.cell_indices().tolist())
    elif isinstance(K, GridSandwich):
        doc.update(kind="grid_sandwich", dimension=K.dimension,
                   inner=set_to_json(K.inner, mode) if K.inner is not None else None,
                   outer=set_to_json(K.outer, mode))
    elif isinstance(K, Ball):
        doc.update(kind="ball", dimension=K.dimension,
                   center=[enc(c) for c in K.center], radius=enc(K.radius))
    else:
        raise InvalidInput(f"cannot serialize {type(K).__name__}")
    return doc


def _dimension(doc) -> int:
    d = doc.get("dimension")
    if d not in (1, 2, 3):
        raise InvalidInput("dimension must be 1, 2 or 3")
    return d


def _rows(doc, key, d):
    rows = doc.get(key)
    if not isinstance(rows, list) or not rows:
        raise InvalidInput(f"'{key}' must be a non-empty list")
    out = []
    for r in rows:
        if not isinstance(r, list) or len(r) != d:
            raise InvalidInput(f"every entry of '{key}' needs {d} coordinates")
        out.append(tuple(decode_scalar(c) for c in r))
    return out


def set_from_json(doc):
    if not isinstance(doc, dict):
        raise InvalidInput("set document must be a JSON object")
    kind = doc.get("kind")
    if kind == "intervals":
        d = doc.get("dimension", 1)
        if d != 1:
            raise InvalidInput("interval unions are one-dimensional")
        return IntervalUnion.from_pairs(_rows(doc, "intervals", 2))
    if kind == "points":
        return PointSet.from_points(_rows(doc, "points", _dimension(doc)))
    if kind == "polytope":
        return ConvexPolytope.from_vertices(_rows(doc, "vertices", _dimension(doc)))
    if kind == "grid":
        d = _dimension(doc)
        h = decode_scalar(doc.get("h"))
        if h <= 0:
            raise InvalidInput("h must be positive")
        cells = doc.get("cells")
        if not isinstance(cells, list) or not cells:
            raise InvalidInput("grid needs a non-empty 'cells' list")
        if not all(isinstance(c, list) and all(isinstance(x, int) and not isinstance(x, bool)
                                               for x in c) for c in cells):
            raise InvalidInput("cells must be integer tuples")
        arr = np.array(cells, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != d:
            raise InvalidInput(f"cells must be {d}-tuples")
        return GridSet.from_cells(arr, h)
    if kind == "grid_sandwich":
        inner = set_from_json(doc["inner"]) if doc.get("inner") is not None else None
        return GridSandwich(inner, set_from_json(doc.get("outer")))
    if kind == "ball":
        d = _dimension(doc)
        c = doc.get("center")
        if not isinstance(c, list) or len(c) != d:
            raise InvalidInput("ball center has the wrong dimension")
        r = decode_scalar(doc.get("radius"))
        if r <= 0:
            raise InvalidInput("ball radius must be positive")
        return Ball(tuple(decode_scalar(x) for x in c), r)
    raise InvalidInput(f"unknown set kind {kind!r}")


def load_set(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: malformed JSON ({exc.msg})") from exc
    except OSError as exc:
        raise InvalidInput(f"{path}: {exc.strerror}") from exc
    return set_from_json(doc)


# --------------------------------------------------------------------------
# atomic output


def atomic_write_text(path, text: str) -> Path:
    """Write to a temp file in the target directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def write_json(path, doc) -> Path:
    return atomic_write_text(path, dumps(doc))


def write_csv(path, header, rows) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return atomic_write_text(path, buf.getvalue())


# --------------------------------------------------------------------------
# traces


def trace_rows(trace, mode: str = "exact"):
    for r in trace:
        yield [r.n, *(encode_scalar(getattr(r, c), mode) for c in TRACE_COLUMNS[1:])]


def trace_to_json(trace, mode: str = "exact", snapshots: bool = False) -> dict:
    recs = []
    for r in trace:
        row = {c: encode_scalar(getattr(r, c), mode) for c in TRACE_COLUMNS}
        row["n"] = r.n
        if snapshots and r.snapshot is not None:
            row["snapshot"] = set_to_json(r.snapshot, mode)
        recs.append(row)
    return {
        "schema_version": SCHEMA_VERSION,
        "columns": list(TRACE_COLUMNS),
        "dimension": trace.dimension,
        "D": encode_scalar(trace.D, mode),
        "hull": set_to_json(trace.hull, mode),
        "r_declared": encode_scalar(trace.r_declared, mode),
        "records": recs,
    }


def write_trace(out_dir, trace, mode: str = "exact", snapshots: bool = False):
    out_dir = Path(out_dir)
    csv_path = write_csv(out_dir / "trace.csv", TRACE_COLUMNS, list(trace_rows(trace, mode)))
    json_path = write_json(out_dir / "trace.json", trace_to_json(trace, mode, snapshots))
    return csv_path, json_path


def read_trace_csv(path):
    """Rows of the trace CSV with exact values parsed back."""
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        parsed = {}
        for k, v in row.items():
            if v in ("", "None"):
                parsed[k] = None
            elif "/" in v or v.lstrip("-").isdigit():
                parsed[k] = Fraction(v)
            else:
                parsed[k] = float(v)
        out.append(parsed)
    return out
