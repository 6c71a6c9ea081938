"""Flat-file formats: brace documents, coordinate matrix export, reports.

Brace documents are canonical JSON (sorted keys, two-space indent,
trailing newline) with row-major flat operation tables; parsing always
revalidates, so a file either yields a checked brace or a precise error.
Matrices use the text coordinate format::

    rows cols nnz
    row col value      (one line per nonzero, ascending row-major)
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .braces import SkewBrace, make_skew_brace
from .groups import validate_group
from .tensor import PermMatrix, SparseIntMatrix

BRACE_FORMAT = "zbrace-brace/1"


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _require(doc: dict, key: str, kind, path: str) -> Any:
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "missing field")
    val = doc[key]
    if kind is int and isinstance(val, bool):
        raise SchemaError(f"{path}.{key}", "expected an integer")
    if not isinstance(val, kind):
        raise SchemaError(f"{path}.{key}", f"expected {getattr(kind, '__name__', kind)}")
    return val


def _table_from_flat(flat: list, order: int, path: str) -> np.ndarray:
    if len(flat) != order * order:
        raise SchemaError(path, f"expected {order * order} entries, got {len(flat)}")
    for i, v in enumerate(flat):
        if not isinstance(v, int) or isinstance(v, bool):
            raise SchemaError(f"{path}[{i}]", "entries must be integers")
    return np.asarray(flat, dtype=np.int64).reshape(order, order)


def brace_to_dict(b: SkewBrace) -> dict:
    return {
        "format": BRACE_FORMAT,
        "name": b.name,
        "order": b.order,
        "labels": list(b.labels),
        "add": [int(v) for v in b.add.table.ravel()],
        "mul": [int(v) for v in b.mul.table.ravel()],
    }


def brace_from_dict(doc: Any) -> SkewBrace:
    if not isinstance(doc, dict):
        raise SchemaError("$", "document must be an object")
    fmt = _require(doc, "format", str, "$")
    if fmt != BRACE_FORMAT:
        raise SchemaError("$.format", f"unsupported format {fmt!r}")
    name = _require(doc, "name", str, "$")
    order = _require(doc, "order", int, "$")
    if order < 1:
        raise SchemaError("$.order", "order must be positive")
    labels = _require(doc, "labels", list, "$")
    if len(labels) != order:
        raise SchemaError("$.labels", f"expected {order} labels, got {len(labels)}")
    add = _table_from_flat(_require(doc, "add", list, "$"), order, "$.add")
    mul = _table_from_flat(_require(doc, "mul", list, "$"), order, "$.mul")
    add_group = validate_group(add, labels=[str(x) for x in labels])
    mul_group = validate_group(mul, labels=[str(x) for x in labels])
    return make_skew_brace(add_group, mul_group, name=name)


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_brace(b: SkewBrace, path: str | Path) -> None:
    Path(path).write_text(canonical_json(brace_to_dict(b)), encoding="utf-8")


def parse_brace(path: str | Path) -> SkewBrace:
    raw = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"not valid JSON: {exc}") from exc
    return brace_from_dict(doc)


def matrix_coo_text(m: PermMatrix | SparseIntMatrix) -> str:
    """Coordinate text form; permutation matrices export all-ones values."""
    if isinstance(m, PermMatrix):
        lines = [f"{m.size} {m.size} {m.size}"]
        lines.extend(f"{i} {j} {v}" for i, j, v in m.coo_entries())
    else:
        lines = [f"{m.rows} {m.cols} {m.nnz}"]
        lines.extend(f"{r} {c} {v}" for r, c, v in m.entries)
    return "\n".join(lines) + "\n"


def write_matrix(m: PermMatrix | SparseIntMatrix, path: str | Path) -> None:
    Path(path).write_text(matrix_coo_text(m), encoding="utf-8")
