"""Deterministic byte serialisation.

JSON: sorted keys, two-space indent, floats with 17 significant digits.
CSV: fixed column order, LF line endings, '.' decimal separator, floats
with 17 significant digits.  Negative zero is written as ``0``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, List, Sequence, Tuple

import numpy as np


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite float {x!r}")
    return format(x + 0.0, ".17g")


def _scalar(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    return value


def _json(value: Any, indent: int, level: int, out: List[str]) -> None:
    value = _scalar(value)
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if hasattr(value, "to_dict"):
        value = value.to_dict()
    if value is None or isinstance(value, (bool, str)):
        out.append(json.dumps(value))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(format_float(value))
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        items = sorted((str(k), v) for k, v in value.items())
        for i, (k, v) in enumerate(items):
            out.append(f"{pad}{json.dumps(k)}: ")
            _json(v, indent, level + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        if len(value) == 0:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(value):
            out.append(pad)
            _json(v, indent, level + 1, out)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(value).__name__}")


def to_json_bytes(value: Any, indent: int = 2) -> bytes:
    out: List[str] = []
    _json(value, indent, 0, out)
    out.append("\n")
    return "".join(out).encode("utf-8")


def _cell(v: Any) -> str:
    v = _scalar(v)
    if v is None:
        return ""
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def to_csv_bytes(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} cells, expected {len(columns)}")
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue().encode("utf-8")


def emit(value: Any, fmt: str) -> bytes:
    """Serialise a report, trace table or metrics dict.

    Tables are ``(columns, rows)`` pairs; as JSON they become
    ``{"columns": [...], "rows": [[...], ...]}``.
    """
    if fmt == "json":
        if isinstance(value, tuple) and len(value) == 2 and isinstance(value[0], list):
            value = {"columns": value[0], "rows": value[1]}
        return to_json_bytes(value)
    if fmt == "csv":
        if hasattr(value, "to_rows"):
            value = value.to_rows()
        columns, rows = value
        return to_csv_bytes(columns, rows)
    raise ValueError(f"unknown format {fmt!r}")


Table = Tuple[List[str], List[list]]
