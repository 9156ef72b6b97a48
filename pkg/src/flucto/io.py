"""Stable CSV/JSON writers with a provenance header.

CSV layout: ``# key=value`` lines, one plain header row, then rows with every
float printed to 17 significant digits, so identical runs give identical bytes.
Header floats use the shortest representation that round-trips.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path

import numpy as np

__all__ = ["format_float", "csv_text", "write_csv", "json_text", "write_json", "split_complex"]


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def split_complex(columns: dict) -> dict:
    """Replace complex columns by ``<name>_re`` / ``<name>_im`` pairs."""
    out = {}
    for name, values in columns.items():
        values = np.asarray(values)
        if np.iscomplexobj(values):
            out[f"{name}_re"] = values.real
            out[f"{name}_im"] = values.imag
        else:
            out[name] = values
    return out


def _header_value(value) -> str:
    if isinstance(value, float):
        return repr(value)  # shortest round-trip form
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_header_value(v) for v in value) + "]"
    return str(value)


def csv_text(columns: dict, header: dict | None = None) -> str:
    columns = split_complex(columns)
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    lengths = {a.shape[0] for a in arrays}
    if len(lengths) != 1:
        raise ValueError(f"columns differ in length: {sorted(lengths)}")
    buf = _io.StringIO()
    for key, value in (header or {}).items():
        buf.write(f"# {key}={_header_value(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    formatters = [str if a.dtype.kind in "UOS" else format_float for a in arrays]
    for row in zip(*arrays):
        writer.writerow([f(v) for f, v in zip(formatters, row)])
    return buf.getvalue()


def write_csv(path, columns: dict, header: dict | None = None) -> Path:
    path = Path(path)
    path.write_text(csv_text(columns, header))
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else repr(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def json_text(data) -> str:
    return json.dumps(_jsonable(data), sort_keys=True, indent=2) + "\n"


def write_json(path, data) -> Path:
    path = Path(path)
    path.write_text(json_text(data))
    return path
