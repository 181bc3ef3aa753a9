"""Deterministic text rendering for reports and tabular exports.

All floating-point numbers are rendered with 17 significant digits, which
round-trips any IEEE-754 double exactly. JSON is rendered by a small local
writer instead of ``json.dumps`` so the float format is under our control
and output bytes are stable across Python versions.
"""

from __future__ import annotations

import math
from typing import Any


def fmt_float(x: float) -> str:
    """Render a float with 17 significant digits (exact double round-trip)."""
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(float(x), ".17g")


def _escape(s: str) -> str:
    out = []
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return "".join(out)


def render_json(obj: Any, indent: int = 0) -> str:
    """Render dicts/lists/scalars as JSON with deterministic float formatting.

    Dict insertion order is preserved. Floats use :func:`fmt_float`; bools
    and None map to their JSON literals; ints are rendered as integers.
    """
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return f'"{_escape(obj)}"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{inner}"{_escape(str(k))}": {render_json(v, indent + 2)}'
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{render_json(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    # numpy scalars and anything float-like
    if hasattr(obj, "item"):
        return render_json(obj.item(), indent)
    raise TypeError(f"cannot render {type(obj).__name__} as JSON")


def dump_json(obj: Any) -> str:
    """Full JSON document (trailing newline included)."""
    return render_json(obj) + "\n"


def csv_cell(value: Any) -> str:
    """Render one CSV cell; floats get the 17-digit treatment."""
    if isinstance(value, float):
        return fmt_float(value)
    if hasattr(value, "item"):  # numpy scalar
        return csv_cell(value.item())
    return str(value)


def csv_line(values: list[Any] | tuple[Any, ...]) -> str:
    return ",".join(csv_cell(v) for v in values)
