"""Deterministic report serialization.

Reports must be byte-identical across reruns of the same configuration:
floats are printed with 17 significant digits, mapping keys keep their
insertion order, and rows keep their construction order.  NaN becomes
JSON null; negative zero is normalized to zero.
"""

from __future__ import annotations

import math
from pathlib import Path


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "null"
    if x == 0.0:
        x = 0.0  # drop a potential sign on -0.0
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _escape(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def dumps_json(obj, indent: int = 2) -> str:
    """Serialize nested dict/list/scalar data deterministically."""
    pieces: list[str] = []
    _emit(obj, pieces, 0, indent)
    pieces.append("\n")
    return "".join(pieces)


def _emit(obj, out: list, level: int, indent: int) -> None:
    pad = " " * (indent * (level + 1))
    closing_pad = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(_escape(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            out.append(pad)
            out.append(_escape(str(key)))
            out.append(": ")
            _emit(value, out, level + 1, indent)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(closing_pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, value in enumerate(obj):
            out.append(pad)
            _emit(value, out, level + 1, indent)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(closing_pad + "]")
    else:
        # numpy scalars and other float-likes
        try:
            out.append(format_float(float(obj)))
        except (TypeError, ValueError):
            raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_field(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        s = format_float(value)
        return "" if s == "null" else s
    s = str(value)
    if any(c in s for c in ",\"\n"):
        s = '"' + s.replace('"', '""') + '"'
    return s


def dumps_csv(header: list, rows: list) -> str:
    lines = [",".join(_csv_field(h) for h in header)]
    for row in rows:
        lines.append(",".join(_csv_field(v) for v in row))
    return "\n".join(lines) + "\n"


def write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")
