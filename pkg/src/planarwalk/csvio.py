"""Deterministic CSV output.

Every file starts with a metadata comment carrying the invocation's
seed and parameters, then a header row and data rows.  Floats print
with 12 significant digits, UTF-8, LF line endings, '.' decimal
separator — byte-identical across reruns of the same (argv, seed).
"""
from __future__ import annotations

import io
import sys

FORMAT_VERSION = "1"


def format_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    kind = getattr(getattr(v, "dtype", None), "kind", None)
    if kind in ("i", "u"):
        return str(int(v))
    if isinstance(v, float) or kind == "f":
        return f"{float(v):.12g}"
    return str(v)


def render_csv(rows, schema, meta: dict) -> str:
    """Render rows (sequences matching `schema`) with a metadata comment."""
    buf = io.StringIO()
    # One space-separated key=value token per entry; values must not carry
    # whitespace or the header grammar stops being parseable.
    pairs = " ".join(f"{k}={format_value(v).replace(' ', '_')}"
                     for k, v in meta.items())
    buf.write(f"# planarwalk format={FORMAT_VERSION} {pairs}\n")
    buf.write(",".join(schema) + "\n")
    for row in rows:
        if isinstance(row, dict):
            row = [row[c] for c in schema]
        if len(row) != len(schema):
            raise ValueError(f"row width {len(row)} != schema width {len(schema)}")
        buf.write(",".join(format_value(v) for v in row) + "\n")
    return buf.getvalue()


def emit_csv(rows, schema, destination, meta: dict) -> str:
    """Write rendered CSV to a path (or stdout for '-'); returns the text."""
    text = render_csv(rows, schema, meta)
    if destination in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text
