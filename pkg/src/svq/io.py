"""CSV and JSON emission with decimal-exact floats.

Floats are written with 17 significant digits so an emit/parse round trip
reproduces the exact binary value, and the emitted bytes are deterministic
(needed for bit-identical model files across reruns).
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

FLOAT_DIGITS = 17


def format_number(x) -> str:
    """Render a scalar for CSV/JSON output; 17 significant digits for floats."""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(x)
    if not np.isfinite(v):
        raise InvalidInputError(f"non-finite value {v!r} cannot be serialized")
    return format(v, f".{FLOAT_DIGITS}g")


def dumps_stable(obj, indent: int = 0) -> str:
    """Deterministic JSON: insertion-ordered keys, floats via format_number."""
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{k}": {dumps_stable(v, indent + 2)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(isinstance(v, (int, float, np.integer, np.floating)) for v in seq)
        if flat:
            return "[" + ", ".join(format_number(v) for v in seq) + "]"
        items = [f"{inner}{dumps_stable(v, indent + 2)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return format_number(obj)


def write_csv(path, rows, header=None, comments=()) -> None:
    """Write rows of numbers/strings; `comments` become leading '# ' lines."""
    lines = [f"# {c}" for c in comments]
    if header is not None:
        lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_number(v) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path, has_header=False):
    """Read a numeric CSV written by write_csv.

    Returns (array, header, comments); header is None unless has_header.
    """
    comments = []
    rows = []
    header = None
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                comments.append(line[1:].strip())
                continue
            if has_header and header is None:
                header = line.split(",")
                continue
            try:
                rows.append([float(v) for v in line.split(",")])
            except ValueError as exc:
                raise InvalidInputError(f"{path}: malformed CSV row {line!r}") from exc
    if not rows:
        raise InvalidInputError(f"{path}: no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InvalidInputError(f"{path}: ragged rows (widths {sorted(widths)})")
    return np.asarray(rows, dtype=np.float64), header, comments
