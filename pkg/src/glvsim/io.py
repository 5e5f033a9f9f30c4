"""CSV/JSON writers with bit-stable number formatting."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path


def fmt(v) -> str:
    """17 significant digits for floats; empty cell for None."""
    if v is None:
        return ""
    if hasattr(v, "dtype") and v.dtype.kind in "bi":
        v = v.item()
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float) or hasattr(v, "dtype"):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return f"{v:.16e}"
    return str(v)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n")
    return path


def _default(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")
