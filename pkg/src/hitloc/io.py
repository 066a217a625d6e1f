"""CSV / JSON / JSON-lines writers shared by the data products and the CLI.

All text is UTF-8 with LF line endings; floats carry 17 significant digits.
"""

from __future__ import annotations

import json
import math
import sys
from contextlib import contextmanager
from numbers import Integral, Real
from pathlib import Path

import numpy as np


def fmt(value):
    """Render one field: integers verbatim, floats as ``%.16e``."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (Integral, np.integer)):
        return str(int(value))
    if isinstance(value, (Real, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.16e}"
    return str(value)


def jsonable(value):
    """Convert numpy scalars/arrays for :mod:`json`; floats keep full precision."""
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (Integral, np.integer)):
        return int(value)
    if isinstance(value, (Real, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    return value


@contextmanager
def open_text(path):
    """Yield a writable text handle; ``None`` or ``"-"`` means stdout."""
    if path is None or str(path) == "-":
        yield sys.stdout
        return
    with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
        yield fh


def write_csv(fh, header, rows):
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(fmt(v) for v in row) + "\n")


def write_json(fh, obj):
    fh.write(json.dumps(jsonable(obj), indent=2, sort_keys=False) + "\n")


def write_jsonl(fh, records):
    for rec in records:
        fh.write(json.dumps(jsonable(rec), sort_keys=False) + "\n")
