"""Plain-text matrix format shared by all CLI subcommands.

First line ``m n``; then m lines of n space-separated decimals written with
17 significant digits, so float64 values round-trip exactly.
"""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .linalg import as_matrix


def dumps(a) -> str:
    arr = as_matrix(a)
    buf = io.StringIO()
    buf.write("%d %d\n" % arr.shape)
    np.savetxt(buf, arr, fmt="%.17g", delimiter=" ")
    return buf.getvalue()


def loads(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix file")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError("header must be 'm n', got %r" % lines[0])
    m, n = int(header[0]), int(header[1])
    if len(lines) - 1 != m:
        raise ValueError("header declares %d rows, found %d" % (m, len(lines) - 1))
    rows = [np.array(ln.split(), dtype=np.float64) for ln in lines[1:]]
    if any(r.size != n for r in rows):
        raise ValueError("every row must have %d values" % n)
    return as_matrix(np.vstack(rows))


def write_matrix(path, a) -> None:
    Path(path).write_text(dumps(a))


def read_matrix(path) -> np.ndarray:
    return loads(Path(path).read_text())
