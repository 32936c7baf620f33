"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise, or
when the environment variable ``ROWSAMPLE_PURE_PYTHON`` is set to a truthy
value, the numpy implementations in ``_pykernels`` are used. ``BACKEND``
names the active choice.
"""
from __future__ import annotations

import os

import numpy as np

from . import _pykernels

_force_python = os.environ.get("ROWSAMPLE_PURE_PYTHON", "").lower() in ("1", "true", "yes")

_impl = _pykernels
BACKEND = "python"
if not _force_python:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        pass


def available_backends():
    """Return ``{name: module}`` for every kernel implementation importable here."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out


def fwht(a, impl=None):
    """In-place unnormalized Walsh-Hadamard transform along axis 0; returns `a`."""
    impl = impl or _impl
    if a.dtype != np.float64 or not a.flags.c_contiguous or a.ndim != 2:
        raise TypeError("fwht needs a C-contiguous float64 2-d array")
    m = a.shape[0]
    if m & (m - 1):
        raise ValueError("row count %d is not a power of two" % m)
    impl.fwht(a)
    return a


def householder_qr(a, impl=None):
    impl = impl or _impl
    return impl.householder_qr(np.ascontiguousarray(a, dtype=np.float64))


def givens_chase(q, target, tol, impl=None):
    impl = impl or _impl
    if not q.flags.c_contiguous or q.dtype != np.float64:
        raise TypeError("givens_chase works in place on a C-contiguous float64 array")
    return impl.givens_chase(q, np.ascontiguousarray(target, dtype=np.float64), float(tol))
