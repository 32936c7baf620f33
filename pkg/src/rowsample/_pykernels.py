"""Pure-Python/numpy implementations of the hot kernels.

These mirror the signatures of the compiled ``_ckernels`` module exactly and
are used when the extension is unavailable or ``ROWSAMPLE_PURE_PYTHON=1``.
"""
from __future__ import annotations

import numpy as np


def fwht(a):
    """Unnormalized Walsh-Hadamard transform of the rows of `a`, in place.

    `a` is a C-contiguous float64 array of shape (m, k) with m a power of
    two. Column j of the result is H_m @ a[:, j] (Sylvester ordering).
    """
    m, k = a.shape
    h = 1
    while h < m:
        v = a.reshape(m // (2 * h), 2, h, k)
        top = v[:, 0].copy()
        v[:, 0] += v[:, 1]
        np.subtract(top, v[:, 1], out=v[:, 1])
        h *= 2
    return a


def householder_qr(a):
    """Thin Householder QR of an m x n array (m >= n).

    Returns (q, r) with q of shape (m, n) and r upper triangular (n, n).
    Zero columns (rank deficiency) are skipped, leaving a zero on the
    diagonal of r; q stays orthonormal regardless.
    """
    w = np.array(a, dtype=np.float64, order="C", copy=True)
    m, n = w.shape
    vs = np.zeros((m, n))
    for j in range(n):
        x = w[j:, j]
        normx = np.linalg.norm(x)
        if normx == 0.0:
            continue
        alpha = -normx if x[0] >= 0 else normx
        v = x.copy()
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        vs[j:, j] = v
        w[j:, j:] -= 2.0 * np.outer(v, v @ w[j:, j:])
    r = np.triu(w[:n, :])
    q = np.zeros((m, n))
    q[:n, :n] = np.eye(n)
    for j in range(n - 1, -1, -1):
        v = vs[j:, j]
        q[j:, :] -= 2.0 * np.outer(v, v @ q[j:, :])
    return q, r


def _rotate_to(q, d, p, s, target):
    """Rotate rows p and s of q so that ||q[p]||^2 == target."""
    alpha = d[p]
    beta = d[s]
    gamma = float(q[p] @ q[s])
    A = beta - target
    C = alpha - target
    disc = max(gamma * gamma - A * C, 0.0)
    sg = 1.0 if gamma >= 0.0 else -1.0
    qq = -(gamma + sg * np.sqrt(disc))
    if qq != 0.0:
        x = C / qq
        cs = 1.0 / np.sqrt(1.0 + x * x)
        sn = x * cs
    elif C == 0.0:
        cs, sn = 1.0, 0.0
    else:
        cs, sn = 0.0, 1.0
    rp = q[p].copy()
    rs = q[s].copy()
    q[p] = cs * rp + sn * rs
    q[s] = cs * rs - sn * rp
    d[p] = float(q[p] @ q[p])
    d[s] = float(q[s] @ q[s])


def givens_chase(q, target, tol):
    """Drive the squared row norms of q onto `target` with Givens rotations.

    `target` must be sorted non-increasing and majorized by the current row
    norms (true for q = [I; 0]). Each step picks the last surplus row j and
    the first deficient row k > j and fixes whichever has the smaller
    defect, so at most m - 1 rotations are applied. Returns that count.
    """
    m = q.shape[0]
    d = np.einsum("ij,ij->i", q, q)
    diff = d - target
    jprev, kstart = m - 1, 0
    count = 0
    while True:
        # surplus and deficient sets only shrink, so both scans resume
        surplus = np.flatnonzero(diff[: jprev + 1] > tol)
        if surplus.size == 0:
            break
        j = int(surplus[-1])
        if j != jprev or kstart <= j:
            kstart = j + 1
        jprev = j
        # relative test: targets below tol still have to absorb mass
        deficient = np.flatnonzero(-diff[kstart:] > tol * target[kstart:])
        if deficient.size == 0:
            # leftover surplus is the profile's sum mismatch
            break
        k = kstart + int(deficient[0])
        kstart = k
        if target[k] - d[k] <= d[j] - target[j]:
            _rotate_to(q, d, k, j, target[k])
            kstart = k + 1
        else:
            _rotate_to(q, d, j, k, target[j])
        diff[j] = d[j] - target[j]
        diff[k] = d[k] - target[k]
        count += 1
        if count > m:
            raise ArithmeticError("rotation budget exceeded")
    return count
