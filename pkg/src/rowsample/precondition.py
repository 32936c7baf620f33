"""Sampled-QR preconditioning for overdetermined least squares.

The pipeline is: mix rows with a random-sign Walsh-Hadamard transform F,
sample rows of FA, take the triangular factor R_s of their QR, and run LSQR
on A R_s^{-1}. The condition number of A R_s^{-1} equals that of S Q, where
Q is an orthonormal basis of FA; `preconditioned_kappa_pair` computes both sides
independently.
"""
from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np
from scipy.linalg import solve_triangular

from . import kernels
from .linalg import as_matrix, condition_number, numerical_rank, thin_qr
from .sampling import RngLike, SampleSelection, Strategy, _generator, apply_selection, sample

DEFAULT_RETRIES = 3


class RankDeficientSample(RuntimeError):
    """The sampled matrix M_s lost rank; resampling may succeed."""


def next_pow2(m: int) -> int:
    return 1 << max(m - 1, 0).bit_length()


def pad_rows(a, m_target: Optional[int] = None) -> np.ndarray:
    """Append zero rows up to `m_target` (default: next power of two).

    Zero rows change neither the column space rank nor the least-squares
    solution when the right-hand side is padded the same way.
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    m = arr.shape[0]
    m_target = next_pow2(m) if m_target is None else m_target
    if m_target < m:
        raise ValueError("cannot pad %d rows down to %d" % (m, m_target))
    out = np.zeros((m_target, arr.shape[1]))
    out[:m] = arr
    return out


def random_signs(m: int, rng: RngLike) -> np.ndarray:
    return np.where(_generator(rng).random(m) < 0.5, -1.0, 1.0)


def random_sign_hadamard(a, rng: RngLike, pad: bool = False, signs=None) -> np.ndarray:
    """F a with F = H_m D / sqrt(m), D a random +-1 diagonal.

    m must be a power of two unless `pad` is set, in which case zero rows
    are appended first. `signs` overrides the random diagonal.
    """
    arr = np.asarray(a, dtype=np.float64)
    vector = arr.ndim == 1
    if vector:
        arr = arr.reshape(-1, 1)
    m = arr.shape[0]
    if m & (m - 1):
        if not pad:
            raise ValueError("row count %d is not a power of two; pass pad=True" % m)
        arr = pad_rows(arr)
        m = arr.shape[0]
    if signs is None:
        signs = random_signs(m, rng)
    out = np.ascontiguousarray(arr * np.asarray(signs)[:, None])
    kernels.fwht(out)
    out /= np.sqrt(m)
    return out.ravel() if vector else out


def build_preconditioner(a, c: int, strategy=Strategy.WITH_REPLACEMENT, rng: RngLike = None,
                         transform: bool = True, max_retries: int = DEFAULT_RETRIES,
                         return_selection: bool = False):
    """Triangular factor R_s of the QR of c sampled rows of F A.

    On a rank-deficient sample a fresh selection is drawn, up to
    `max_retries` extra attempts; then `RankDeficientSample` is raised.
    """
    arr = as_matrix(a)
    m, n = arr.shape
    if c < n:
        raise ValueError("need c >= n, got c=%d n=%d" % (c, n))
    gen = _generator(rng if rng is not None else np.random.default_rng())
    mixed = random_sign_hadamard(arr, gen, pad=True) if transform else arr
    for _ in range(max_retries + 1):
        sel = sample(strategy, mixed.shape[0], min(c, mixed.shape[0])
                     if Strategy(strategy) != Strategy.WITH_REPLACEMENT else c, gen)
        ms = apply_selection(sel, mixed)
        if ms.shape[0] >= n and numerical_rank(ms) == n:
            _, r_s = thin_qr(ms)
            return (r_s, sel) if return_selection else r_s
    raise RankDeficientSample("sampled matrix rank deficient after %d attempts" % (max_retries + 1))


def preconditioned_kappa(a, r_s) -> Optional[float]:
    """kappa(A R_s^{-1}) via a triangular solve."""
    ar = solve_triangular(r_s, np.asarray(a, dtype=np.float64).T, trans="T", lower=False).T
    return condition_number(ar)


def preconditioned_kappa_pair(a, selection: SampleSelection, rng: RngLike, signs=None):
    """Return (kappa(A R_s^{-1}), kappa(S Q)) computed along independent paths.

    The transform F is drawn from `rng` (or given by `signs`); `selection`
    must be over the (padded) row count of F A. Raises `RankDeficientSample`
    if S F A is rank deficient.
    """
    arr = as_matrix(a)
    n = arr.shape[1]
    fa = random_sign_hadamard(arr, rng, pad=True, signs=signs)
    ms = apply_selection(selection, fa)
    if ms.shape[0] < n or numerical_rank(ms) < n:
        raise RankDeficientSample("sampled matrix is rank deficient")
    _, r_s = thin_qr(ms)
    k_pre = preconditioned_kappa(arr, r_s)
    q, _ = thin_qr(fa)
    k_sq = condition_number(apply_selection(selection, q.q))
    if k_pre is None or k_sq is None:
        raise RankDeficientSample("sampled matrix is rank deficient")
    return k_pre, k_sq


class LsqrResult(NamedTuple):
    x: np.ndarray
    iterations: int
    converged: bool


def lsqr_solve(a, b, r_s=None, tol: float = 1e-10, max_iter: Optional[int] = None) -> LsqrResult:
    """LSQR for min ||A x - b||, optionally right-preconditioned by R_s.

    With `r_s` the iteration runs on A R_s^{-1} and x is recovered from
    R_s x = y. Stops when the normal-equations residual of the iterated
    operator, ||Op^T r|| / (||Op|| ||r||), drops below `tol`, or when
    ||r|| <= tol (||Op|| ||y|| + ||b||) for consistent systems.
    `max_iter` defaults to 4n; on exhaustion the last iterate is returned
    with ``converged=False``.
    """
    A = as_matrix(a)
    b = np.asarray(b, dtype=np.float64).ravel()
    m, n = A.shape
    if b.size != m:
        raise ValueError("b has %d entries, A has %d rows" % (b.size, m))
    if tol <= 0:
        raise ValueError("tol must be positive")
    max_iter = 4 * n if max_iter is None else max_iter

    if r_s is None:
        def mv(v):
            return A @ v

        def rmv(u):
            return A.T @ u
    else:
        R = np.asarray(r_s, dtype=np.float64)

        def mv(v):
            return A @ solve_triangular(R, v, lower=False)

        def rmv(u):
            return solve_triangular(R, A.T @ u, trans="T", lower=False)

    y = np.zeros(n)
    beta = np.linalg.norm(b)
    if beta == 0.0:
        return LsqrResult(np.zeros(n), 0, True)
    u = b / beta
    v = rmv(u)
    alpha = np.linalg.norm(v)
    if alpha == 0.0:
        return LsqrResult(np.zeros(n), 0, True)
    v = v / alpha
    w = v.copy()
    phibar, rhobar = beta, alpha
    anorm2 = 0.0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        u = mv(v) - alpha * u
        beta = np.linalg.norm(u)
        if beta > 0.0:
            u /= beta
        anorm2 += alpha * alpha + beta * beta
        v = rmv(u) - beta * v
        alpha = np.linalg.norm(v)
        if alpha > 0.0:
            v /= alpha
        rho = np.hypot(rhobar, beta)
        cs, sn = rhobar / rho, beta / rho
        theta = sn * alpha
        rhobar = -cs * alpha
        phi = cs * phibar
        phibar = sn * phibar
        y += (phi / rho) * w
        w = v - (theta / rho) * w
        rnorm = abs(phibar)
        arnorm = abs(phibar * alpha * cs)
        anorm = np.sqrt(anorm2)
        if rnorm <= tol * (anorm * np.linalg.norm(y) + np.linalg.norm(b)):
            converged = True
            break
        if rnorm > 0 and arnorm / (anorm * rnorm) <= tol:
            converged = True
            break
        if alpha == 0.0 or beta == 0.0:
            converged = True
            break
    x = y if r_s is None else solve_triangular(np.asarray(r_s, dtype=np.float64), y, lower=False)
    return LsqrResult(x, it, converged)
