"""Dense tall-skinny linear algebra: QR, singular values, rank, conditioning,
leverage scores and coherence.

Matrices are plain 2-d float64 numpy arrays. `as_matrix` is the single entry
point that validates shape and finiteness; the two value types below wrap
arrays that carry additional certified structure.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from . import kernels

ORTHO_TOL = 1e-10
SUM_TOL = 1e-8


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return `a` as a finite 2-d float64 array with at least one row and column."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError("%s must be 2-d, got shape %r" % (name, arr.shape))
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("%s must have m >= 1 and n >= 1, got %r" % (name, arr.shape))
    if not np.all(np.isfinite(arr)):
        raise ValueError("%s has non-finite entries" % name)
    return arr


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class LeverageProfile:
    """Leverage scores of an m x n orthonormal basis.

    ``scores`` lie in [0, 1] and sum to ``n_implied`` (an integer).
    """

    scores: np.ndarray
    n_implied: int

    @classmethod
    def from_scores(cls, scores, n: Optional[int] = None) -> "LeverageProfile":
        s = np.asarray(scores, dtype=np.float64).ravel()
        if s.size == 0 or not np.all(np.isfinite(s)):
            raise ValueError("leverage scores must be a non-empty finite vector")
        total = float(s.sum())
        n_implied = int(round(total)) if n is None else int(n)
        if n_implied < 1:
            raise ValueError("leverage scores sum to %g; need a positive integer" % total)
        if abs(total - n_implied) > SUM_TOL * n_implied:
            raise ValueError("leverage scores sum to %.17g, expected %d" % (total, n_implied))
        if s.min() < 0.0 or s.max() > 1.0:
            raise ValueError("leverage scores must lie in [0, 1]; got range [%g, %g]"
                             % (s.min(), s.max()))
        return cls(_frozen(s), n_implied)

    @property
    def m(self) -> int:
        return self.scores.size

    @property
    def coherence(self) -> float:
        return float(self.scores.max())

    @cached_property
    def sorted_desc(self) -> np.ndarray:
        """Scores in non-increasing order, l_[1] >= ... >= l_[m]."""
        return _frozen(np.sort(self.scores)[::-1])


@dataclass(frozen=True)
class OrthonormalBasis:
    """An m x n matrix certified to have orthonormal columns.

    Build with `OrthonormalBasis.certify`; ``ortho_defect`` is the measured
    Frobenius norm of Q^T Q - I.
    """

    q: np.ndarray
    ortho_defect: float

    @classmethod
    def certify(cls, q, tol: Optional[float] = None) -> "OrthonormalBasis":
        arr = as_matrix(q, "q")
        m, n = arr.shape
        if m < n:
            raise ValueError("orthonormal basis needs m >= n, got %d x %d" % (m, n))
        defect = float(np.linalg.norm(arr.T @ arr - np.eye(n)))
        limit = ORTHO_TOL * np.sqrt(n) if tol is None else tol
        if defect > limit:
            raise ValueError("columns are not orthonormal: ||Q^T Q - I||_F = %.3g > %.3g"
                             % (defect, limit))
        return cls(_frozen(arr), defect)

    @property
    def shape(self):
        return self.q.shape

    @cached_property
    def leverage(self) -> LeverageProfile:
        return leverage_scores(self)

    @property
    def coherence(self) -> float:
        return self.leverage.coherence


def thin_qr(a):
    """Householder thin QR of an m x n matrix with m >= n.

    Returns ``(basis, r)``; ``basis`` is an `OrthonormalBasis` and ``r`` is
    n x n upper triangular. Rank deficiency is not an error: the affected
    diagonal entries of ``r`` are (numerically) zero.
    """
    arr = as_matrix(a)
    m, n = arr.shape
    if m < n:
        raise ValueError("thin_qr needs m >= n, got %d x %d" % (m, n))
    q, r = kernels.householder_qr(arr)
    return OrthonormalBasis.certify(q), r


def singular_values(a) -> np.ndarray:
    """Singular values, non-increasing, length min(m, n).

    Uses LAPACK's bidiagonalization SVD, so small singular values keep full
    relative accuracy (no Gram-matrix squaring).
    """
    arr = as_matrix(a)
    return np.linalg.svd(arr, compute_uv=False)


def rank_tolerance(sigma: np.ndarray, shape) -> float:
    """Default rank threshold max(m, n) * eps(sigma_max)."""
    smax = float(sigma[0]) if sigma.size else 0.0
    return max(shape) * float(np.spacing(smax))


def numerical_rank(a, tol: Optional[float] = None) -> int:
    """Number of singular values above `tol` (default max(m,n)*eps(sigma_max))."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        return 0
    sigma = np.linalg.svd(arr, compute_uv=False)
    if tol is None:
        tol = rank_tolerance(sigma, arr.shape)
    return int(np.count_nonzero(sigma > tol))


def condition_number(a, tol: Optional[float] = None) -> Optional[float]:
    """Two-norm condition number sigma_max / sigma_min of a full column rank matrix.

    Returns None when the matrix is numerically rank deficient (including
    matrices with fewer rows than columns, and empty matrices).
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] == 0:
        raise ValueError("condition_number needs a 2-d matrix with n >= 1")
    m, n = arr.shape
    if m < n:
        return None
    sigma = np.linalg.svd(arr, compute_uv=False)
    if tol is None:
        tol = rank_tolerance(sigma, arr.shape)
    if np.count_nonzero(sigma > tol) < n:
        return None
    return float(sigma[0] / sigma[-1])


def leverage_scores(q) -> LeverageProfile:
    """Squared row norms of an orthonormal basis."""
    if not isinstance(q, OrthonormalBasis):
        q = OrthonormalBasis.certify(q)
    arr = q.q
    scores = np.einsum("ij,ij->i", arr, arr)
    # rounding can push a canonical row a hair above one
    scores = np.minimum(scores, 1.0)
    return LeverageProfile.from_scores(scores, n=arr.shape[1])


def coherence(q) -> float:
    return leverage_scores(q).coherence


def qtlq_norm(q) -> float:
    """||Q^T L Q||_2, evaluated as ||L^{1/2} Q||_2^2 with L = diag(leverage)."""
    if not isinstance(q, OrthonormalBasis):
        q = OrthonormalBasis.certify(q)
    lev = q.leverage.scores
    scaled = np.sqrt(lev)[:, None] * q.q
    return float(np.linalg.svd(scaled, compute_uv=False)[0] ** 2)
