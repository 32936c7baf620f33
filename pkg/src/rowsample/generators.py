"""Orthonormal matrices with prescribed leverage scores or coherence.

`generate_with_leverage` realizes any feasible leverage profile (entries in
[0, 1] summing to n) by chasing Givens rotations through [I_n; 0]. The two
profile builders produce the spike and many-zeros distributions used in the
experiments; `stacked_diagonal` and `hadamard_structured` are closed-form
families for special dimensions.
"""
from __future__ import annotations

import math
from typing import Optional

import numpy as np

from . import kernels
from .linalg import SUM_TOL, LeverageProfile, OrthonormalBasis
from .sampling import RngLike, _generator


class InfeasibleProfileError(ValueError):
    """Requested leverage scores cannot belong to an orthonormal basis."""


class ConstructionError(RuntimeError):
    """A closed-form construction failed its post-hoc validation."""


def _check_dims(m, n, mu):
    if not (isinstance(m, (int, np.integer)) and isinstance(n, (int, np.integer))):
        raise TypeError("m and n must be integers")
    if not m >= n >= 1:
        raise ValueError("need m >= n >= 1, got m=%d n=%d" % (m, n))
    if not (n / m) * (1 - 1e-12) <= mu <= 1.0:
        raise ValueError("coherence must satisfy n/m <= mu <= 1, got mu=%r (n/m=%r)"
                         % (mu, n / m))


def leverage_one_spike(m: int, n: int, mu: float) -> LeverageProfile:
    """One score equal to mu, the other m-1 equal to (n - mu)/(m - 1)."""
    _check_dims(m, n, mu)
    if m == 1:
        return LeverageProfile.from_scores([1.0], n=1)
    rest = (n - mu) / (m - 1)
    if rest > mu * (1 + 1e-12):
        raise ValueError("mu=%r is below the remaining scores %r" % (mu, rest))
    scores = np.full(m, rest)
    scores[0] = mu
    return LeverageProfile.from_scores(scores, n=n)


def leverage_many_zeros(m: int, n: int, mu: float) -> LeverageProfile:
    """As many zero scores as possible: ceil(n/mu) - 1 scores equal mu, one slack."""
    _check_dims(m, n, mu)
    ratio = n / mu
    m_s = int(round(ratio)) if abs(ratio - round(ratio)) <= 1e-9 * ratio else math.ceil(ratio)
    m_s = min(max(m_s, 1), m)
    scores = np.zeros(m)
    scores[:m_s - 1] = mu
    scores[m_s - 1] = min(max(n - (m_s - 1) * mu, 0.0), mu)
    return LeverageProfile.from_scores(scores, n=n)


def check_feasible(scores, n: int) -> np.ndarray:
    """Validate that `scores` can be the leverage scores of an m x n orthonormal matrix."""
    s = np.asarray(scores, dtype=np.float64).ravel()
    problems = []
    if s.size < n:
        problems.append("m=%d < n=%d" % (s.size, n))
    if not np.all(np.isfinite(s)):
        problems.append("non-finite scores")
    else:
        if s.min() < 0.0:
            problems.append("score %g < 0 at row %d" % (s.min(), int(s.argmin())))
        if s.max() > 1.0:
            problems.append("score %g > 1 at row %d" % (s.max(), int(s.argmax())))
        if abs(s.sum() - n) > SUM_TOL * n:
            problems.append("scores sum to %.17g, not n=%d" % (s.sum(), n))
    if problems:
        raise InfeasibleProfileError("infeasible leverage profile: " + "; ".join(problems))
    return s


def haar_orthogonal(n: int, rng: RngLike) -> np.ndarray:
    """Haar-distributed n x n orthogonal matrix (QR of a Gaussian, signs fixed)."""
    gen = _generator(rng)
    z = gen.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))


def generate_with_leverage(profile, n: Optional[int] = None, mix: Optional[RngLike] = None,
                           return_rotations: bool = False):
    """Orthonormal m x n matrix whose squared row norms equal `profile`.

    Starting from [I_n; 0], rows are processed against the targets sorted in
    non-increasing order. Each step takes the last row with surplus norm and
    the first later row with a deficit and applies the Givens rotation that
    sets whichever of the two is closer to its target exactly; this is a
    T-transform that keeps the current norms majorizing the targets, so at
    most m - 1 rotations are needed. Rows are permuted back to the caller's
    order at the end.

    If `mix` is given, the result is right-multiplied by a Haar-random
    orthogonal matrix, which leaves the leverage scores unchanged.
    """
    scores = profile.scores if isinstance(profile, LeverageProfile) else profile
    if n is None:
        n = profile.n_implied if isinstance(profile, LeverageProfile) else int(round(np.sum(scores)))
    s = check_feasible(scores, n)
    m = s.size
    order = np.argsort(-s, kind="stable")
    target = np.ascontiguousarray(s[order])
    q = np.zeros((m, n))
    q[:n, :n] = np.eye(n)
    count = kernels.givens_chase(q, target, 1e-12 * n)
    if count > max(m - 1, 0):
        raise ConstructionError("used %d rotations, more than m-1=%d" % (count, m - 1))
    out = np.empty_like(q)
    out[order] = q
    if mix is not None:
        out = out @ haar_orthogonal(n, mix)
    basis = OrthonormalBasis.certify(out)
    if return_rotations:
        return basis, count
    return basis


def stacked_diagonal(m: int, n: int, mu: float) -> OrthonormalBasis:
    """s = m/n stacked n x n diagonal blocks: sqrt(mu) I_n on top, phi I_n below.

    phi = sqrt((1 - mu)/(m/n - 1)); every block row has norm mu or phi^2.
    """
    if m % n:
        raise ValueError("stacked_diagonal needs n | m, got m=%d n=%d" % (m, n))
    _check_dims(m, n, mu)
    s = m // n
    if s == 1:
        if not math.isclose(mu, 1.0):
            raise ValueError("with m == n the coherence must be 1")
        return OrthonormalBasis.certify(np.eye(n))
    phi = math.sqrt((1.0 - mu) / (s - 1))
    if phi * phi > mu * (1 + 1e-12):
        raise ValueError("mu=%r below the block weight phi^2=%r" % (mu, phi * phi))
    blocks = [math.sqrt(mu) * np.eye(n)] + [phi * np.eye(n)] * (s - 1)
    return OrthonormalBasis.certify(np.vstack(blocks))


def _is_pow2(x):
    return x >= 1 and not x & (x - 1)


def hadamard_structured(m: int, n: int, mu: float, tol: float = 1e-10) -> OrthonormalBasis:
    """Hadamard-like m x n orthonormal matrix with coherence mu.

    m = 2^k and n < m both powers of two. With
    alpha = sqrt((mu - (n-1)/(m-1)) / (1 - (n-1)/(m-1))) and
    beta = sqrt((1 - alpha^2)/(m - 1)), the recursion

        B_0 = beta,      B_{j+1} = [[-B_j, B_j], [B_j, B_j]]
        D_1 = [[alpha, -beta], [beta, alpha]],
        D_{j+1} = [[D_j, -B_j], [B_j, D_j]]

    gives Q = D_k[:, :n]. The first n rows have norm mu and the rest
    (n - n mu)/(m - n), so mu must be at least n/m. The result is validated
    numerically (orthonormality and coherence within `tol`).
    """
    if not (_is_pow2(m) and _is_pow2(n) and n < m):
        raise ValueError("need m = 2^k and n < m a power of two, got m=%d n=%d" % (m, n))
    _check_dims(m, n, mu)
    floor = (n - 1) / (m - 1)
    alpha = math.sqrt(max(mu - floor, 0.0) / (1.0 - floor))
    beta = math.sqrt(max(1.0 - alpha * alpha, 0.0) / (m - 1))
    b = np.array([[-beta, beta], [beta, beta]])
    d = np.array([[alpha, -beta], [beta, alpha]])
    while d.shape[0] < m:
        d = np.block([[d, -b], [b, d]])
        b = np.block([[-b, b], [b, b]])
    q = d[:, :n]
    defect = float(np.linalg.norm(q.T @ q - np.eye(n)))
    got = float(np.einsum("ij,ij->i", q, q).max())
    if defect > tol * math.sqrt(n) or abs(got - mu) > tol:
        raise ConstructionError("Hadamard construction failed validation: defect=%.3g, "
                                "coherence=%r vs mu=%r" % (defect, got, mu))
    return OrthonormalBasis.certify(q)
