"""Condition-number bounds for sampled orthonormal matrices.

Two families are provided. The coherence bound holds for all three uniform
sampling strategies and depends on the largest leverage score only:

    delta = n * (f(-eps)**(c/(m mu)) + f(eps)**(c/(m mu))),
    f(x)  = exp(x) * (1 + x)**(-(1 + x)).

The leverage bound holds for sampling with replacement and uses
tau >= ||Q^T L Q||_2:

    delta = 2n * exp(-1.5 * c eps**2 / (m (3 tau + eps mu))).

Either way, with probability at least 1 - delta the sampled matrix has full
rank and condition number at most sqrt((1 + eps)/(1 - eps)).

All delta evaluations are done in log space; exponents such as c/(m mu)
reach 10^4 in the tabulated cases.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import LeverageProfile

#: eps for which the condition-number bound equals exactly 10
EPS_KAPPA10 = 99.0 / 101.0


class BoundKind(str, enum.Enum):
    CHERNOFF_COHERENCE = "chernoff_coherence"
    BERNSTEIN_LEVERAGE = "bernstein_leverage"


@dataclass(frozen=True)
class BoundResult:
    kind: BoundKind
    epsilon: float
    delta: float
    kappa_bound: float
    c_min: Optional[int] = None

    @property
    def informative(self) -> bool:
        return 0.0 < self.epsilon < 1.0 and self.delta < 1.0


def kappa_bound(eps: float) -> float:
    """sqrt((1 + eps) / (1 - eps)); infinite at eps = 1."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must be in [0, 1], got %r" % eps)
    if eps == 1.0:
        return math.inf
    return math.sqrt((1.0 + eps) / (1.0 - eps))


def epsilon_for_kappa(kappa: float) -> float:
    """Inverse of `kappa_bound`: the eps giving bound `kappa` (> 1)."""
    if kappa <= 1.0:
        raise ValueError("kappa target must exceed 1, got %r" % kappa)
    k2 = kappa * kappa
    return (k2 - 1.0) / (k2 + 1.0)


def _log_f(x: float) -> float:
    # log f(x) = x - (1 + x) log(1 + x); the limit at x = -1 is -1
    if x == -1.0:
        return -1.0
    return x - (1.0 + x) * math.log1p(x)


def chernoff_f(x: float) -> float:
    """f(x) = e^x (1+x)^(-(1+x)) for x >= -1 (e^-1 at x = -1)."""
    if x < -1.0:
        raise ValueError("chernoff_f is defined for x >= -1, got %r" % x)
    return math.exp(_log_f(x))


def _check_coherence(m, n, mu):
    if m < 1 or n < 1 or n > m:
        raise ValueError("need 1 <= n <= m, got m=%r n=%r" % (m, n))
    if not (n / m) * (1 - 1e-12) <= mu <= 1.0:
        raise ValueError("coherence must satisfy n/m <= mu <= 1, got %r" % mu)


def _check_prob(name, p):
    if not 0.0 < p < 1.0:
        raise ValueError("%s must be in (0, 1), got %r" % (name, p))


def _log_chernoff_terms(c, m, mu, eps):
    k = c / (m * mu)
    return k * _log_f(-eps), k * _log_f(eps)


def chernoff_delta(c: int, m: int, mu: float, n: int, eps: float) -> float:
    """Failure probability of the coherence bound at sample count `c`."""
    _check_coherence(m, n, mu)
    _check_prob("eps", eps)
    if c < n:
        raise ValueError("need c >= n, got c=%r n=%r" % (c, n))
    lo, hi = _log_chernoff_terms(c, m, mu, eps)
    return n * (math.exp(lo) + math.exp(hi))


def _chernoff_residual(x, c, m, mu, n, delta):
    lo, hi = _log_chernoff_terms(c, m, mu, x)
    return delta - n * (math.exp(lo) + math.exp(hi))


def chernoff_epsilon(c: int, m: int, mu: float, n: int, delta: float) -> Optional[float]:
    """Smallest eps in (0, 1) with chernoff_delta(c, ..., eps) == delta.

    The residual delta - n(f(-x)^k + f(x)^k) is increasing in x, so the root
    is bracketed by bisection. Returns None when there is no root in (0, 1),
    i.e. the bound is not informative at this sample count.
    """
    _check_coherence(m, n, mu)
    _check_prob("delta", delta)
    if c < n:
        raise ValueError("need c >= n, got c=%r n=%r" % (c, n))
    if _chernoff_residual(1.0, c, m, mu, n, delta) <= 0.0:
        return None
    # bisect to adjacent doubles; |F| then sits at rounding level, far below 1e-12
    lo, hi = 0.0, 1.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _chernoff_residual(mid, c, m, mu, n, delta) < 0.0:
            lo = mid
        else:
            hi = mid
    return hi


def chernoff_onset(m: int, mu: float, n: int, delta: float, c_max: Optional[int] = None) -> Optional[int]:
    """Smallest c >= n at which `chernoff_epsilon` has a root in (0, 1).

    Found by bisection over the integers; the residual at eps -> 1 is
    monotone in c. Returns None if no c <= c_max (default 100 m) qualifies.
    """
    _check_coherence(m, n, mu)
    _check_prob("delta", delta)
    c_max = 100 * m if c_max is None else c_max

    def ok(c):
        return _chernoff_residual(1.0, c, m, mu, n, delta) > 0.0

    if not ok(c_max):
        return None
    if ok(n):
        return n
    lo, hi = n, c_max
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def chernoff_min_samples(m: int, mu: float, n: int, delta: float, eps: float) -> int:
    """ceil(3 m mu ln(2n/delta) / eps^2)."""
    return math.ceil(chernoff_min_samples_real(m, mu, n, delta, eps))


def chernoff_min_samples_real(m, mu, n, delta, eps) -> float:
    _check_coherence(m, n, mu)
    _check_prob("delta", delta)
    _check_prob("eps", eps)
    return 3.0 * m * mu * math.log(2.0 * n / delta) / eps**2


def chernoff_min_samples_99(m: int, mu: float, n: int) -> int:
    """Closed-form count for kappa <= 10 with probability .99: 3.2 m mu (ln 2n + 4.7)."""
    _check_coherence(m, n, mu)
    return math.ceil(3.2 * m * mu * (math.log(2.0 * n) + 4.7))


def is_informative(c_min: int, m: int) -> bool:
    """A sample-count lower bound is useless once it reaches the row count."""
    return c_min < m


def tau_bound(profile: LeverageProfile) -> float:
    """Upper bound on ||Q^T L Q||_2 from the largest leverage scores.

    With mu = l_[1] and t = floor(1/mu):
    tau = mu * sum_{j<=t} l_[j] + (1 - t mu) * l_[t+1], and mu^2 <= tau <= mu.
    """
    s = profile.sorted_desc
    mu = float(s[0])
    t = int(math.floor(1.0 / mu))
    head = float(s[:t].sum())
    tail = float(s[t]) if t < s.size else 0.0
    # rounding in 1/mu may shift t by one; both choices give the same value
    return mu * head + max(1.0 - t * mu, 0.0) * tail


def _check_tau(mu, tau):
    if not mu * mu * (1 - 1e-9) - 1e-15 <= tau <= mu * (1 + 1e-9) + 1e-15:
        raise ValueError("need mu^2 <= tau <= mu, got mu=%r tau=%r" % (mu, tau))


def bernstein_delta(c: int, m: int, n: int, mu: float, tau: float, eps: float) -> float:
    """Failure probability of the leverage bound (sampling with replacement)."""
    _check_coherence(m, n, mu)
    _check_tau(mu, tau)
    _check_prob("eps", eps)
    if c < 1:
        raise ValueError("need c >= 1, got %r" % c)
    return 2.0 * n * math.exp(-1.5 * c * eps**2 / (m * (3.0 * tau + eps * mu)))


def bernstein_epsilon(c: int, m: int, n: int, mu: float, tau: float, delta: float) -> float:
    """Positive root of 1.5 c eps^2 = L m (3 tau + eps mu), L = ln(2n/delta).

    The value may be >= 1, in which case the bound is not informative.
    """
    _check_coherence(m, n, mu)
    _check_tau(mu, tau)
    _check_prob("delta", delta)
    if c < 1:
        raise ValueError("need c >= 1, got %r" % c)
    L = math.log(2.0 * n / delta)
    b = L * m * mu
    return (b + math.sqrt(b * b + 18.0 * c * L * m * tau)) / (3.0 * c)


def bernstein_min_samples_real(m, n, mu, tau, delta, eps) -> float:
    _check_coherence(m, n, mu)
    _check_tau(mu, tau)
    _check_prob("delta", delta)
    _check_prob("eps", eps)
    return (2.0 / 3.0) * m * (3.0 * tau + eps * mu) * math.log(2.0 * n / delta) / eps**2


def bernstein_min_samples(m: int, n: int, mu: float, tau: float, delta: float, eps: float) -> int:
    """ceil((2/3) m (3 tau + eps mu) ln(2n/delta) / eps^2)."""
    return math.ceil(bernstein_min_samples_real(m, n, mu, tau, delta, eps))


def bernstein_min_samples_99(m: int, n: int, mu: float, tau: float) -> int:
    """Closed-form count for kappa <= 10 with probability .99: m (2.1 tau + .7 mu)(ln 2n + 4.7)."""
    _check_coherence(m, n, mu)
    _check_tau(mu, tau)
    return math.ceil(m * (2.1 * tau + 0.7 * mu) * (math.log(2.0 * n) + 4.7))


@dataclass(frozen=True)
class BoundComparison:
    bernstein: float
    chernoff: float

    @property
    def ratio(self) -> float:
        return self.bernstein / self.chernoff


def compare_bounds(m, n, mu, tau, delta, eps) -> BoundComparison:
    """Both pre-ceiling sample counts; the leverage count never exceeds the coherence count."""
    if tau > mu * (1 + 1e-12) or not eps < 1.0:
        raise ValueError("comparison needs tau <= mu and eps < 1")
    out = BoundComparison(
        bernstein_min_samples_real(m, n, mu, tau, delta, eps),
        chernoff_min_samples_real(m, mu, n, delta, eps),
    )
    assert out.bernstein <= out.chernoff * (1 + 1e-12), out
    return out


def chernoff_result(c, m, mu, n, delta) -> BoundResult:
    eps = chernoff_epsilon(c, m, mu, n, delta)
    if eps is None:
        return BoundResult(BoundKind.CHERNOFF_COHERENCE, 1.0, delta, math.inf, None)
    return BoundResult(BoundKind.CHERNOFF_COHERENCE, eps, delta, kappa_bound(eps),
                       chernoff_min_samples(m, mu, n, delta, eps))


def bernstein_result(c, m, n, mu, tau, delta) -> BoundResult:
    eps = bernstein_epsilon(c, m, n, mu, tau, delta)
    if eps >= 1.0:
        return BoundResult(BoundKind.BERNSTEIN_LEVERAGE, 1.0, delta, math.inf, None)
    return BoundResult(BoundKind.BERNSTEIN_LEVERAGE, eps, delta, kappa_bound(eps),
                       bernstein_min_samples(m, n, mu, tau, delta, eps))


def scaled_norm_bound(d, norm_z: float, sigma_min_z: float, mu_z: float) -> float:
    """Bound on ||D Z||_2^2 for non-negative diagonal D = diag(d).

    Uses the largest squared row norm `mu_z` of Z, its norm and smallest
    singular value. With t = floor(sigma_min^2 / mu_z) and
    r = ||Z||^2 - t mu_z, the bound is

        mu_z * sum_{j=1}^{t} d_[j]^2 + r * d_[t+1]^2      if r <= mu_z,
        mu_z * sum_{j=2}^{t+1} d_[j]^2 + r * d_[1]^2      otherwise.

    It never exceeds ||D||_2^2 ||Z||_2^2.
    """
    d = np.asarray(d, dtype=np.float64).ravel()
    if d.size == 0 or np.any(d < 0) or not np.all(np.isfinite(d)):
        raise ValueError("d must be a non-empty non-negative finite vector")
    if not 0.0 < sigma_min_z <= norm_z * (1 + 1e-12):
        raise ValueError("need 0 < sigma_min_z <= norm_z")
    if not mu_z > 0.0:
        raise ValueError("need mu_z > 0")
    d2 = np.sort(d)[::-1] ** 2
    t = int(math.floor(sigma_min_z**2 / mu_z))

    def dsq(j):  # 1-based d_[j]^2, zero past the end
        return float(d2[j - 1]) if 1 <= j <= d2.size else 0.0

    nz2 = norm_z * norm_z
    r = nz2 - t * mu_z
    if r <= mu_z:
        return mu_z * float(d2[:t].sum()) + r * dsq(t + 1)
    return mu_z * float(d2[1:t + 1].sum()) + r * dsq(1)
