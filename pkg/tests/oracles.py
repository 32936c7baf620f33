"""Reference implementations that share no code path with the package.

They are slow and simple on purpose: Gram-Schmidt instead of Householder,
one-sided Jacobi instead of LAPACK, explicit Sylvester Hadamard matrices
instead of the butterfly, and brute-force enumeration of sampling laws.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np


def mgs_qr(a):
    """Modified Gram-Schmidt with one reorthogonalization pass."""
    a = np.array(a, dtype=float)
    m, n = a.shape
    q = np.zeros((m, n))
    r = np.zeros((n, n))
    for j in range(n):
        v = a[:, j].copy()
        for _ in range(2):
            for i in range(j):
                h = q[:, i] @ v
                r[i, j] += h
                v -= h * q[:, i]
        r[j, j] = np.linalg.norm(v)
        q[:, j] = v / r[j, j]
    return q, r


def jacobi_singular_values(a, sweeps=60):
    """One-sided Jacobi SVD: rotate column pairs until mutually orthogonal."""
    u = np.array(a, dtype=float)
    n = u.shape[1]
    for _ in range(sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = u[:, p] @ u[:, p]
                beta = u[:, q] @ u[:, q]
                gamma = u[:, p] @ u[:, q]
                if gamma == 0.0:
                    continue
                off = max(off, abs(gamma) / math.sqrt(alpha * beta))
                zeta = (beta - alpha) / (2 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1 + zeta * zeta))
                c = 1 / math.sqrt(1 + t * t)
                s = c * t
                up = u[:, p].copy()
                u[:, p] = c * up - s * u[:, q]
                u[:, q] = s * up + c * u[:, q]
        if off < 1e-15:
            break
    return np.sort(np.linalg.norm(u, axis=0))[::-1]


def sylvester_hadamard(m):
    h = np.array([[1.0]])
    while h.shape[0] < m:
        h = np.block([[h, h], [h, -h]])
    return h


def chernoff_delta_mp(c, m, mu, n, eps, dps=50):
    """n (f(-eps)^k + f(eps)^k), k = c/(m mu), in extended precision."""
    with mpmath.workdps(dps):
        k = mpmath.mpf(c) / (mpmath.mpf(m) * mpmath.mpf(mu))

        def f(x):
            x = mpmath.mpf(x)
            return mpmath.e ** x * (1 + x) ** (-(1 + x))

        return float(n * (f(-eps) ** k + f(eps) ** k))


def bernoulli_subset_law(m, p):
    """Exact P(selected set = S) when each row is kept independently with prob p."""
    p = Fraction(p)
    law = {}
    for r in range(m + 1):
        for s in itertools.combinations(range(m), r):
            law[s] = p ** r * (1 - p) ** (m - r)
    return law


def binomial_pmf(m, p):
    p = Fraction(p)
    return [math.comb(m, k) * p ** k * (1 - p) ** (m - k) for k in range(m + 1)]


def expected_gram_by_enumeration(m, c):
    """E[S^T S] for c-of-m sampling without replacement, summing over all subsets."""
    total = np.zeros((m, m))
    subsets = list(itertools.combinations(range(m), c))
    for s in subsets:
        d = np.zeros(m)
        d[list(s)] = m / c
        total += np.diag(d)
    return total / len(subsets)


def tau_bruteforce(scores):
    """max over x in {0 <= x_j <= mu, sum x = 1} of sum l_j x_j, by greedy filling.

    Filling the largest scores up to mu each is optimal for a linear
    objective over this polytope; written independently of the package.
    """
    s = sorted(scores, reverse=True)
    mu = s[0]
    budget, total = 1.0, 0.0
    for v in s:
        take = min(mu, budget)
        total += take * v
        budget -= take
        if budget <= 0:
            break
    return total
