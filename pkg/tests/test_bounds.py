import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import chernoff_delta_mp, jacobi_singular_values, tau_bruteforce
from rowsample import bounds
from rowsample.generators import generate_with_leverage, leverage_many_zeros, leverage_one_spike
from rowsample.linalg import LeverageProfile, qtlq_norm

M, N, DELTA, EPS = 10_000, 5, 0.01, bounds.EPS_KAPPA10
UNIT = N / M


def test_kappa_bound_and_inverse():
    assert bounds.kappa_bound(EPS) == pytest.approx(10.0, rel=1e-14)
    assert bounds.kappa_bound(0.0) == 1.0
    assert math.isinf(bounds.kappa_bound(1.0))
    assert bounds.epsilon_for_kappa(10.0) == pytest.approx(EPS, rel=1e-15)
    grid = np.linspace(0.01, 0.99, 50)
    assert np.all(np.diff([bounds.kappa_bound(e) for e in grid]) > 0)
    with pytest.raises(ValueError):
        bounds.kappa_bound(1.5)
    with pytest.raises(ValueError):
        bounds.epsilon_for_kappa(1.0)


def test_chernoff_f_values():
    assert bounds.chernoff_f(0.0) == 1.0
    assert bounds.chernoff_f(1.0) == pytest.approx(math.e / 4, rel=1e-15)
    assert bounds.chernoff_f(-1.0) == pytest.approx(math.exp(-1))
    with pytest.raises(ValueError):
        bounds.chernoff_f(-1.5)


@pytest.mark.parametrize("eps", [0.1, 0.5, 0.9802])
def test_minus_log_f_exceeds_eps_squared_over_three(eps):
    with mpmath.workdps(40):
        x = mpmath.mpf(eps)
        log_f = x - (1 + x) * mpmath.log1p(x)
    assert -float(log_f) > eps * eps / 3
    assert bounds._log_f(eps) == pytest.approx(float(log_f), rel=1e-14)


def test_chernoff_delta_matches_extended_precision():
    # c/(m mu) reaches 2e4 here; plain powering underflows
    for c, mu in [(108, UNIT), (1079, 10 * UNIT), (10_000, UNIT), (500, 0.05)]:
        assert bounds.chernoff_delta(c, M, mu, N, EPS) == pytest.approx(
            chernoff_delta_mp(c, M, mu, N, EPS), rel=1e-12)
    assert bounds.chernoff_delta(108, M, UNIT, N, EPS) == pytest.approx(1.596e-3, rel=1e-3)


def test_chernoff_delta_limits_and_monotonicity():
    assert bounds.chernoff_delta(100, M, UNIT, N, 1e-9) == pytest.approx(2 * N, rel=1e-6)
    cs = np.arange(N, 2000, 37)
    ds = [bounds.chernoff_delta(int(c), M, UNIT, N, 0.5) for c in cs]
    assert np.all(np.diff(ds) < 0)
    es = np.linspace(0.05, 0.95, 30)
    ds = [bounds.chernoff_delta(300, M, UNIT, N, e) for e in es]
    assert np.all(np.diff(ds) < 0)


def test_chernoff_delta_exponent_law():
    lo, hi = bounds._log_chernoff_terms(200, M, UNIT, 0.3)
    lo2, hi2 = bounds._log_chernoff_terms(400, M, UNIT, 0.3)
    assert (lo2, hi2) == pytest.approx((2 * lo, 2 * hi), rel=1e-14)


def test_chernoff_domain_errors():
    with pytest.raises(ValueError):
        bounds.chernoff_delta(4, M, UNIT, N, 0.5)
    with pytest.raises(ValueError):
        bounds.chernoff_delta(100, M, UNIT / 2, N, 0.5)
    with pytest.raises(ValueError):
        bounds.chernoff_delta(100, M, UNIT, N, 1.0)
    with pytest.raises(ValueError):
        bounds.chernoff_epsilon(100, M, UNIT, N, 0.0)


def test_chernoff_epsilon_round_trip_and_residual():
    for c, eps0 in [(200, 0.9), (1000, 0.4), (5000, 0.2)]:
        d0 = bounds.chernoff_delta(c, M, UNIT, N, eps0)
        eps = bounds.chernoff_epsilon(c, M, UNIT, N, d0)
        assert eps == pytest.approx(eps0, abs=1e-9)
        assert abs(bounds._chernoff_residual(eps, c, M, UNIT, N, d0)) <= 1e-12


def test_chernoff_epsilon_absent_below_onset():
    assert bounds.chernoff_epsilon(80, M, UNIT, N, DELTA) is None
    assert bounds.chernoff_epsilon(81, M, UNIT, N, DELTA) is not None


@pytest.mark.parametrize("factor,expected", [(1, 81), (1.5, 121), (15, 1207)])
def test_onset_values(factor, expected):
    assert abs(bounds.chernoff_onset(M, factor * UNIT, N, DELTA) - expected) <= 2


def test_onset_none_when_unreachable():
    assert bounds.chernoff_onset(100, 1.0, 5, DELTA, c_max=200) is None


@pytest.mark.parametrize("factor,expected", [
    (1, 108), (5, 540), (10, 1079), (15, 1618), (20, 2157), (25, 2697), (50, 5393), (100, 10786)])
def test_chernoff_min_samples_table_values(factor, expected):
    assert abs(bounds.chernoff_min_samples(M, factor * UNIT, N, DELTA, EPS) - expected) <= 2


def test_chernoff_min_samples_guarantees_delta():
    for factor in (1, 5, 10, 50):
        mu = factor * UNIT
        c = bounds.chernoff_min_samples(M, mu, N, DELTA, EPS)
        assert bounds.chernoff_delta(c, M, mu, N, EPS) <= DELTA
    # the minimal-coherence specialization
    assert bounds.chernoff_min_samples_real(M, UNIT, N, DELTA, 0.5) == pytest.approx(
        3 * N * math.log(2 * N / DELTA) / 0.25)


def test_closed_form_99_counts():
    assert bounds.chernoff_min_samples_99(M, UNIT, N) == 113
    assert abs(bounds.chernoff_min_samples_99(M, 15 * UNIT, N)
               - 15 * bounds.chernoff_min_samples_99(M, UNIT, N)) <= 15
    assert not bounds.is_informative(bounds.chernoff_min_samples_99(M, 1.0, N), M)
    assert bounds.bernstein_min_samples_99(M, N, UNIT, UNIT) == 99


def test_tau_uniform_profile_equals_mu():
    p = LeverageProfile.from_scores(np.full(100, 0.05))
    assert bounds.tau_bound(p) == pytest.approx(0.05, rel=1e-12)


@pytest.mark.parametrize("factor,expected", [
    (1, 1.00), (5, 1.01), (10, 1.04), (15, 1.10), (20, 1.19), (25, 1.30), (50, 2.22)])
def test_tau_spike_profile_table_values(factor, expected):
    tau = bounds.tau_bound(leverage_one_spike(M, N, factor * UNIT))
    assert tau / UNIT == pytest.approx(expected, abs=0.01)


def test_tau_spike_profile_at_hundred_times_minimal():
    # brute-force optimum of the same linear program; 2777 below needs this value
    p = leverage_one_spike(M, N, 100 * UNIT)
    tau = bounds.tau_bound(p)
    assert tau == pytest.approx(tau_bruteforce(p.scores), rel=1e-12)
    assert tau / UNIT == pytest.approx(5.9406, abs=1e-4)


def test_tau_zeros_profile_equals_mu():
    for factor in (1, 7, 100):
        mu = factor * UNIT
        assert bounds.tau_bound(leverage_many_zeros(M, N, mu)) == pytest.approx(mu, rel=1e-9)


def test_tau_integer_reciprocal_drops_remainder_term():
    p = LeverageProfile.from_scores([0.25] * 4 + [0.0] * 4 + [0.2] * 5)
    assert bounds.tau_bound(p) == pytest.approx(0.25 * 1.0)


@pytest.mark.parametrize("factor,expected", [
    (1, 96), (5, 191), (10, 310), (15, 432), (20, 556), (25, 682), (50, 1335), (100, 2777)])
def test_bernstein_spike_counts(factor, expected):
    mu = factor * UNIT
    tau = bounds.tau_bound(leverage_one_spike(M, N, mu))
    assert abs(bounds.bernstein_min_samples(M, N, mu, tau, DELTA, EPS) - expected) <= 2


@pytest.mark.parametrize("factor,expected", [
    (1, 96), (5, 477), (10, 954), (15, 1431), (20, 1908), (25, 2385), (50, 4770), (100, 9539)])
def test_bernstein_zeros_counts(factor, expected):
    mu = factor * UNIT
    tau = bounds.tau_bound(leverage_many_zeros(M, N, mu))
    assert abs(bounds.bernstein_min_samples(M, N, mu, tau, DELTA, EPS) - expected) <= 2


def test_bernstein_delta_properties():
    assert bounds.bernstein_delta(96, M, N, UNIT, UNIT, EPS) <= DELTA
    assert bounds.bernstein_delta(100, M, N, UNIT, UNIT, 1e-9) == pytest.approx(2 * N, rel=1e-6)
    ds = [bounds.bernstein_delta(c, M, N, UNIT, UNIT, 0.5) for c in range(10, 500, 25)]
    assert np.all(np.diff(ds) < 0)
    with pytest.raises(ValueError):
        bounds.bernstein_delta(100, M, N, 0.01, 0.5, 0.5)


def test_bernstein_epsilon_round_trip_and_bisection_oracle():
    mu, tau = 0.01, 0.004
    for c in (50, 500, 5000):
        eps = bounds.bernstein_epsilon(c, M, N, mu, tau, DELTA)
        if eps < 1:
            assert bounds.bernstein_delta(c, M, N, mu, tau, eps) == pytest.approx(DELTA, rel=1e-9)
        g = lambda e: 1.5 * c * e * e - math.log(2 * N / DELTA) * M * (3 * tau + e * mu)  # noqa: E731
        lo, hi = 0.0, 1e6
        for _ in range(200):
            mid = (lo + hi) / 2
            lo, hi = (mid, hi) if g(mid) < 0 else (lo, mid)
        assert eps == pytest.approx(hi, rel=1e-12)
    eps_seq = [bounds.bernstein_epsilon(c, M, N, mu, tau, DELTA) for c in (10, 100, 1000, 10**5)]
    assert all(a > b for a, b in zip(eps_seq, eps_seq[1:]))


def test_bernstein_min_samples_inverts_delta():
    mu, tau = 0.02, 0.003
    c = bounds.bernstein_min_samples_real(M, N, mu, tau, DELTA, 0.5)
    assert bounds.bernstein_delta(c, M, N, mu, tau, 0.5) == pytest.approx(DELTA, rel=1e-12)


def test_leverage_closed_form_much_smaller_for_spike():
    mu = 100 * UNIT
    tau = bounds.tau_bound(leverage_one_spike(M, N, mu))
    assert bounds.bernstein_min_samples_99(M, N, mu, tau) < 0.3 * bounds.chernoff_min_samples_99(M, mu, N)
    assert bounds.bernstein_min_samples_99(M, N, mu, mu) <= bounds.chernoff_min_samples_99(M, mu, N)


def test_compare_bounds():
    cmp = bounds.compare_bounds(M, N, UNIT, UNIT, DELTA, 0.5)
    assert cmp.ratio == pytest.approx((2 + 2 * 0.5 / 3) / 3)
    with pytest.raises(ValueError):
        bounds.compare_bounds(M, N, UNIT, UNIT, DELTA, 1.0)


def test_bound_results():
    r = bounds.chernoff_result(200, M, UNIT, N, DELTA)
    assert r.informative and r.kappa_bound == pytest.approx(bounds.kappa_bound(r.epsilon), rel=1e-12)
    assert not bounds.chernoff_result(50, M, UNIT, N, DELTA).informative
    r = bounds.bernstein_result(200, M, N, UNIT, UNIT, DELTA)
    assert r.informative and r.kind == bounds.BoundKind.BERNSTEIN_LEVERAGE
    assert not bounds.bernstein_result(10, M, N, UNIT, UNIT, DELTA).informative


def test_tau_dominates_exact_qtlq_norm():
    for build, factor in [(leverage_one_spike, 3), (leverage_many_zeros, 4), (leverage_one_spike, 40)]:
        prof = build(400, 3, factor * 3 / 400)
        q = generate_with_leverage(prof, mix=np.random.default_rng(factor))
        assert qtlq_norm(q) <= bounds.tau_bound(prof) + 1e-10


def test_scaled_norm_trivial_cases():
    m, n = 12, 3
    z = np.kron(np.ones((m // n, 1)), np.eye(n)) / math.sqrt(m / n)
    assert bounds.scaled_norm_bound(np.ones(m), 1.0, 1.0, n / m) == pytest.approx(1.0)
    q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((m, n)))
    lev = np.einsum("ij,ij->i", q, q)
    d = np.zeros(m)
    d[0] = 1.0
    mu = lev.max()
    assert bounds.scaled_norm_bound(d, 1.0, 1.0, mu) == pytest.approx(mu)
    exact = np.linalg.norm(d[:, None] * q, 2) ** 2
    assert exact == pytest.approx(lev[0]) and exact <= mu
    assert np.allclose(z.T @ z, np.eye(n))


def test_scaled_norm_domain_errors():
    with pytest.raises(ValueError):
        bounds.scaled_norm_bound([-1.0], 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        bounds.scaled_norm_bound([1.0], 1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        bounds.scaled_norm_bound([1.0], 1.0, 1.0, 0.0)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 5), st.integers(0, 15), st.integers(0, 2**32 - 1))
def test_scaled_norm_sandwich(n, extra, seed):
    rng = np.random.default_rng(seed)
    m = n + extra
    z = rng.standard_normal((m, n)) * rng.uniform(0.1, 3.0, size=n)
    d = np.abs(rng.standard_normal(m))
    sig = jacobi_singular_values(z)
    mu_z = float(np.einsum("ij,ij->i", z, z).max())
    bound = bounds.scaled_norm_bound(d, sig[0], sig[-1], mu_z)
    exact = jacobi_singular_values(d[:, None] * z)[0] ** 2
    assert exact <= bound * (1 + 1e-10) + 1e-12
    assert bound <= d.max() ** 2 * sig[0] ** 2 * (1 + 1e-10) + 1e-12


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 10**5), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.01, 0.99),
       st.floats(1e-6, 0.5))
def test_leverage_bound_never_worse(m, a, b, eps, delta):
    n = max(1, int(a * min(m, 50)))
    mu = n / m + b * (1 - n / m)
    tau = mu * mu + a * (mu - mu * mu)
    cmp = bounds.compare_bounds(m, n, mu, min(tau, mu), delta, eps)
    assert cmp.bernstein <= cmp.chernoff * (1 + 1e-12)
