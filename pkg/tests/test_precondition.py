import numpy as np
import pytest
from scipy.linalg import qr as scipy_qr

from oracles import sylvester_hadamard
from rowsample import precondition as pc
from rowsample.linalg import coherence, condition_number, thin_qr
from rowsample.sampling import RngStream, SampleSelection, Strategy, sample


def ill_conditioned(m, n, cond, seed):
    rng = np.random.default_rng(seed)
    u, _ = np.linalg.qr(rng.standard_normal((m, n)))
    v, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return (u * np.logspace(0, np.log10(cond), n)) @ v.T


def test_next_pow2_and_padding():
    assert [pc.next_pow2(k) for k in (1, 2, 3, 5, 8, 9)] == [1, 2, 4, 8, 8, 16]
    p = pc.pad_rows(np.ones((3, 2)))
    assert p.shape == (4, 2) and np.all(p[3] == 0)
    with pytest.raises(ValueError):
        pc.pad_rows(np.ones((5, 1)), 4)


def test_transform_is_scaled_signed_hadamard():
    signs = np.array([1, -1, -1, 1, 1, 1, -1, 1.0])
    f = pc.random_sign_hadamard(np.eye(8), None, signs=signs)
    np.testing.assert_allclose(f, sylvester_hadamard(8) * signs / np.sqrt(8), atol=1e-15)
    np.testing.assert_allclose(f.T @ f, np.eye(8), atol=1e-12)


def test_transform_spreads_a_spike():
    e1 = np.zeros(8)
    e1[0] = 1.0
    out = pc.random_sign_hadamard(e1, None, signs=np.ones(8))
    np.testing.assert_allclose(out, np.full(8, 1 / np.sqrt(8)))


def test_transform_trivial_and_norm_preserving():
    assert abs(pc.random_sign_hadamard(np.array([[3.0]]), RngStream(0))[0, 0]) == 3.0
    a = np.random.default_rng(0).standard_normal((64, 3))
    fa = pc.random_sign_hadamard(a, RngStream(1))
    assert np.linalg.norm(fa) == pytest.approx(np.linalg.norm(a), rel=1e-12)


def test_transform_requires_power_of_two_unless_padding():
    with pytest.raises(ValueError):
        pc.random_sign_hadamard(np.ones((6, 2)), RngStream(0))
    assert pc.random_sign_hadamard(np.ones((6, 2)), RngStream(0), pad=True).shape == (8, 2)


def test_transform_preserves_least_squares_solution():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((100, 4))
    b = rng.standard_normal(100)
    signs = pc.random_signs(128, rng)
    fa = pc.random_sign_hadamard(a, None, pad=True, signs=signs)
    fb = pc.random_sign_hadamard(b, None, pad=True, signs=signs)
    x = np.linalg.lstsq(a, b, rcond=None)[0]
    np.testing.assert_allclose(np.linalg.lstsq(fa, fb, rcond=None)[0], x, rtol=1e-8)


def test_transform_lowers_coherence_of_adversarial_matrix():
    a = np.zeros((256, 4))
    a[:4, :4] = np.diag([1.0, 10.0, 100.0, 1000.0])
    q_before, _ = thin_qr(a)
    q_after, _ = thin_qr(pc.random_sign_hadamard(a, RngStream(3)))
    assert coherence(q_before.q) == 1.0
    assert coherence(q_after.q) == pytest.approx(4 / 256)


def test_full_sampling_gives_perfect_preconditioner():
    a = ill_conditioned(64, 4, 1e6, 0)
    r = pc.build_preconditioner(a, 64, Strategy.WITHOUT_REPLACEMENT, RngStream(1))
    assert pc.preconditioned_kappa(a, r) == pytest.approx(1.0, abs=1e-8)


def test_sampled_preconditioner_conditioning():
    ok = 0
    for t in range(30):
        a = ill_conditioned(256, 4, 1e5, t)
        r = pc.build_preconditioner(a, 64, Strategy.WITH_REPLACEMENT, RngStream(7, t))
        ok += pc.preconditioned_kappa(a, r) <= 10
    assert ok >= 29


def test_rank_deficient_sample_is_retryable():
    a = np.zeros((16, 2))
    a[0, 0] = a[1, 1] = 1.0
    with pytest.raises(pc.RankDeficientSample):
        pc.build_preconditioner(a, 2, Strategy.WITHOUT_REPLACEMENT, RngStream(0), transform=False,
                                max_retries=0)
    # with enough retries a lucky draw eventually picks rows 0 and 1
    r, sel = pc.build_preconditioner(a, 8, Strategy.WITHOUT_REPLACEMENT, RngStream(0), transform=False,
                                     max_retries=50, return_selection=True)
    assert {0, 1} <= set(sel.indices.tolist())
    with pytest.raises(ValueError):
        pc.build_preconditioner(a, 1, Strategy.WITH_REPLACEMENT, RngStream(0))


def test_kappa_pair_full_sampling():
    a = ill_conditioned(32, 3, 1e3, 1)
    sel = SampleSelection(Strategy.WITHOUT_REPLACEMENT, 32, np.arange(32), 1.0, 32)
    k1, k2 = pc.preconditioned_kappa_pair(a, sel, RngStream(0))
    assert k1 == pytest.approx(1.0, abs=1e-8) and k2 == pytest.approx(1.0, abs=1e-8)


def test_kappa_pair_random_pairs():
    gaps = []
    for t in range(100):
        a = ill_conditioned(128, 3, 1e4, 100 + t)
        sel = sample(Strategy.WITH_REPLACEMENT, 128, 32, RngStream(5, t))
        k1, k2 = pc.preconditioned_kappa_pair(a, sel, RngStream(6, t))
        gaps.append(abs(k1 - k2) / k2)
    assert max(gaps) <= 1e-8


def test_kappa_pair_identity_against_explicit_hadamard_rows():
    a = np.eye(8)[:, :2]
    signs = np.array([1, 1, -1, 1, -1, -1, 1, 1.0])
    sel = SampleSelection(Strategy.WITHOUT_REPLACEMENT, 8, [0, 3, 5], np.sqrt(8 / 3), 3)
    k1, k2 = pc.preconditioned_kappa_pair(a, sel, None, signs=signs)
    f = sylvester_hadamard(8) * signs / np.sqrt(8)
    q, _ = scipy_qr(f[:, :2], mode="economic")
    direct = condition_number(np.sqrt(8 / 3) * q[[0, 3, 5]])
    assert k1 == pytest.approx(direct, rel=1e-10) and k2 == pytest.approx(direct, rel=1e-10)


def test_kappa_pair_rank_deficient():
    a = np.eye(8)[:, :2]
    sel = SampleSelection(Strategy.WITH_REPLACEMENT, 8, [0, 0], 2.0, 2)
    with pytest.raises(pc.RankDeficientSample):
        pc.preconditioned_kappa_pair(a, sel, RngStream(0))


def test_lsqr_orthonormal_consistent_system():
    q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((50, 3)))
    x0 = np.array([1.0, -2.0, 0.5])
    res = pc.lsqr_solve(q, q @ x0)
    assert res.converged and res.iterations <= 2
    np.testing.assert_allclose(res.x, x0, atol=1e-12)


def test_lsqr_preconditioning_cuts_iterations():
    a = ill_conditioned(512, 6, 1e4, 3)
    b = np.random.default_rng(4).standard_normal(512)
    x_ref = scipy_qr(a, mode="economic")
    x_ref = np.linalg.solve(x_ref[1], x_ref[0].T @ b)
    r = pc.build_preconditioner(a, 64, Strategy.WITH_REPLACEMENT, RngStream(9))
    pre = pc.lsqr_solve(a, b, r)
    plain = pc.lsqr_solve(a, b, max_iter=500)
    assert pre.converged and pre.iterations <= 25
    assert plain.iterations > pre.iterations
    np.testing.assert_allclose(pre.x, x_ref, rtol=1e-8)
    resid = a @ pre.x - b
    assert np.linalg.norm(a.T @ resid) / (np.linalg.norm(a, 2) * np.linalg.norm(resid)) <= 1e-8


def test_lsqr_exhaustion_and_argument_checks():
    a = ill_conditioned(200, 6, 1e8, 5)
    b = np.random.default_rng(6).standard_normal(200)
    res = pc.lsqr_solve(a, b, max_iter=3)
    assert not res.converged and res.iterations == 3
    with pytest.raises(ValueError):
        pc.lsqr_solve(a, b[:-1])
    with pytest.raises(ValueError):
        pc.lsqr_solve(a, b, tol=0)
    zero = pc.lsqr_solve(a, np.zeros(200))
    assert zero.converged and not zero.x.any()


def test_lsqr_residual_norm_decreases():
    a = ill_conditioned(128, 5, 1e3, 7)
    b = np.random.default_rng(8).standard_normal(128)
    vals = []
    for k in range(1, 6):
        x = pc.lsqr_solve(a, b, tol=1e-300, max_iter=k).x
        vals.append(np.linalg.norm(a @ x - b))
    assert all(v2 <= v1 * (1 + 1e-12) for v1, v2 in zip(vals, vals[1:]))
