"""Uniform row sampling of matrices with orthonormal columns.

Condition-number bounds for sampled matrices, generators for matrices with
prescribed leverage scores, a sampled-QR least-squares preconditioner and a
sweep harness. Hot kernels are compiled when available (see `kernels`).
"""
from . import bounds, generators, harness, kernels, linalg, matrix_io, precondition, sampling
from .bounds import (EPS_KAPPA10, bernstein_delta, bernstein_epsilon, bernstein_min_samples,
                     chernoff_delta, chernoff_epsilon, chernoff_min_samples, chernoff_onset,
                     kappa_bound, scaled_norm_bound, tau_bound)
from .generators import (generate_with_leverage, hadamard_structured, leverage_many_zeros,
                         leverage_one_spike, stacked_diagonal)
from .linalg import (LeverageProfile, OrthonormalBasis, coherence, condition_number,
                     leverage_scores, numerical_rank, singular_values, thin_qr)
from .precondition import build_preconditioner, preconditioned_kappa_pair, lsqr_solve, random_sign_hadamard
from .sampling import RngStream, SampleSelection, Strategy, apply_selection, sample

__version__ = "0.1.0"
