"""Nystrom factorization: sampling, exactness, MSE behavior."""

import numpy as np
import pytest

from admmsvm.errors import DimensionMismatchError, InvalidCountError
from admmsvm.kernel import KernelParams, build_kernel_matrix
from admmsvm.nystrom import (
    NystromConfig,
    NystromFactor,
    approximation_mse,
    nystrom_factor,
    sample_subset,
)

PARAMS = KernelParams(-1.0)


def make_data(n, p=3, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, p))
    y = np.where(rng.standard_normal(n) > 0, 1.0, -1.0)
    return x, y


def test_full_selection_returns_all_indices():
    for seed in (0, 1, 99):
        np.testing.assert_array_equal(sample_subset(5, 5, seed), np.arange(5))


def test_sampling_deterministic_for_seed():
    np.testing.assert_array_equal(sample_subset(100, 10, 7), sample_subset(100, 10, 7))


def test_sampling_sorted_distinct():
    m = sample_subset(50, 20, 3)
    assert np.all(np.diff(m) > 0)
    assert m.min() >= 0 and m.max() < 50


def test_sampling_uniform_frequencies():
    # statistical oracle: each index appears with probability c/n = 0.1;
    # over 10^4 trials the frequency stays within 5 sigma of that
    trials = 10_000
    counts = np.zeros(100)
    for seed in range(trials):
        counts[sample_subset(100, 10, seed)] += 1
    freq = counts / trials
    sigma = np.sqrt(0.1 * 0.9 / trials)
    assert np.all(np.abs(freq - 0.1) <= 5 * sigma)


def test_sampling_count_validation():
    with pytest.raises(InvalidCountError):
        sample_subset(5, 0, 0)
    with pytest.raises(InvalidCountError):
        sample_subset(5, 6, 0)


def test_config_bounds():
    with pytest.raises(InvalidCountError):
        NystromConfig(c=2, r=3)
    with pytest.raises(InvalidCountError):
        NystromConfig(c=4, r=2).validate_against(3)


def test_exact_when_subset_covers_everything():
    x, y = make_data(6, seed=1)
    psi = build_kernel_matrix(x, y, PARAMS)
    factor = nystrom_factor(x, y, PARAMS, NystromConfig(c=6, r=6, seed=0, eig_tol=0.0))
    rel = np.linalg.norm(psi.entries - factor.v @ factor.v.T) / np.linalg.norm(psi.entries)
    assert rel <= 1e-8


def test_rank_one_matrix_reproduced_exactly():
    x = np.tile([[1.5, -0.5]], (6, 1))
    y = np.ones(6)
    psi = build_kernel_matrix(x, y, PARAMS)
    with pytest.warns(RuntimeWarning):
        # the 6x6 matrix of ones is rank 1, so any r > 1 triggers truncation
        factor = nystrom_factor(x, y, PARAMS, NystromConfig(c=2, r=2, seed=0))
    assert factor.effective_rank == 1
    np.testing.assert_allclose(factor.v @ factor.v.T, psi.entries, atol=1e-10)


def test_factor_matches_its_defining_product():
    from admmsvm.kernel import kernel_columns

    x, y = make_data(20, seed=4)
    factor = nystrom_factor(x, y, PARAMS, NystromConfig(c=8, r=5, seed=2))
    cols = kernel_columns(x, y, PARAMS, factor.m)
    expected = cols @ factor.q_r @ np.diag(1.0 / np.sqrt(factor.d_r))
    rel = np.linalg.norm(factor.v - expected) / max(np.linalg.norm(expected), 1.0)
    assert rel <= 1e-8


def test_factor_deterministic():
    x, y = make_data(15, seed=6)
    cfg = NystromConfig(c=6, r=4, seed=11)
    f1 = nystrom_factor(x, y, PARAMS, cfg)
    f2 = nystrom_factor(x, y, PARAMS, cfg)
    np.testing.assert_array_equal(f1.v, f2.v)
    np.testing.assert_array_equal(f1.m, f2.m)


def test_approximation_is_positive_semidefinite():
    x, y = make_data(12, seed=8)
    factor = nystrom_factor(x, y, PARAMS, NystromConfig(c=6, r=4, seed=1))
    smallest = np.linalg.eigvalsh(factor.v @ factor.v.T).min()
    assert smallest >= -1e-8


def test_mse_zero_for_exact_factor():
    x, y = make_data(6, seed=2)
    psi = build_kernel_matrix(x, y, PARAMS)
    factor = nystrom_factor(x, y, PARAMS, NystromConfig(c=6, r=6, seed=0, eig_tol=0.0))
    assert approximation_mse(psi, factor) <= 1e-12


def test_mse_of_zero_factor_is_mean_square_entry():
    x, y = make_data(5, seed=3)
    psi = build_kernel_matrix(x, y, PARAMS)
    empty = NystromFactor(
        v=np.zeros((5, 0)), m=np.arange(0), q_r=np.zeros((0, 0)),
        d_r=np.zeros(0), effective_rank=0,
    )
    assert approximation_mse(psi, empty) == pytest.approx(np.mean(psi.entries**2))


def test_mse_matches_double_loop():
    x, y = make_data(10, seed=5)
    psi = build_kernel_matrix(x, y, PARAMS)
    factor = nystrom_factor(x, y, PARAMS, NystromConfig(c=5, r=3, seed=4))
    approx = factor.v @ factor.v.T
    total = 0.0
    for i in range(10):
        for j in range(10):
            total += (psi.entries[i, j] - approx[i, j]) ** 2
    assert approximation_mse(psi, factor) == pytest.approx(total / 100.0)


def test_mse_dimension_mismatch():
    x, y = make_data(6, seed=2)
    psi = build_kernel_matrix(x, y, PARAMS)
    factor = nystrom_factor(*make_data(8, seed=2), PARAMS, NystromConfig(c=4, r=4, seed=0))
    with pytest.raises(DimensionMismatchError):
        approximation_mse(psi, factor)


def test_mean_mse_improves_with_subset_size():
    # qualitative trend: larger c = r gives a better approximation on average
    x, y = make_data(64, p=4, seed=10)
    psi = build_kernel_matrix(x, y, PARAMS)
    means = []
    for c in (8, 16, 32, 64):
        vals = [
            approximation_mse(
                psi, nystrom_factor(x, y, PARAMS, NystromConfig(c=c, r=c, seed=s, eig_tol=0.0))
            )
            for s in range(20)
        ]
        means.append(np.mean(vals))
    assert all(means[i + 1] <= means[i] for i in range(3))


def test_full_spectral_rank_beats_half_for_fixed_subset():
    x, y = make_data(64, p=4, seed=12)
    psi = build_kernel_matrix(x, y, PARAMS)
    for c in (16, 32):
        full = np.mean([
            approximation_mse(
                psi, nystrom_factor(x, y, PARAMS, NystromConfig(c=c, r=c, seed=s, eig_tol=0.0))
            )
            for s in range(20)
        ])
        half = np.mean([
            approximation_mse(
                psi, nystrom_factor(x, y, PARAMS, NystromConfig(c=c, r=c // 2, seed=s, eig_tol=0.0))
            )
            for s in range(20)
        ])
        assert full <= half


def test_explicit_subset_override():
    x, y = make_data(12, seed=13)
    subset = np.array([1, 4, 7, 9])
    factor = nystrom_factor(x, y, PARAMS, NystromConfig(c=4, r=4, seed=0), subset=subset)
    np.testing.assert_array_equal(factor.m, subset)
