"""RBF kernel and label-weighted kernel matrix construction."""

import math

import numpy as np
import pytest

from admmsvm.errors import DimensionMismatchError, DuplicateIndexError, IndexOutOfRangeError
from admmsvm.kernel import KernelParams, build_kernel_matrix, kernel_columns, rbf


def toy_set(seed=0, n=4, p=2):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, p))
    y = np.where(rng.standard_normal(n) > 0, 1.0, -1.0)
    if np.all(y == y[0]):
        y[0] = -y[0]
    return x, y


def brute_force_psi(x, y, params):
    n = x.shape[0]
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = y[i] * y[j] * rbf(x[i], x[j], params)
    return out


def test_rbf_same_point_is_one():
    params = KernelParams(-2.5)
    v = np.array([0.3, -1.2, 4.0])
    assert rbf(v, v, params) == 1.0


def test_rbf_unit_distance():
    assert rbf([0.0], [1.0], KernelParams(-1.0)) == pytest.approx(math.exp(-1.0))


def test_rbf_two_dim_distance():
    assert rbf([1.0, 1.0], [0.0, 0.0], KernelParams(-0.5)) == pytest.approx(math.exp(-1.0))


def test_rbf_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        rbf([1.0, 2.0], [1.0], KernelParams(-1.0))


def test_gamma_must_be_negative():
    with pytest.raises(ValueError):
        KernelParams(0.5)
    with pytest.raises(ValueError):
        KernelParams(0.0)


def test_single_sample_matrix():
    psi = build_kernel_matrix(np.array([[3.0, 1.0]]), np.array([1.0]), KernelParams(-1.0))
    np.testing.assert_array_equal(psi.entries, [[1.0]])


def test_identical_samples_opposite_labels():
    x = np.array([[2.0, 2.0], [2.0, 2.0]])
    psi = build_kernel_matrix(x, np.array([1.0, -1.0]), KernelParams(-1.0))
    np.testing.assert_array_equal(psi.entries, [[1.0, -1.0], [-1.0, 1.0]])


def test_matches_brute_force_double_loop():
    x, y = toy_set()
    params = KernelParams(-1.0)
    psi = build_kernel_matrix(x, y, params)
    np.testing.assert_array_equal(psi.entries, brute_force_psi(x, y, params))


def test_exactly_symmetric_and_unit_diagonal():
    x, y = toy_set(seed=5, n=17, p=6)
    psi = build_kernel_matrix(x, y, KernelParams(-0.3))
    assert np.array_equal(psi.entries, psi.entries.T)
    assert np.all(np.diag(psi.entries) == 1.0)
    assert np.abs(psi.entries).max() <= 1.0


def test_columns_full_selection_equals_matrix():
    x, y = toy_set(seed=2, n=9, p=3)
    params = KernelParams(-0.8)
    psi = build_kernel_matrix(x, y, params)
    cols = kernel_columns(x, y, params, np.arange(9))
    np.testing.assert_array_equal(cols, psi.entries)


def test_single_column_has_unit_row():
    x, y = toy_set(seed=3, n=6, p=2)
    cols = kernel_columns(x, y, KernelParams(-1.0), [4])
    assert cols.shape == (6, 1)
    assert cols[4, 0] == 1.0


def test_random_columns_match_full_matrix_exactly():
    x, y = toy_set(seed=4, n=4, p=2)
    params = KernelParams(-1.0)
    psi = build_kernel_matrix(x, y, params)
    m = np.array([2, 0, 3])
    cols = kernel_columns(x, y, params, m)
    np.testing.assert_array_equal(cols, psi.entries[:, m])


def test_columns_match_on_larger_instance():
    x, y = toy_set(seed=6, n=40, p=11)
    params = KernelParams(-0.2)
    psi = build_kernel_matrix(x, y, params)
    rng = np.random.default_rng(1)
    m = rng.choice(40, size=13, replace=False)
    np.testing.assert_array_equal(kernel_columns(x, y, params, m), psi.entries[:, m])


def test_column_index_validation():
    x, y = toy_set()
    with pytest.raises(IndexOutOfRangeError):
        kernel_columns(x, y, KernelParams(-1.0), [0, 4])
    with pytest.raises(DuplicateIndexError):
        kernel_columns(x, y, KernelParams(-1.0), [1, 1])


def test_bad_labels_rejected():
    x, _ = toy_set()
    with pytest.raises(ValueError):
        build_kernel_matrix(x, np.array([1.0, 2.0, -1.0, 1.0]), KernelParams(-1.0))
