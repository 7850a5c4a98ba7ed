"""RBF kernel evaluation and the label-weighted kernel matrix.

The Gaussian kernel here follows the convention k(xi, xj) =
exp(gamma * ||xi - xj||^2) with gamma strictly negative, and the
label-weighted matrix has entries y_i * y_j * k(x_i, x_j).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, DuplicateIndexError, IndexOutOfRangeError

_BLOCK_ROWS = 256


@dataclass(frozen=True)
class KernelParams:
    """RBF decay rate; gamma must be negative."""

    gamma: float

    def __post_init__(self):
        if not np.isfinite(self.gamma) or self.gamma >= 0:
            raise ValueError(f"gamma must be a finite negative value, got {self.gamma}")


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Label-weighted N-by-N kernel matrix; symmetric with unit diagonal."""

    entries: np.ndarray

    @property
    def n(self):
        return self.entries.shape[0]


def rbf(xi, xj, params):
    """Evaluate exp(gamma * ||xi - xj||^2) for one pair of feature vectors."""
    xi = np.asarray(xi, dtype=float)
    xj = np.asarray(xj, dtype=float)
    if xi.shape != xj.shape or xi.ndim != 1:
        raise DimensionMismatchError(
            f"feature vectors must share one shape, got {xi.shape} and {xj.shape}"
        )
    diff = xi - xj
    return float(np.exp(params.gamma * np.sum(diff * diff, axis=-1)))


def _sqdist_block(a, b):
    # direct per-pair squared distance, summed along the feature axis; both
    # the full matrix and column-slice paths go through this same expression
    # so their entries agree bitwise
    diff = a[:, None, :] - b[None, :, :]
    return np.sum(diff * diff, axis=-1)


def _weighted_kernel_block(x_rows, y_rows, x_cols, y_cols, gamma):
    out = np.empty((x_rows.shape[0], x_cols.shape[0]))
    for start in range(0, x_rows.shape[0], _BLOCK_ROWS):
        stop = min(start + _BLOCK_ROWS, x_rows.shape[0])
        out[start:stop] = np.exp(gamma * _sqdist_block(x_rows[start:stop], x_cols))
    out *= y_rows[:, None]
    out *= y_cols[None, :]
    return out


def _check_samples(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2:
        raise DimensionMismatchError(f"X must be 2-D, got shape {x.shape}")
    if y.shape != (x.shape[0],):
        raise DimensionMismatchError(
            f"labels shape {y.shape} does not match {x.shape[0]} samples"
        )
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    return x, y


def build_kernel_matrix(X, y, params):
    """Assemble the full label-weighted kernel matrix.

    The upper triangle is computed and mirrored, so the result is exactly
    symmetric; the diagonal is exactly 1 since ||x - x|| = 0 and y_i^2 = 1.
    """
    x, y = _check_samples(X, y)
    psi = _weighted_kernel_block(x, y, x, y, params.gamma)
    psi = np.triu(psi) + np.triu(psi, 1).T
    np.fill_diagonal(psi, 1.0)
    psi.flags.writeable = False
    return KernelMatrix(entries=psi)


def kernel_columns(X, y, params, M):
    """Columns M of the full kernel matrix, without N-by-N storage.

    Column j of the result equals column M[j] of
    ``build_kernel_matrix(X, y, params)`` exactly.
    """
    x, y = _check_samples(X, y)
    n = x.shape[0]
    m = np.asarray(M, dtype=int)
    if m.ndim != 1 or m.shape[0] == 0:
        raise ValueError("M must be a non-empty 1-D index list")
    if np.any(m < 0) or np.any(m >= n):
        raise IndexOutOfRangeError(f"subset indices must lie in [0, {n})")
    if np.unique(m).shape[0] != m.shape[0]:
        raise DuplicateIndexError("subset indices must be distinct")
    cols = _weighted_kernel_block(x, y, x[m], y[m], params.gamma)
    # entries on the sampled diagonal are k(x, x) = 1 exactly
    cols[m, np.arange(m.shape[0])] = 1.0
    return cols
