"""Nystrom low-rank factorization of the label-weighted kernel matrix.

Produces a factor V with Psi ~= V V^T from c sampled columns and a rank-r
spectral truncation of the sampled block, keeping the spectral pieces
(Q_r, d_r) needed later to recover sparse dual weights.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .eigen import DEFAULT_EIG_TOL, SymmetricMatrix, jacobi_evd, truncate_spectrum
from .errors import DimensionMismatchError, InvalidCountError, NoConvergenceError
from .kernel import kernel_columns


@dataclass(frozen=True)
class NystromConfig:
    """Sampling and truncation parameters; requires 1 <= r <= c."""

    c: int
    r: int
    seed: int = 0
    eig_tol: float = DEFAULT_EIG_TOL

    def __post_init__(self):
        if not 1 <= self.r <= self.c:
            raise InvalidCountError(f"need 1 <= r <= c, got r={self.r}, c={self.c}")

    def validate_against(self, n):
        if self.c > n:
            raise InvalidCountError(f"c={self.c} exceeds sample count N={n}")


@dataclass(frozen=True, eq=False)
class NystromFactor:
    """Rank factor ``v`` plus the sampled subset and retained spectral data.

    ``v`` has ``effective_rank`` columns, which is less than the requested
    rank when truncation dropped near-zero eigenvalues of the sampled block.
    """

    v: np.ndarray
    m: np.ndarray
    q_r: np.ndarray
    d_r: np.ndarray
    effective_rank: int


def sample_subset(n, c, seed):
    """Choose c distinct indices from range(n) uniformly, sorted ascending."""
    if c < 1 or c > n:
        raise InvalidCountError(f"need 1 <= c <= n, got c={c}, n={n}")
    rng = np.random.default_rng(seed)
    picked = rng.choice(n, size=c, replace=False)
    picked.sort()
    return picked


def nystrom_factor(X, y, params, cfg, subset=None):
    """Build the Nystrom factor for the label-weighted kernel matrix.

    Samples a subset M of size c (or uses the caller-provided ``subset``),
    eigendecomposes the sampled block, truncates its spectrum to rank r,
    and forms v = Psi[:, M] @ Q_r @ diag(d_r)^(-1/2).
    """
    x = np.asarray(X, dtype=float)
    n = x.shape[0]
    cfg.validate_against(n)
    if subset is None:
        m = sample_subset(n, cfg.c, cfg.seed)
    else:
        m = np.sort(np.asarray(subset, dtype=int))
        if m.shape[0] != cfg.c:
            raise InvalidCountError(f"explicit subset has {m.shape[0]} indices, cfg.c={cfg.c}")

    psi_cols = kernel_columns(x, y, params, m)
    psi_mm = SymmetricMatrix.from_array(psi_cols[m, :])
    evd = jacobi_evd(psi_mm)
    if not evd.converged:
        raise NoConvergenceError("eigendecomposition of the sampled kernel block did not converge")
    trunc = truncate_spectrum(evd, cfg.r, cfg.eig_tol)
    if trunc.rank_kept < cfg.r:
        warnings.warn(
            f"spectrum truncated to rank {trunc.rank_kept} (requested {cfg.r}): "
            "near-zero eigenvalues dropped",
            RuntimeWarning,
            stacklevel=2,
        )

    k = trunc.rank_kept
    q_r = evd.q[:, :k]
    d_r = evd.d[:k]
    v = psi_cols @ (q_r * trunc.inv_sqrt[None, :])
    for arr in (v, m, q_r, d_r):
        arr.flags.writeable = False
    return NystromFactor(v=v, m=m, q_r=q_r, d_r=d_r, effective_rank=int(k))


def approximation_mse(psi, factor):
    """Mean squared entry-wise error between Psi and v v^T."""
    entries = psi.entries
    n = entries.shape[0]
    if factor.v.shape[0] != n:
        raise DimensionMismatchError(
            f"factor covers {factor.v.shape[0]} samples, kernel matrix has {n}"
        )
    resid = entries - factor.v @ factor.v.T
    return float(np.sum(resid * resid) / (n * n))
