"""Symmetric eigendecomposition via the cyclic Jacobi method.

One shared code path serves both consumers of eigendecompositions in this
package: the subset-kernel factorization in :mod:`admmsvm.nystrom` and the
inversion of the linear-solver system matrix in :mod:`admmsvm.admm`.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteError, RankDeficientError

DEFAULT_OFF_DIAG_TOL = 1e-12
DEFAULT_MAX_SWEEPS = 30
DEFAULT_EIG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    """A validated n-by-n real symmetric matrix.

    Construct through :meth:`from_array`, which rejects non-square or
    non-finite input and makes the stored entries exactly symmetric.
    """

    entries: np.ndarray

    @property
    def n(self):
        return self.entries.shape[0]

    @classmethod
    def from_array(cls, a, asym_tol=1e-8):
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise ValueError("matrix must be at least 1x1")
        if not np.all(np.isfinite(a)):
            raise NonFiniteError("matrix contains NaN or Inf entries")
        scale = max(1.0, float(np.abs(a).max()))
        if np.abs(a - a.T).max() > asym_tol * scale:
            raise ValueError("matrix is not symmetric within tolerance")
        # mirror the upper triangle so entries[i,j] == entries[j,i] exactly
        sym = np.triu(a) + np.triu(a, 1).T
        sym.flags.writeable = False
        return cls(entries=sym)


@dataclass(frozen=True, eq=False)
class EvdResult:
    """Eigenvectors (columns of ``q``), eigenvalues ``d`` sorted descending."""

    q: np.ndarray
    d: np.ndarray
    sweeps_used: int
    converged: bool

    @property
    def n(self):
        return self.d.shape[0]


@dataclass(frozen=True, eq=False)
class SpectralTruncation:
    """Leading part of a spectrum with its inverse and inverse-sqrt diagonals."""

    rank_kept: int
    inv_sqrt: np.ndarray
    inv: np.ndarray


def jacobi_evd(a, off_diag_tol=DEFAULT_OFF_DIAG_TOL, max_sweeps=DEFAULT_MAX_SWEEPS):
    """Diagonalize a symmetric matrix with cyclic-by-rows Givens rotations.

    Sweeps all (p, q) pairs in row order, zeroing one off-diagonal entry per
    rotation, until the off-diagonal Frobenius norm drops below
    ``off_diag_tol`` times the Frobenius norm of the input or ``max_sweeps``
    is exhausted. Returns a best-effort result flagged ``converged=False``
    in the latter case.

    Eigenpairs are sorted by descending eigenvalue (ties keep their original
    order) and each eigenvector's sign is fixed so its largest-magnitude
    entry is non-negative, making the output reproducible.
    """
    if not isinstance(a, SymmetricMatrix):
        a = SymmetricMatrix.from_array(a)
    if off_diag_tol <= 0:
        raise ValueError("off_diag_tol must be positive")
    if max_sweeps < 1:
        raise ValueError("max_sweeps must be at least 1")

    n = a.n
    work = a.entries.copy()
    vecs = np.eye(n)

    fro = float(np.linalg.norm(work))
    target = off_diag_tol * max(fro, np.finfo(float).tiny)
    # rotations on entries below this cannot keep the off-diagonal norm above
    # target, so skipping them is safe and saves late-sweep work
    skip = target / max(4.0 * n, 4.0)

    sweeps = 0
    converged = _off_diag_norm(work) <= target
    while not converged and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                if abs(apq) <= skip:
                    continue
                _rotate(work, vecs, p, q, apq)
        sweeps += 1
        converged = _off_diag_norm(work) <= target

    d = np.diag(work).copy()
    order = np.argsort(-d, kind="stable")
    d = d[order]
    q = vecs[:, order]

    # sign convention: largest-magnitude entry of each column non-negative
    anchor = np.argmax(np.abs(q), axis=0)
    flip = q[anchor, np.arange(n)] < 0
    q[:, flip] = -q[:, flip]

    d.flags.writeable = False
    q.flags.writeable = False
    return EvdResult(q=q, d=d, sweeps_used=sweeps, converged=bool(converged))


def _off_diag_norm(m):
    off = m.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _rotate(m, vecs, p, q, apq):
    # stable two-sided Givens rotation zeroing m[p, q]
    phi = 0.5 * math.atan2(2.0 * apq, m[q, q] - m[p, p])
    c = math.cos(phi)
    s = math.sin(phi)

    rp = m[p, :].copy()
    rq = m[q, :]
    m[p, :] = c * rp - s * rq
    m[q, :] = s * rp + c * rq

    cp = m[:, p].copy()
    cq = m[:, q]
    m[:, p] = c * cp - s * cq
    m[:, q] = s * cp + c * cq
    m[p, q] = 0.0
    m[q, p] = 0.0

    vp = vecs[:, p].copy()
    vq = vecs[:, q]
    vecs[:, p] = c * vp - s * vq
    vecs[:, q] = s * vp + c * vq


def truncate_spectrum(evd, r, eig_tol=DEFAULT_EIG_TOL):
    """Retain the leading ``r`` eigenvalues that exceed the relative tolerance.

    ``rank_kept`` counts eigenvalues among the first ``r`` that are larger
    than ``eig_tol * max(d[0], 1)``; the inverse and inverse-sqrt diagonals
    cover the retained entries only. Raises
    :class:`~admmsvm.errors.RankDeficientError` when even the largest
    eigenvalue is at or below ``eig_tol`` (no usable spectrum).
    """
    n = evd.n
    if not 1 <= r <= n:
        raise ValueError(f"rank r={r} must satisfy 1 <= r <= n={n}")
    if eig_tol < 0:
        raise ValueError("eig_tol must be non-negative")

    d = evd.d
    if d[0] <= eig_tol:
        raise RankDeficientError(
            f"largest eigenvalue {d[0]:.3e} is at or below eig_tol={eig_tol:.3e}"
        )
    threshold = eig_tol * max(d[0], 1.0)
    kept = d[:r][d[:r] > threshold]
    rank_kept = kept.shape[0]
    if rank_kept == 0:
        raise RankDeficientError("no eigenvalue among the first r exceeds the tolerance")
    inv = 1.0 / kept
    inv_sqrt = 1.0 / np.sqrt(kept)
    inv.flags.writeable = False
    inv_sqrt.flags.writeable = False
    return SpectralTruncation(rank_kept=int(rank_kept), inv_sqrt=inv_sqrt, inv=inv)
