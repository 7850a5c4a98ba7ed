"""Linear SVM training by ADMM, with two equivalent solver paths.

The reference path iterates the textbook update (solve the regularized
normal-equation system, then soft-threshold the hinge auxiliary, then the
multiplier step), reusing a pre-computed inverse of the fixed system
matrix. The efficient path restates the same iteration around the
pre-computed matrix Z = Y X_tilde Q D^(-1/2), a scaled auxiliary a_hat and
the shared intermediate theta, so each pass is two thin matrix-vector
products plus element-wise work. Both paths produce identical multiplier
iterates; their auxiliaries are related by a_hat = rho * a.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .eigen import SymmetricMatrix, jacobi_evd, truncate_spectrum
from .errors import (
    NonFiniteError,
    RankDeficientError,
    SingleClassError,
)

DIVERGENCE_LIMIT = 1e12

PATH_EFFICIENT = "efficient"
PATH_REFERENCE = "reference"


@dataclass(frozen=True)
class AdmmConfig:
    """Solver hyperparameters; defaults follow the evaluated settings."""

    lambda_: float = 10.0
    rho: float = 1.0
    epsilon: float = 1e-6
    max_iters: int = 500
    path: str = PATH_EFFICIENT

    def __post_init__(self):
        if self.lambda_ <= 0 or self.rho <= 0 or self.epsilon <= 0:
            raise ValueError("lambda_, rho and epsilon must all be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.path not in (PATH_EFFICIENT, PATH_REFERENCE):
            raise ValueError(f"unknown solver path {self.path!r}")


@dataclass(frozen=True, eq=False)
class AugmentedDesign:
    """Feature matrix with an appended ones column, plus the +-1 labels."""

    x_tilde: np.ndarray
    y: np.ndarray

    @classmethod
    def from_features(cls, X, y):
        x = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 2 or y.shape != (x.shape[0],):
            raise ValueError(f"X shape {x.shape} incompatible with labels shape {y.shape}")
        if not np.all(np.isfinite(x)):
            raise NonFiniteError("features contain NaN or Inf")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")
        x_tilde = np.hstack([x, np.ones((x.shape[0], 1))])
        x_tilde.flags.writeable = False
        y = y.copy()
        y.flags.writeable = False
        return cls(x_tilde=x_tilde, y=y)

    @property
    def n(self):
        return self.x_tilde.shape[0]

    @property
    def p(self):
        return self.x_tilde.shape[1] - 1


@dataclass(frozen=True, eq=False)
class AdmmState:
    """Per-iteration solver variables (scaled auxiliary, multiplier, S, theta, B)."""

    a_hat: np.ndarray
    u: np.ndarray
    s: np.ndarray | None = None
    theta: np.ndarray | None = None
    b_vec: np.ndarray | None = None


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    u_residual: float | None = None
    beta_residual: float | None = None
    train_accuracy: float | None = None
    elapsed_ms: float | None = None
    objective: float | None = None


@dataclass
class ConvergenceTrace:
    """Append-only per-iteration history of residuals, accuracy and timing."""

    rows: list = field(default_factory=list)

    def append(self, row):
        self.rows.append(row)

    def __len__(self):
        return len(self.rows)

    def total_elapsed_ms(self):
        return sum(r.elapsed_ms or 0.0 for r in self.rows)

    def time_to_accuracy_ms(self, target):
        """Cumulative solver time at the first trace row reaching ``target``."""
        cum = 0.0
        for r in self.rows:
            cum += r.elapsed_ms or 0.0
            if r.train_accuracy is not None and r.train_accuracy >= target:
                return cum
        return None


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Trained hyperplane weights with the solver's convergence history."""

    beta: np.ndarray
    beta0: float
    trace: ConvergenceTrace
    converged: bool
    iterations: int


def soft_threshold(theta, delta):
    """Piecewise shrinkage: theta-delta above delta, 0 on [0, delta], theta below 0.

    Accepts scalars or arrays (applied element-wise in theta); delta is a
    non-negative scalar.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    th = np.asarray(theta, dtype=float)
    out = np.where(th > delta, th - delta, np.where(th < 0.0, th, 0.0))
    if th.ndim == 0:
        return float(out)
    return out


def build_system_matrix(design, lambda_, rho):
    """Assemble the fixed (p+1)x(p+1) system matrix of the beta update.

    Top-left block lambda*I + rho*X^T X, border rho*X^T 1, corner rho*N.
    The ridge term applies to the p feature rows only, never the bias row.
    """
    x = design.x_tilde[:, :-1]
    p = x.shape[1]
    a = np.empty((p + 1, p + 1))
    a[:p, :p] = lambda_ * np.eye(p) + rho * (x.T @ x)
    border = rho * x.sum(axis=0)
    a[:p, p] = border
    a[p, :p] = border
    a[p, p] = rho * design.n
    return SymmetricMatrix.from_array(a)


def precompute_z(design, evd, trunc):
    """Fold labels, design and the inverted system matrix into Z = Y X~ Q D^(-1/2).

    Z Z^T then equals Y X~ A^(-1) X~^T Y, the constant matrix the iteration
    applies each pass, but only N x (p+1) numbers are stored.
    """
    width = design.x_tilde.shape[1]
    if trunc.rank_kept < width:
        raise RankDeficientError(
            "system matrix is numerically singular; increase lambda or rho"
        )
    scaled_q = evd.q[:, :width] * trunc.inv_sqrt[None, :]
    return (design.y[:, None] * design.x_tilde) @ scaled_q


def initialize_state(n):
    """Cold start: zero scaled auxiliary and zero multiplier."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return AdmmState(a_hat=np.zeros(n), u=np.zeros(n))


def admm_step(z, state, rho):
    """Advance one iteration of the efficient path.

    In order: B = u + rho*1 - a_hat; S = Z^T B; theta = rho*1 + u - rho*Z*S;
    new a_hat = soft-threshold of theta at 1; new u = theta - a_hat.
    """
    b_vec = state.u + rho - state.a_hat
    s = z.T @ b_vec
    theta = rho + state.u - rho * (z @ s)
    a_hat = soft_threshold(theta, 1.0)
    u = theta - a_hat
    if not np.all(np.isfinite(u)) or np.abs(u).max() > DIVERGENCE_LIMIT:
        raise NonFiniteError("ADMM iterates diverged; check lambda and rho")
    return AdmmState(a_hat=a_hat, u=u, s=s, theta=theta, b_vec=b_vec)


def primal_objective(X, y, beta, beta0, lambda_):
    """Hinge loss plus ridge penalty at the given hyperplane."""
    x = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    margins = y * (x @ beta + beta0)
    return float(np.sum(np.maximum(1.0 - margins, 0.0)) + 0.5 * lambda_ * np.dot(beta, beta))


def _check_two_classes(y):
    if np.all(y > 0) or np.all(y < 0):
        raise SingleClassError("training data contains a single class")


def solve_linear(design, cfg, accuracy_fn=None):
    """Train a linear SVM with the configured ADMM path.

    ``accuracy_fn(beta, beta0)``, when given, is evaluated once per
    iteration (outside the timed solver work) and recorded in the trace.
    Returns the model flagged ``converged=False`` when the iteration cap
    is reached before the path's residual drops below epsilon.
    """
    if design.n < 2:
        raise ValueError("need at least two training samples")
    _check_two_classes(design.y)
    if cfg.path == PATH_EFFICIENT:
        return _solve_efficient(design, cfg, accuracy_fn)
    return _solve_reference(design, cfg, accuracy_fn)


def _solve_efficient(design, cfg, accuracy_fn):
    setup_start = time.perf_counter()
    a = build_system_matrix(design, cfg.lambda_, cfg.rho)
    evd = jacobi_evd(a)
    trunc = truncate_spectrum(evd, r=a.n, eig_tol=0.0)
    z = precompute_z(design, evd, trunc)
    recover = evd.q[:, : trunc.rank_kept] * trunc.inv_sqrt[None, :]
    setup_ms = (time.perf_counter() - setup_start) * 1e3

    state = initialize_state(design.n)
    trace = ConvergenceTrace()
    beta_tilde_prev = np.zeros(a.n)
    converged = False
    iterations = 0
    for k in range(1, cfg.max_iters + 1):
        tic = time.perf_counter()
        new_state = admm_step(z, state, cfg.rho)
        u_res = float(np.linalg.norm(new_state.u - state.u))
        beta_tilde = recover @ new_state.s
        beta_res = float(np.sum((beta_tilde - beta_tilde_prev) ** 2))
        elapsed_ms = (time.perf_counter() - tic) * 1e3
        if k == 1:
            elapsed_ms += setup_ms

        acc = accuracy_fn(beta_tilde[:-1], beta_tilde[-1]) if accuracy_fn else None
        trace.append(TraceRow(k, u_res, beta_res, acc, elapsed_ms))
        state = new_state
        beta_tilde_prev = beta_tilde
        iterations = k
        if u_res <= cfg.epsilon:
            converged = True
            break

    return LinearModel(
        beta=beta_tilde_prev[:-1],
        beta0=float(beta_tilde_prev[-1]),
        trace=trace,
        converged=converged,
        iterations=iterations,
    )


def _solve_reference(design, cfg, accuracy_fn):
    setup_start = time.perf_counter()
    a = build_system_matrix(design, cfg.lambda_, cfg.rho)
    a_inv = np.linalg.inv(a.entries)
    xt = design.x_tilde
    y = design.y
    setup_ms = (time.perf_counter() - setup_start) * 1e3

    n = design.n
    aux = np.zeros(n)
    u = np.zeros(n)
    beta_tilde = np.zeros(a.n)
    trace = ConvergenceTrace()
    converged = False
    iterations = 0
    inv_rho = 1.0 / cfg.rho
    for k in range(1, cfg.max_iters + 1):
        tic = time.perf_counter()
        rhs = xt.T @ (y * (u - cfg.rho * (aux - 1.0)))
        beta_new = a_inv @ rhs
        margin = y * (xt @ beta_new)
        aux = soft_threshold(1.0 + u * inv_rho - margin, inv_rho)
        u_new = u + cfg.rho * (1.0 - margin - aux)
        if not np.all(np.isfinite(u_new)) or np.abs(u_new).max() > DIVERGENCE_LIMIT:
            raise NonFiniteError("ADMM iterates diverged; check lambda and rho")
        u_res = float(np.linalg.norm(u_new - u))
        beta_res = float(np.sum((beta_new - beta_tilde) ** 2))
        elapsed_ms = (time.perf_counter() - tic) * 1e3
        if k == 1:
            elapsed_ms += setup_ms

        acc = accuracy_fn(beta_new[:-1], beta_new[-1]) if accuracy_fn else None
        trace.append(TraceRow(k, u_res, beta_res, acc, elapsed_ms))
        u = u_new
        beta_tilde = beta_new
        iterations = k
        if beta_res <= cfg.epsilon:
            converged = True
            break

    return LinearModel(
        beta=beta_tilde[:-1],
        beta0=float(beta_tilde[-1]),
        trace=trace,
        converged=converged,
        iterations=iterations,
    )
