"""Nonlinear SVM training via the rank-reduced reformulation.

Training builds the Nystrom factor V of the label-weighted kernel matrix,
solves the induced linear problem on Y V with the ADMM solver, then
recovers the sparse dual weights on the sampled subset. Inference sums the
RBF kernel over the stored support entries only.
"""

import json
import struct
from dataclasses import dataclass

import numpy as np

from .admm import AugmentedDesign, ConvergenceTrace, solve_linear
from .errors import DimensionMismatchError, MalformedModelFileError
from .kernel import KernelParams, build_kernel_matrix
from .nystrom import approximation_mse, nystrom_factor

SUPPORT_DROP_TOL = 1e-12

_MAGIC = b"ADMMSVM\x00"
_VERSION = 1
_JSON_FORMAT = "admmsvm-model"


@dataclass(frozen=True, eq=False)
class NonlinearModel:
    """Support entries (index, alpha*y, label, features), bias and kernel.

    ``alpha_weighted`` stores the products alpha_i * y_i that the decision
    function sums; the raw multiplier is ``alpha_weighted * label``.
    """

    indices: np.ndarray
    alpha_weighted: np.ndarray
    labels: np.ndarray
    features: np.ndarray
    bias: float
    kernel: KernelParams

    @property
    def n_support(self):
        return self.indices.shape[0]

    @property
    def p(self):
        return self.features.shape[1]


@dataclass(frozen=True, eq=False)
class TrainReport:
    model: NonlinearModel
    trace: ConvergenceTrace
    train_accuracy: float
    converged: bool
    effective_rank: int
    nystrom_mse: float | None = None


def train_nonlinear(X, y, kernel, nys, admm, subset=None, compute_mse=False,
                    track_accuracy=False):
    """Train a nonlinear SVM through the low-rank linear reformulation.

    Steps: Nystrom factor V; linear ADMM solve on the design Y V; recovery
    of the dual weights on the sampled subset as Q_r D_r^(-1/2) w; support
    entries below ``SUPPORT_DROP_TOL`` in magnitude are dropped.
    """
    x = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    factor = nystrom_factor(x, y, kernel, nys, subset=subset)
    design = AugmentedDesign.from_features(y[:, None] * factor.v, y)

    accuracy_fn = None
    if track_accuracy:
        def accuracy_fn(eta, bias):
            pred = np.where(factor.v @ eta + bias >= 0.0, 1.0, -1.0)
            return float(np.mean(pred == y))

    linear = solve_linear(design, admm, accuracy_fn=accuracy_fn)

    alpha_subset = factor.q_r @ (linear.beta / np.sqrt(factor.d_r))
    keep = np.abs(alpha_subset) > SUPPORT_DROP_TOL
    idx = factor.m[keep]
    labels = y[idx]
    model = NonlinearModel(
        indices=idx.copy(),
        alpha_weighted=alpha_subset[keep] * labels,
        labels=labels.copy(),
        features=x[idx].copy(),
        bias=linear.beta0,
        kernel=kernel,
    )

    train_accuracy = _batch_accuracy(model, x, y)
    mse = None
    if compute_mse:
        mse = approximation_mse(build_kernel_matrix(x, y, kernel), factor)
    return TrainReport(
        model=model,
        trace=linear.trace,
        train_accuracy=train_accuracy,
        converged=linear.converged,
        effective_rank=factor.effective_rank,
        nystrom_mse=mse,
    )


def decision_value(model, x):
    """Raw margin: sum of alpha_i y_i k(x_i, x) over support entries, plus bias."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or (model.n_support > 0 and x.shape[0] != model.p):
        raise DimensionMismatchError(
            f"query vector shape {x.shape} does not match model dimension {model.p}"
        )
    if model.n_support == 0:
        return float(model.bias)
    diff = model.features - x[None, :]
    k = np.exp(model.kernel.gamma * np.sum(diff * diff, axis=1))
    return float(np.dot(model.alpha_weighted, k) + model.bias)


def decision_values(model, X):
    """Vectorized decision_value over the rows of X."""
    x = np.asarray(X, dtype=float)
    if x.ndim != 2 or (model.n_support > 0 and x.shape[1] != model.p):
        raise DimensionMismatchError(
            f"query matrix shape {x.shape} does not match model dimension {model.p}"
        )
    if model.n_support == 0:
        return np.full(x.shape[0], model.bias)
    diff = x[:, None, :] - model.features[None, :, :]
    k = np.exp(model.kernel.gamma * np.sum(diff * diff, axis=2))
    return k @ model.alpha_weighted + model.bias


def predict_nonlinear(model, x):
    """Label from the sign of the decision value; ties go to +1."""
    return 1 if decision_value(model, x) >= 0.0 else -1


def predict_linear(model, x):
    """Linear-model label from sign(x . beta + beta0); ties go to +1."""
    x = np.asarray(x, dtype=float)
    if x.shape != model.beta.shape:
        raise DimensionMismatchError(
            f"query vector shape {x.shape} does not match weights shape {model.beta.shape}"
        )
    return 1 if float(x @ model.beta + model.beta0) >= 0.0 else -1


def _batch_accuracy(model, x, y):
    pred = np.where(decision_values(model, x) >= 0.0, 1.0, -1.0)
    return float(np.mean(pred == y))


def kernel_objective(X, y, kernel, alpha, b, lambda_):
    """Hinge-plus-penalty objective of the kernel formulation at (alpha, b)."""
    psi = build_kernel_matrix(X, y, kernel).entries
    y = np.asarray(y, dtype=float)
    margins = psi @ alpha + y * b
    hinge = np.sum(np.maximum(1.0 - margins, 0.0))
    return float(hinge + 0.5 * lambda_ * alpha @ psi @ alpha)


def alpha_vector(model, n):
    """Dense length-n multiplier vector (zeros off the support)."""
    alpha = np.zeros(n)
    alpha[model.indices] = model.alpha_weighted * model.labels
    return alpha


def save_model(model, sink, fmt="binary"):
    """Persist a model to ``sink`` (a path) in binary or JSON form."""
    if fmt == "binary":
        blob = _to_binary(model)
        with open(sink, "wb") as fh:
            fh.write(blob)
    elif fmt == "json":
        with open(sink, "w", encoding="utf-8") as fh:
            json.dump(_to_json_dict(model), fh)
    else:
        raise ValueError(f"unknown model format {fmt!r}")


def load_model(source):
    """Load a model saved by :func:`save_model`; sniffs binary vs JSON."""
    with open(source, "rb") as fh:
        blob = fh.read()
    if blob[:1] == b"{":
        try:
            payload = json.loads(blob.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise MalformedModelFileError(f"invalid JSON model file: {exc}") from exc
        return _from_json_dict(payload)
    return _from_binary(blob)


def _to_binary(model):
    head = struct.pack(
        "<8sIddII",
        _MAGIC,
        _VERSION,
        model.kernel.gamma,
        model.bias,
        model.n_support,
        model.p,
    )
    parts = [head]
    for i in range(model.n_support):
        parts.append(
            struct.pack(
                f"<IdB{model.p}d",
                int(model.indices[i]),
                float(model.alpha_weighted[i]),
                1 if model.labels[i] > 0 else 0,
                *model.features[i],
            )
        )
    return b"".join(parts)


def _from_binary(blob):
    head_size = struct.calcsize("<8sIddII")
    if len(blob) < head_size:
        raise MalformedModelFileError("model file truncated in header")
    magic, version, gamma, bias, n_support, p = struct.unpack_from("<8sIddII", blob)
    if magic != _MAGIC:
        raise MalformedModelFileError("bad magic header; not an admmsvm model file")
    if version != _VERSION:
        raise MalformedModelFileError(f"unsupported model format version {version}")
    entry_fmt = f"<IdB{p}d"
    entry_size = struct.calcsize(entry_fmt)
    expected = head_size + n_support * entry_size
    if len(blob) != expected:
        raise MalformedModelFileError(
            f"model file has {len(blob)} bytes, expected {expected}"
        )
    indices = np.empty(n_support, dtype=int)
    alpha_weighted = np.empty(n_support)
    labels = np.empty(n_support)
    features = np.empty((n_support, p))
    offset = head_size
    for i in range(n_support):
        fields = struct.unpack_from(entry_fmt, blob, offset)
        indices[i] = fields[0]
        alpha_weighted[i] = fields[1]
        labels[i] = 1.0 if fields[2] else -1.0
        features[i] = fields[3:]
        offset += entry_size
    return NonlinearModel(
        indices=indices,
        alpha_weighted=alpha_weighted,
        labels=labels,
        features=features,
        bias=bias,
        kernel=KernelParams(gamma=gamma),
    )


def _to_json_dict(model):
    return {
        "format": _JSON_FORMAT,
        "version": _VERSION,
        "gamma": model.kernel.gamma,
        "bias": model.bias,
        "support": [
            {
                "index": int(model.indices[i]),
                "alpha_weighted": float(model.alpha_weighted[i]),
                "label": int(model.labels[i]),
                "features": [float(v) for v in model.features[i]],
            }
            for i in range(model.n_support)
        ],
    }


def _from_json_dict(payload):
    try:
        if payload["format"] != _JSON_FORMAT:
            raise MalformedModelFileError(f"unknown model format {payload['format']!r}")
        if payload["version"] != _VERSION:
            raise MalformedModelFileError(f"unsupported model version {payload['version']}")
        support = payload["support"]
        n = len(support)
        p = len(support[0]["features"]) if n else 0
        indices = np.array([e["index"] for e in support], dtype=int)
        alpha_weighted = np.array([e["alpha_weighted"] for e in support])
        labels = np.array([float(e["label"]) for e in support])
        features = np.array([e["features"] for e in support]).reshape(n, p)
        return NonlinearModel(
            indices=indices,
            alpha_weighted=alpha_weighted,
            labels=labels,
            features=features,
            bias=float(payload["bias"]),
            kernel=KernelParams(gamma=float(payload["gamma"])),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise MalformedModelFileError(f"model JSON missing or malformed field: {exc}") from exc
