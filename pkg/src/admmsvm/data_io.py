"""Dataset ingestion, label normalization, feature scaling and splitting.

Supports delimited text, the sparse "label idx:val" text format with
1-based ascending indices, and raw IDX image/label files (big-endian dims,
unsigned bytes) as a utility for exporting MNIST-style data.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientClassSamplesError,
    MissingValueError,
    NonAscendingIndexError,
    NotBinaryError,
    ParseError,
)

SCALE_MINMAX = "minmax"
SCALE_ZSCORE = "zscore"
SCALE_NONE = "none"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix with +-1 labels."""

    x: np.ndarray
    y: np.ndarray
    feature_names: list | None = None

    def __post_init__(self):
        if self.x.ndim != 2 or self.x.shape[0] < 1 or self.x.shape[1] < 1:
            raise ValueError(f"features must be a non-empty 2-D matrix, got {self.x.shape}")
        if self.y.shape != (self.x.shape[0],):
            raise ValueError("label count does not match sample count")
        if not np.all(np.isfinite(self.x)):
            raise ValueError("features contain NaN or Inf")
        if not np.all(np.isin(self.y, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def p(self):
        return self.x.shape[1]


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie strictly between 0 and 1")


@dataclass(frozen=True, eq=False)
class ScalingRecord:
    """Per-feature affine transform x' = (x - offset) / scale."""

    mode: str
    offset: np.ndarray
    scale: np.ndarray

    def apply(self, x):
        return (np.asarray(x, dtype=float) - self.offset) / self.scale

    def invert(self, x):
        return np.asarray(x, dtype=float) * self.scale + self.offset

    def to_dict(self):
        return {"mode": self.mode, "offset": self.offset.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, payload):
        return cls(
            mode=payload["mode"],
            offset=np.asarray(payload["offset"], dtype=float),
            scale=np.asarray(payload["scale"], dtype=float),
        )


def _normalize_labels(raw):
    """Map two distinct raw label values onto -1/+1 (smaller raw value -> -1)."""
    distinct = sorted(set(raw))
    if len(distinct) > 2:
        raise NotBinaryError(f"expected at most 2 label values, found {len(distinct)}")
    if len(distinct) == 1:
        try:
            only = float(distinct[0])
        except ValueError:
            only = None
        if only in (-1.0, 1.0):
            return np.full(len(raw), only)
        raise NotBinaryError("a single non +-1 label value cannot be normalized")
    try:
        keyed = sorted(distinct, key=float)
    except ValueError:
        keyed = distinct  # lexicographic for non-numeric labels
    mapping = {keyed[0]: -1.0, keyed[1]: 1.0}
    return np.array([mapping[v] for v in raw])


def load_delimited(path, label_column, delimiter=",", header="auto"):
    """Parse a delimited text file into a dataset.

    ``label_column`` indexes the label cell of each row (negative indices
    count from the end). With ``header="auto"`` a first row whose feature
    cells do not all parse as numbers is treated as column names.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    rows = [(i + 1, ln.split(delimiter)) for i, ln in enumerate(lines) if ln.strip()]
    if not rows:
        raise ParseError(f"{path}: no data rows")

    width = len(rows[0][1])
    label_idx = label_column if label_column >= 0 else width + label_column
    if not 0 <= label_idx < width:
        raise ParseError(f"{path}: label column {label_column} outside row width {width}")

    feature_names = None
    if header == "auto":
        has_header = not _feature_cells_numeric(rows[0][1], label_idx)
    else:
        has_header = bool(header)
    if has_header:
        feature_names = [c for j, c in enumerate(rows[0][1]) if j != label_idx]
        rows = rows[1:]
        if not rows:
            raise ParseError(f"{path}: header but no data rows")

    features = []
    raw_labels = []
    for lineno, cells in rows:
        if len(cells) != width:
            raise ParseError(f"{path}: inconsistent column count", line=lineno)
        row = []
        for j, cell in enumerate(cells):
            if j == label_idx:
                continue
            cell = cell.strip()
            if not cell:
                raise MissingValueError(f"{path}: empty feature cell at line {lineno}, column {j}")
            try:
                row.append(float(cell))
            except ValueError:
                raise ParseError(
                    f"{path}: non-numeric feature value {cell!r}", line=lineno, column=j
                ) from None
        features.append(row)
        raw_labels.append(cells[label_idx].strip())

    y = _normalize_labels(raw_labels)
    return Dataset(x=np.array(features, dtype=float), y=y, feature_names=feature_names)


def load_delimited_features(path, delimiter=","):
    """Parse a label-free delimited file into a plain feature matrix."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    rows = [(i + 1, ln.split(delimiter)) for i, ln in enumerate(lines) if ln.strip()]
    if not rows:
        raise ParseError(f"{path}: no data rows")
    if not _feature_cells_numeric(rows[0][1], label_idx=None):
        rows = rows[1:]
    features = []
    for lineno, cells in rows:
        try:
            features.append([float(c) for c in cells])
        except ValueError:
            raise ParseError(f"{path}: non-numeric value", line=lineno) from None
    return np.array(features, dtype=float)


def _feature_cells_numeric(cells, label_idx):
    for j, cell in enumerate(cells):
        if j == label_idx:
            continue
        try:
            float(cell)
        except ValueError:
            return False
    return True


def save_delimited(ds, path, delimiter=","):
    """Write features plus a trailing label column; inverse of load_delimited."""
    with open(path, "w", encoding="utf-8") as fh:
        if ds.feature_names is not None:
            fh.write(delimiter.join([*ds.feature_names, "label"]) + "\n")
        for i in range(ds.n):
            cells = [repr(v) for v in ds.x[i]] + [repr(ds.y[i])]
            fh.write(delimiter.join(cells) + "\n")


def load_sparse_text(path):
    """Parse "<label> <idx>:<val> ..." lines with 1-based ascending indices."""
    raw_labels = []
    sparse_rows = []
    max_idx = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = line.split()
            raw_labels.append(tokens[0])
            pairs = []
            prev = 0
            for tok in tokens[1:]:
                if ":" not in tok:
                    raise ParseError(f"{path}: expected idx:val, got {tok!r}", line=lineno)
                idx_s, val_s = tok.split(":", 1)
                try:
                    idx = int(idx_s)
                    val = float(val_s)
                except ValueError:
                    raise ParseError(f"{path}: bad idx:val pair {tok!r}", line=lineno) from None
                if idx < 1:
                    raise ParseError(f"{path}: indices are 1-based, got {idx}", line=lineno)
                if idx <= prev:
                    raise NonAscendingIndexError(
                        f"{path}: index {idx} after {prev} at line {lineno}"
                    )
                prev = idx
                pairs.append((idx, val))
                max_idx = max(max_idx, idx)
            sparse_rows.append(pairs)
    if not sparse_rows:
        raise ParseError(f"{path}: no data rows")
    if max_idx == 0:
        raise ParseError(f"{path}: no feature indices found")

    x = np.zeros((len(sparse_rows), max_idx))
    for i, pairs in enumerate(sparse_rows):
        for idx, val in pairs:
            x[i, idx - 1] = val
    try:
        y = _normalize_labels([repr(float(v)) for v in raw_labels])
    except ValueError:
        raise ParseError(f"{path}: non-numeric label") from None
    return Dataset(x=x, y=y)


def scale_features(ds, mode):
    """Apply a per-feature affine transform; constant features map to 0.

    Returns the transformed dataset and the record needed to apply the same
    transform at inference time (or invert it).
    """
    if mode == SCALE_NONE:
        record = ScalingRecord(mode, np.zeros(ds.p), np.ones(ds.p))
        return ds, record
    if mode == SCALE_MINMAX:
        lo = ds.x.min(axis=0)
        span = ds.x.max(axis=0) - lo
        scale = np.where(span > 0.0, span, 1.0)
        record = ScalingRecord(mode, lo, scale)
    elif mode == SCALE_ZSCORE:
        mean = ds.x.mean(axis=0)
        std = ds.x.std(axis=0)
        scale = np.where(std > 0.0, std, 1.0)
        record = ScalingRecord(mode, mean, scale)
    else:
        raise ValueError(f"unknown scaling mode {mode!r}")
    scaled = Dataset(x=record.apply(ds.x), y=ds.y, feature_names=ds.feature_names)
    return scaled, record


def split(ds, spec):
    """Deterministic train/test partition; both sides keep every class.

    Stratified mode draws the train fraction within each class (ratio
    preserved to within one sample per class); either mode requires at
    least two samples per class so the test side retains one of each.
    """
    rng = np.random.default_rng(spec.seed)
    class_counts = {label: int(np.sum(ds.y == label)) for label in (-1.0, 1.0)}
    for label, count in class_counts.items():
        if count < 1:
            raise InsufficientClassSamplesError(f"class {label:+.0f} has no samples")
        if count < 2:
            raise InsufficientClassSamplesError(
                f"class {label:+.0f} needs at least 2 samples to appear in both sides"
            )

    if spec.stratified:
        train_idx = []
        test_idx = []
        for label in (-1.0, 1.0):
            members = np.flatnonzero(ds.y == label)
            members = members[rng.permutation(members.shape[0])]
            n_train = int(round(spec.train_fraction * members.shape[0]))
            n_train = min(max(n_train, 1), members.shape[0] - 1)
            train_idx.append(members[:n_train])
            test_idx.append(members[n_train:])
        train_idx = np.sort(np.concatenate(train_idx))
        test_idx = np.sort(np.concatenate(test_idx))
    else:
        order = rng.permutation(ds.n)
        n_train = int(round(spec.train_fraction * ds.n))
        n_train = min(max(n_train, 1), ds.n - 1)
        train_idx = order[:n_train]
        test_idx = order[n_train:]
        # guard: pull one sample of any class missing from a side
        for label in (-1.0, 1.0):
            if not np.any(ds.y[test_idx] == label):
                move = train_idx[ds.y[train_idx] == label][-1]
                train_idx = train_idx[train_idx != move]
                test_idx = np.append(test_idx, move)
            elif not np.any(ds.y[train_idx] == label):
                move = test_idx[ds.y[test_idx] == label][-1]
                test_idx = test_idx[test_idx != move]
                train_idx = np.append(train_idx, move)
        train_idx = np.sort(train_idx)
        test_idx = np.sort(test_idx)

    train = Dataset(x=ds.x[train_idx], y=ds.y[train_idx], feature_names=ds.feature_names)
    test = Dataset(x=ds.x[test_idx], y=ds.y[test_idx], feature_names=ds.feature_names)
    return train, test


_IDX_DTYPES = {
    0x08: np.uint8,
    0x09: np.int8,
    0x0B: np.dtype(">i2"),
    0x0C: np.dtype(">i4"),
    0x0D: np.dtype(">f4"),
    0x0E: np.dtype(">f8"),
}


def read_idx(path):
    """Decode a raw IDX file (2 zero bytes, dtype code, ndim, big-endian dims)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 4:
        raise ParseError(f"{path}: truncated IDX header")
    zero0, zero1, dtype_code, ndim = struct.unpack_from(">BBBB", blob)
    if zero0 != 0 or zero1 != 0 or dtype_code not in _IDX_DTYPES:
        raise ParseError(f"{path}: bad IDX magic bytes")
    header_size = 4 + 4 * ndim
    if len(blob) < header_size:
        raise ParseError(f"{path}: truncated IDX dimension list")
    dims = struct.unpack_from(f">{ndim}I", blob, 4)
    dtype = np.dtype(_IDX_DTYPES[dtype_code])
    count = int(np.prod(dims)) if dims else 0
    expected = header_size + count * dtype.itemsize
    if len(blob) != expected:
        raise ParseError(f"{path}: IDX payload has {len(blob) - header_size} bytes, "
                         f"expected {expected - header_size}")
    data = np.frombuffer(blob, dtype=dtype, offset=header_size, count=count)
    return data.reshape(dims).astype(np.float64 if dtype.kind == "f" else np.int64)


def load_idx_dataset(images_path, labels_path, digit_neg=4, digit_pos=5, per_class=None):
    """Build a binary dataset from IDX image/label files for two digits.

    Images are flattened row-major; pixel values stay in their raw range
    (apply :func:`scale_features` downstream). ``per_class`` caps the
    number of samples kept per digit, in file order.
    """
    images = read_idx(images_path)
    labels = read_idx(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise ParseError(f"{images_path}: image/label counts differ")
    flat = images.reshape(images.shape[0], -1).astype(float)
    xs = []
    ys = []
    for digit, target in ((digit_neg, -1.0), (digit_pos, 1.0)):
        picked = np.flatnonzero(labels == digit)
        if per_class is not None:
            picked = picked[:per_class]
        xs.append(flat[picked])
        ys.append(np.full(picked.shape[0], target))
    return Dataset(x=np.vstack(xs), y=np.concatenate(ys))
