"""Load, validate, persist, and perturb embedding datasets and score artifacts.

File formats
------------
* Binary embeddings (``.tprn``): little-endian, self-describing.
  Layout: magic ``b"TPRN"`` | version u32 (=1) | N u64 | D u64 | C u64 |
  row-major float32 data (N*D) | int32 labels (N).
* CSV embeddings: D float feature columns plus one trailing integer label
  column, no header.
* Scores: CSV ``index,score`` rows.
* Selections: JSON with ``kept_indices``, ``pruning_rate``, ``per_class_counts``.

All values must be finite; non-finite input data is rejected with
:class:`DataError`.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .rng import TAG_PERTURB, stream

MAGIC = b"TPRN"
VERSION = 1

SCORE_KINDS = ("density", "persistence", "mislabel", "unified")


class CorpusError(Exception):
    """Base class for dataset I/O failures."""


class FormatError(CorpusError):
    """Malformed header or unparseable file."""


class ShapeError(CorpusError):
    """Row length or count does not match the declared shape."""


class DataError(CorpusError):
    """Non-finite or otherwise invalid values."""


@dataclass
class EmbeddingMatrix:
    """N x D matrix of finite float32 feature activations."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float32)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"expected a 2-D matrix with N,D >= 1, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DataError("embedding matrix contains non-finite entries")
        self.data = arr

    @property
    def n_samples(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


@dataclass
class LabelVector:
    """Length-N class ids in {0..num_classes-1}."""

    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        arr = np.asarray(self.labels, dtype=np.int64)
        if arr.ndim != 1:
            raise ShapeError("labels must be one-dimensional")
        if self.num_classes < 1:
            raise DataError("num_classes must be positive")
        if arr.size and (arr.min() < 0 or arr.max() >= self.num_classes):
            raise DataError(
                f"labels must lie in [0, {self.num_classes}), got range "
                f"[{arr.min()}, {arr.max()}]"
            )
        self.labels = arr

    def __len__(self) -> int:
        return self.labels.size

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.num_classes)


@dataclass
class ScoreVector:
    """Per-sample real scores with provenance."""

    values: np.ndarray
    kind: str
    normalized: bool = False

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if self.kind not in SCORE_KINDS:
            raise DataError(f"unknown score kind {self.kind!r}")
        if not np.all(np.isfinite(arr)):
            raise DataError(f"{self.kind} scores contain non-finite values")
        if self.normalized and arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise DataError("scores flagged normalized must lie in [0, 1]")
        self.values = arr

    def __len__(self) -> int:
        return self.values.size


@dataclass
class SelectionResult:
    """Sorted kept indices plus the budget bookkeeping that produced them."""

    kept_indices: np.ndarray
    pruning_rate: float
    per_class_counts: dict = field(default_factory=dict)

    def __post_init__(self):
        idx = np.asarray(self.kept_indices, dtype=np.int64)
        if idx.size != np.unique(idx).size:
            raise DataError("kept indices must be unique")
        if not 0.0 < self.pruning_rate < 1.0:
            raise DataError(f"pruning rate must be in (0,1), got {self.pruning_rate}")
        self.kept_indices = np.sort(idx)
        self.per_class_counts = {int(k): int(v) for k, v in self.per_class_counts.items()}


def _validate_pair(Z: EmbeddingMatrix, labels: LabelVector) -> None:
    if Z.n_samples != len(labels):
        raise ShapeError(f"{Z.n_samples} rows but {len(labels)} labels")


def save_embeddings(Z, labels, path, format="binary") -> None:
    """Write embeddings + labels in the binary or CSV format."""
    Z = Z if isinstance(Z, EmbeddingMatrix) else EmbeddingMatrix(Z)
    labels = labels if isinstance(labels, LabelVector) else LabelVector(
        labels, int(np.max(labels)) + 1 if np.size(labels) else 1
    )
    _validate_pair(Z, labels)
    if format == "binary":
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<IQQQ", VERSION, Z.n_samples, Z.dim, labels.num_classes))
            fh.write(np.ascontiguousarray(Z.data, dtype="<f4").tobytes())
            fh.write(labels.labels.astype("<i4").tobytes())
    elif format == "csv":
        with open(path, "w") as fh:
            for row, lab in zip(Z.data, labels.labels):
                fh.write(",".join(repr(float(v)) for v in row))
                fh.write(f",{int(lab)}\n")
    else:
        raise FormatError(f"unknown format {format!r}")


def load_embeddings(path, format=None):
    """Read embeddings + labels; returns (EmbeddingMatrix, LabelVector).

    ``format`` is ``"binary"`` or ``"csv"``; when omitted it is sniffed from
    the magic bytes.
    """
    if format is None:
        with open(path, "rb") as fh:
            format = "binary" if fh.read(4) == MAGIC else "csv"
    if format == "binary":
        return _load_binary(path)
    if format == "csv":
        return _load_csv(path)
    raise FormatError(f"unknown format {format!r}")


def _load_binary(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 4 + 4 + 24 or blob[:4] != MAGIC:
        raise FormatError(f"{path}: missing TPRN magic header")
    version, n, d, c = struct.unpack_from("<IQQQ", blob, 4)
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if n < 1 or d < 1 or c < 1:
        raise FormatError(f"{path}: header declares empty dataset (N={n}, D={d}, C={c})")
    off = 4 + 4 + 24
    need = off + 4 * n * d + 4 * n
    if len(blob) != need:
        raise ShapeError(f"{path}: expected {need} bytes for N={n}, D={d}, got {len(blob)}")
    data = np.frombuffer(blob, dtype="<f4", count=n * d, offset=off).reshape(n, d)
    labels = np.frombuffer(blob, dtype="<i4", count=n, offset=off + 4 * n * d)
    return EmbeddingMatrix(data.copy()), LabelVector(labels.astype(np.int64), int(c))


def _load_csv(path):
    rows, labels = [], []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            toks = line.split(",")
            if width is None:
                width = len(toks)
                if width < 2:
                    raise FormatError(f"{path}:{lineno}: need at least one feature and a label")
            elif len(toks) != width:
                raise ShapeError(
                    f"{path}:{lineno}: row has {len(toks)} columns, expected {width}"
                )
            try:
                feats = [float(t) for t in toks[:-1]]
                lab = float(toks[-1])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from exc
            if lab != int(lab):
                raise DataError(f"{path}:{lineno}: label column must be integral, got {toks[-1]}")
            rows.append(feats)
            labels.append(int(lab))
    if not rows:
        raise FormatError(f"{path}: empty file")
    data = np.asarray(rows, dtype=np.float32)
    if not np.all(np.isfinite(data)):
        raise DataError(f"{path}: non-finite feature value")
    lab = np.asarray(labels, dtype=np.int64)
    if lab.min() < 0:
        raise DataError(f"{path}: negative class id")
    return EmbeddingMatrix(data), LabelVector(lab, int(lab.max()) + 1)


def save_scores(scores: ScoreVector, path) -> None:
    """Write ``index,score`` CSV rows, one per sample."""
    lines = [f"{i},{float(v)!r}" for i, v in enumerate(scores.values)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines))


def load_scores(path, kind, n=None) -> ScoreVector:
    vals = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                idx_s, val_s = line.split(",")
                idx, val = int(idx_s), float(val_s)
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: expected 'index,score' rows") from exc
            vals[idx] = val
    if n is None:
        n = len(vals)
    if sorted(vals) != list(range(n)):
        raise ShapeError(f"{path}: expected indices 0..{n - 1}")
    return ScoreVector(np.asarray([vals[i] for i in range(n)]), kind=kind)


def save_selection(result: SelectionResult, path) -> None:
    payload = {
        "kept_indices": [int(i) for i in result.kept_indices],
        "pruning_rate": result.pruning_rate,
        "per_class_counts": {str(k): v for k, v in sorted(result.per_class_counts.items())},
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_selection(path) -> SelectionResult:
    with open(path) as fh:
        payload = json.load(fh)
    try:
        return SelectionResult(
            kept_indices=np.asarray(payload["kept_indices"], dtype=np.int64),
            pruning_rate=float(payload["pruning_rate"]),
            per_class_counts={int(k): int(v) for k, v in payload["per_class_counts"].items()},
        )
    except KeyError as exc:
        raise FormatError(f"{path}: missing field {exc}") from exc


def perturb_embeddings(Z, multiplier: float, seed: int) -> EmbeddingMatrix:
    """Add per-sample Gaussian noise scaled by each row's own spread.

    For row ``z`` the noise std is ``multiplier * std(z)`` where ``std`` is
    the population standard deviation over the row's D entries. Rows with
    zero spread come back unchanged; ``multiplier=0`` is the identity.
    Deterministic for a fixed seed (PCG64 stream keyed by the seed).
    """
    Z = Z if isinstance(Z, EmbeddingMatrix) else EmbeddingMatrix(Z)
    if multiplier < 0:
        raise DataError(f"noise multiplier must be nonnegative, got {multiplier}")
    out = Z.data.astype(np.float64)
    rng = stream(seed, TAG_PERTURB)
    sig = out.std(axis=1)
    for i in range(out.shape[0]):
        eps = rng.standard_normal(out.shape[1])
        scale = multiplier * sig[i]
        if scale > 0.0:
            out[i] += scale * eps
    return EmbeddingMatrix(out.astype(np.float32))
