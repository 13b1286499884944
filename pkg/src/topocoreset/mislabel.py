"""Training-free mislabel scoring and filtering.

The neighborhood purity score of a sample is the fraction of its k nearest
neighbors (cosine, in the high-dimensional embedding) that carry a
different label; higher means more suspect. Precomputed margin scores can
be ingested from file instead, negated on load so both sources share the
same orientation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .io import DataError, FormatError, LabelVector, ScoreVector, ShapeError
from .neighbors import knn_graph


@dataclass
class MislabelConfig:
    method: str = "nlps"     # or "aum_file"
    k: int = 20
    gamma: float = 0.0
    aum_path: str | None = None

    def __post_init__(self):
        if self.method not in ("nlps", "aum_file"):
            raise ValueError(f"unknown mislabel method {self.method!r}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must be in [0,1), got {self.gamma}")
        if self.k < 1:
            raise ValueError("k must be >= 1")


def nlps_scores(Z, labels: LabelVector, k: int = 20) -> ScoreVector:
    """Fraction of a sample's k nearest neighbors with a mismatched label."""
    data = getattr(Z, "data", Z)
    if data.shape[0] != len(labels):
        raise ShapeError(f"{data.shape[0]} rows but {len(labels)} labels")
    graph = knn_graph(data, k=k, metric="cosine")
    neighbor_labels = labels.labels[graph.indices]
    mism = (neighbor_labels != labels.labels[:, None]).sum(axis=1)
    return ScoreVector(mism / float(k), kind="mislabel", normalized=True)


def load_aum_scores(path, n: int) -> ScoreVector:
    """Read (index, raw margin) CSV rows and negate so higher = more suspect."""
    vals = np.full(n, np.nan)
    count = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                idx_s, val_s = line.split(",")
                idx, val = int(idx_s), float(val_s)
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: expected 'index,value' rows") from exc
            if not 0 <= idx < n:
                raise ShapeError(f"{path}:{lineno}: index {idx} out of range for N={n}")
            if not np.isfinite(val):
                raise DataError(f"{path}:{lineno}: non-finite value")
            vals[idx] = val
            count += 1
    if count != n or np.isnan(vals).any():
        raise ShapeError(f"{path}: expected exactly {n} rows, got {count}")
    return ScoreVector(-vals, kind="mislabel")


def filter_mislabeled(scores: ScoreVector, gamma: float) -> np.ndarray:
    """Drop the floor(gamma*N) highest-scoring indices; returns sorted kept ones.

    Ties are broken by removing the smaller index first.
    """
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must be in [0,1), got {gamma}")
    n = len(scores)
    n_remove = int(np.floor(gamma * n))
    if n_remove == 0:
        return np.arange(n, dtype=np.int64)
    order = np.lexsort((np.arange(n), -scores.values))
    removed = order[:n_remove]
    keep = np.ones(n, dtype=bool)
    keep[removed] = False
    return np.flatnonzero(keep).astype(np.int64)
