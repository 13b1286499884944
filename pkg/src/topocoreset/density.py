"""Gaussian kernel density scores on the low-dimensional embedding.

Score(y_i) = (1 / (N h)) * sum_j exp(-|y_i - y_j|^2 / (2 h^2)), with the
self term included. The leading constant is kept literal (no d-dimensional
normalization) because only the ranking feeds the selection stage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .io import LabelVector, ScoreVector


@dataclass
class DensityConfig:
    bandwidth: float = 0.4

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")


def kde_scores(points: np.ndarray, config: DensityConfig | None = None) -> ScoreVector:
    """Density score for every point of one point set (evaluated in-sample)."""
    config = config or DensityConfig()
    values = kde_values(points, config.bandwidth)
    return ScoreVector(values, kind="density")


def kde_values(points: np.ndarray, bandwidth: float) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = pts.shape[0]
    sq = np.sum(pts * pts, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (pts @ pts.T)
    np.maximum(d2, 0.0, out=d2)
    kern = np.exp(-d2 / (2.0 * bandwidth * bandwidth))
    return kern.sum(axis=1) / (n * bandwidth)


def density_scores(
    Y: np.ndarray,
    labels: LabelVector,
    config: DensityConfig | None = None,
    per_class: bool = True,
) -> ScoreVector:
    """Density scores for the whole embedding.

    By default each class is evaluated against its own members only; the
    global mode scores every sample against the full point set.
    """
    config = config or DensityConfig()
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape[0] != len(labels):
        raise ValueError(f"{Y.shape[0]} points but {len(labels)} labels")
    if not per_class:
        return kde_scores(Y, config)
    out = np.empty(Y.shape[0], dtype=np.float64)
    for c in range(labels.num_classes):
        idx = np.flatnonzero(labels.labels == c)
        if idx.size:
            out[idx] = kde_values(Y[idx], config.bandwidth)
    return ScoreVector(out, kind="density")
