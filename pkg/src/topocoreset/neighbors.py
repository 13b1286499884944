"""Exact k-nearest-neighbor graphs over cosine or euclidean distance.

Brute force on the full distance matrix; deterministic, with ties broken
toward the smaller index. This is the conformance reference for anything
downstream that consumes neighbor structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class NeighborGraph:
    indices: np.ndarray    # (N, k) neighbor ids, self excluded
    distances: np.ndarray  # (N, k) nondecreasing per row
    metric: str
    k: int

    @property
    def n_points(self) -> int:
        return self.indices.shape[0]


def pairwise_distances(X: np.ndarray, metric: str = "cosine") -> np.ndarray:
    """Full (N, N) distance matrix.

    Cosine distance is 1 - dot(u, v)/(|u||v|), clipped to [0, 2]; all-zero
    rows get distance 1 to everything by convention (their normalized form
    is the zero vector). Euclidean uses the usual L2 norm.
    """
    X = np.asarray(X, dtype=np.float64)
    if metric == "cosine":
        norms = np.linalg.norm(X, axis=1, keepdims=True)
        safe = np.where(norms > 0.0, norms, 1.0)
        U = X / safe
        D = 1.0 - U @ U.T
        return np.clip(D, 0.0, 2.0)
    if metric == "euclidean":
        sq = np.sum(X * X, axis=1)
        D2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
        np.maximum(D2, 0.0, out=D2)
        return np.sqrt(D2)
    raise ValueError(f"unknown metric {metric!r}")


def knn_graph(X: np.ndarray, k: int, metric: str = "cosine") -> NeighborGraph:
    """Exact k smallest distances per row, self excluded.

    Ties are broken by the smaller index (stable sort over the distance
    row). Requires ``k < N``.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < N, got k={k}, N={n}")
    D = pairwise_distances(X, metric)
    np.fill_diagonal(D, np.inf)
    order = np.argsort(D, axis=1, kind="stable")[:, :k]
    dists = np.take_along_axis(D, order, axis=1)
    return NeighborGraph(indices=order.astype(np.int64), distances=dists, metric=metric, k=k)
