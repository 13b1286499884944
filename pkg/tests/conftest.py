import numpy as np


def gaussian_blobs(seed, n_per=200, n_classes=3, dim=64, separation=30.0):
    """Well-separated Gaussian blobs with axis-decaying spread.

    The per-axis standard deviation falls off as (1+j)^-1 so each blob has
    low intrinsic dimension, which a 2-D projection can plausibly preserve;
    the blobs stay genuinely 64-dimensional Gaussians.
    """
    rng = np.random.default_rng(seed)
    centers = rng.normal(scale=separation, size=(n_classes, dim))
    scales = (1.0 + np.arange(dim)) ** -1.0
    pts, labels = [], []
    for c in range(n_classes):
        pts.append(centers[c] + rng.normal(size=(n_per, dim)) * scales)
        labels.append(np.full(n_per, c))
    Z = np.vstack(pts).astype(np.float32)
    return Z, np.concatenate(labels)
