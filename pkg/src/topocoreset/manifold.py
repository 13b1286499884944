"""Low-dimensional manifold projection by fuzzy-set cross-entropy descent.

Pipeline: exact kNN graph -> fuzzy simplicial set (smooth local scales,
probabilistic t-conorm symmetrization) -> low-dimensional similarity
calibration -> negative-sampling SGD layout. The layout is deterministic
given (input, seed) and its per-row/per-edge random streams can be
relabeled through ``stream_ids``, which makes row-permutation equivariance
an exact, testable contract.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

from ._layout import init_coords, optimize_layout_kernel
from .io import EmbeddingMatrix
from .neighbors import NeighborGraph, knn_graph

SMOOTH_TOLERANCE = 1e-5
SMOOTH_ITERATIONS = 64
MIN_SIGMA_SCALE = 1e-3

# least-squares calibration for min_dist=0.1, used when the fit diverges
FALLBACK_AB = (1.577, 0.895)


@dataclass
class ProjectionConfig:
    n_neighbors: int = 15
    min_dist: float = 0.1
    out_dim: int = 2
    metric: str = "cosine"
    epochs: int = 200
    neg_samples: int = 5
    learning_rate: float = 1.0
    a: float | None = None       # None: calibrated from min_dist
    b: float | None = None
    seed: int = 0
    mode: str = "sequential"     # or "synchronized"

    def __post_init__(self):
        if self.n_neighbors < 2:
            raise ValueError("n_neighbors must be >= 2")
        if not 0.0 < self.min_dist <= 1.0:
            raise ValueError(f"min_dist must be in (0,1], got {self.min_dist}")
        if self.out_dim < 1 or self.epochs < 0 or self.neg_samples < 0:
            raise ValueError("out_dim >= 1, epochs >= 0, neg_samples >= 0 required")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if (self.a is None) != (self.b is None):
            raise ValueError("a and b must be given together")
        if self.a is not None and (self.a <= 0 or self.b <= 0):
            raise ValueError("a and b must be positive")
        if self.mode not in ("sequential", "synchronized"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def fingerprint(self) -> str:
        text = ":".join(
            str(v)
            for v in (
                self.n_neighbors, self.min_dist, self.out_dim, self.metric,
                self.epochs, self.neg_samples, self.learning_rate,
                self.a, self.b, self.seed, self.mode,
            )
        )
        return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class FuzzyGraph:
    """Symmetric membership strengths over neighbor pairs."""

    heads: np.ndarray     # (n_edges,) with heads < tails
    tails: np.ndarray
    weights: np.ndarray   # p_ij in (0, 1]
    rho: np.ndarray
    sigma: np.ndarray
    n_points: int
    unattainable_rows: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @property
    def n_edges(self) -> int:
        return self.heads.shape[0]


@dataclass
class Embedding2D:
    coords: np.ndarray
    fingerprint: str = ""

    def __post_init__(self):
        arr = np.asarray(self.coords, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise ValueError("embedding coordinates must be finite")
        self.coords = arr


def smooth_knn_scales(distances: np.ndarray, k: int):
    """Per-row (rho, sigma): rho is the nearest-neighbor distance, sigma is
    binary-searched so sum_j exp(-max(0, d_ij - rho)/sigma) hits log2(k).

    Rows whose target is unattainable keep the clamped minimum sigma
    (MIN_SIGMA_SCALE times their mean neighbor distance) and are reported.
    """
    n = distances.shape[0]
    target = np.log2(k)
    rho = distances[:, 0].copy()
    sigma = np.empty(n, dtype=np.float64)
    unattainable = []
    for i in range(n):
        d = np.maximum(distances[i] - rho[i], 0.0)
        lo, hi, mid = 0.0, np.inf, 1.0
        for _ in range(SMOOTH_ITERATIONS):
            psum = np.exp(-d / mid).sum() if mid > 0 else 0.0
            if abs(psum - target) < SMOOTH_TOLERANCE:
                break
            if psum > target:
                hi = mid
                mid = (lo + hi) / 2.0
            else:
                lo = mid
                mid = mid * 2.0 if np.isinf(hi) else (lo + hi) / 2.0
        floor = max(MIN_SIGMA_SCALE * float(distances[i].mean()), 1e-12)
        sigma[i] = max(mid, floor)
        psum = np.exp(-d / sigma[i]).sum()
        if abs(psum - target) >= SMOOTH_TOLERANCE:
            unattainable.append(i)
    return rho, sigma, np.asarray(unattainable, dtype=np.int64)


def fuzzy_simplicial_set(graph: NeighborGraph) -> FuzzyGraph:
    """Directed memberships from the smoothed kernel, symmetrized with the
    probabilistic t-conorm p + q - p*q."""
    if graph.k < 2:
        raise ValueError("need at least 2 neighbors per row")
    rho, sigma, unattainable = smooth_knn_scales(graph.distances, graph.k)
    n = graph.n_points
    directed = {}
    for i in range(n):
        memb = np.exp(-np.maximum(graph.distances[i] - rho[i], 0.0) / sigma[i])
        for jj in range(graph.k):
            directed[(i, int(graph.indices[i, jj]))] = float(memb[jj])
    edges = {}
    for (i, j), pij in directed.items():
        if i < j:
            pji = directed.get((j, i), 0.0)
            edges[(i, j)] = pij + pji - pij * pji
        elif (j, i) not in directed:
            edges[(j, i)] = pij
    keys = sorted(edges)
    heads = np.asarray([ij[0] for ij in keys], dtype=np.int64)
    tails = np.asarray([ij[1] for ij in keys], dtype=np.int64)
    weights = np.asarray([edges[ij] for ij in keys], dtype=np.float64)
    return FuzzyGraph(heads, tails, weights, rho, sigma, n, unattainable)


def fit_ab(min_dist: float):
    """Least-squares (a, b) so (1 + a x^(2b))^-1 tracks the target curve
    psi(x) = 1 for x <= min_dist, exp(-(x - min_dist)) beyond, on [0, 3]."""
    if not 0.0 < min_dist <= 1.0:
        raise ValueError(f"min_dist must be in (0,1], got {min_dist}")
    xv = np.linspace(0.0, 3.0, 300)
    yv = np.where(xv <= min_dist, 1.0, np.exp(-(xv - min_dist)))

    def curve(x, a, b):
        return 1.0 / (1.0 + a * x ** (2.0 * b))

    try:
        params, _ = curve_fit(curve, xv, yv, maxfev=10000)
        a, b = float(params[0]), float(params[1])
        if not (np.isfinite(a) and np.isfinite(b) and a > 0 and b > 0):
            raise RuntimeError("non-finite fit")
    except RuntimeError:
        warnings.warn("similarity calibration did not converge; using tabulated defaults")
        return FALLBACK_AB
    return a, b


def _resolve_stream_ids(n: int, stream_ids) -> np.ndarray:
    if stream_ids is None:
        return np.arange(n, dtype=np.int64)
    sids = np.asarray(stream_ids, dtype=np.int64)
    if sids.shape != (n,) or not np.array_equal(np.sort(sids), np.arange(n)):
        raise ValueError("stream_ids must be a permutation of range(N)")
    return sids


def optimize_layout(
    fuzzy: FuzzyGraph,
    config: ProjectionConfig | None = None,
    stream_ids=None,
) -> Embedding2D:
    """Seeded SGD layout of the fuzzy graph.

    Initialization is iid uniform in [-10, 10]^out_dim from per-row streams.
    Edges are visited in canonical stream-id order and fire with frequency
    proportional to their membership strength; each firing applies the
    attractive term to both endpoints and ``neg_samples`` repulsive draws
    from uniformly sampled non-neighbors of each endpoint. The learning
    rate decays linearly to zero. epochs=0 returns the initialization.
    """
    config = config or ProjectionConfig()
    if fuzzy.n_edges == 0:
        raise ValueError("fuzzy graph has no edges")
    n = fuzzy.n_points
    sids = _resolve_stream_ids(n, stream_ids)
    a, b = (config.a, config.b) if config.a is not None else fit_ab(config.min_dist)

    coords = init_coords(sids, config.seed, config.out_dim)
    if config.epochs > 0:
        su = sids[fuzzy.heads]
        sv = sids[fuzzy.tails]
        # the head endpoint is the one with the smaller stream id, so the
        # keyed negative-sample streams follow a relabeling exactly
        swap = su > sv
        hpos = np.where(swap, fuzzy.tails, fuzzy.heads)
        tpos = np.where(swap, fuzzy.heads, fuzzy.tails)
        emin = np.minimum(su, sv)
        emax = np.maximum(su, sv)
        order = np.lexsort((emax, emin))
        heads_pos = hpos[order]
        tails_pos = tpos[order]
        heads_sid = emin[order]
        tails_sid = emax[order]
        weights = fuzzy.weights[order]
        eps = weights.max() / weights

        # adjacency over positions, neighbor stream ids sorted for lookup
        nbr = [[] for _ in range(n)]
        for u, v in zip(fuzzy.heads, fuzzy.tails):
            nbr[u].append(sids[v])
            nbr[v].append(sids[u])
        adj_indptr = np.zeros(n + 1, dtype=np.int64)
        for i in range(n):
            adj_indptr[i + 1] = adj_indptr[i] + len(nbr[i])
        adj_sids = np.empty(adj_indptr[-1], dtype=np.int64)
        for i in range(n):
            adj_sids[adj_indptr[i]:adj_indptr[i + 1]] = sorted(nbr[i])

        sid_to_pos = np.empty(n, dtype=np.int64)
        sid_to_pos[sids] = np.arange(n, dtype=np.int64)

        coords = optimize_layout_kernel(
            coords,
            heads_pos,
            tails_pos,
            heads_sid,
            tails_sid,
            eps,
            adj_indptr,
            adj_sids,
            sids,
            sid_to_pos,
            config.epochs,
            config.learning_rate,
            float(a),
            float(b),
            config.neg_samples,
            config.seed,
            config.mode == "synchronized",
        )
    return Embedding2D(coords, fingerprint=config.fingerprint())


def cross_entropy_loss(
    fuzzy: FuzzyGraph,
    coords: np.ndarray,
    a: float,
    b: float,
    pairs: str = "edges",
) -> float:
    """Fuzzy-set cross entropy of the layout against the membership graph.

    ``pairs="edges"`` evaluates the loss over the full edge set of the
    fuzzy graph (every pair with p > 0); ``pairs="all"`` additionally
    charges the p = 0 repulsion term for every non-edge. Distances are
    floored like the optimizer so coincident points stay finite, and
    0*log(0) terms are taken as zero.
    """
    pts = np.asarray(coords, dtype=np.float64)
    n = pts.shape[0]
    sq = np.sum(pts * pts, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (pts @ pts.T)
    np.maximum(d2, 1e-6, out=d2)

    hd2 = d2[fuzzy.heads, fuzzy.tails]
    q = 1.0 / (1.0 + a * hd2 ** b)
    q = np.clip(q, 1e-12, 1.0 - 1e-12)
    p = fuzzy.weights
    attract = p * (np.log(p) - np.log(q))
    with np.errstate(divide="ignore", invalid="ignore"):
        rest = np.where(p < 1.0, (1.0 - p) * (np.log1p(-p) - np.log1p(-q)), 0.0)
    total = float((attract + rest).sum())

    if pairs == "all":
        # -log(1 - q) = log1p(1 / (a d^2b)) for every unordered pair
        rep = np.log1p(1.0 / (a * d2 ** b))
        iu = np.triu_indices(n, k=1)
        total += float(rep[iu].sum())
        total -= float(-np.log1p(-q).sum())  # edges already accounted above
    elif pairs != "edges":
        raise ValueError(f"unknown pair scope {pairs!r}")
    return total


def project(Z, config: ProjectionConfig | None = None, stream_ids=None) -> Embedding2D:
    """knn graph -> fuzzy set -> calibration -> layout, end to end."""
    config = config or ProjectionConfig()
    data = Z.data if isinstance(Z, EmbeddingMatrix) else np.asarray(Z)
    graph = knn_graph(data, k=config.n_neighbors, metric=config.metric)
    fuzzy = fuzzy_simplicial_set(graph)
    return optimize_layout(fuzzy, config, stream_ids=stream_ids)
