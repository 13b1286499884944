"""Vietoris-Rips persistent homology and the persistence-based point optimizer.

The filtration value of an edge is its Euclidean length and a simplex enters
at the maximum of its edge lengths. H0 is computed by a union-find sweep, H1
by Z/2 column reduction of the triangle boundary matrix (numba kernels in
:mod:`topocoreset._reduction`). Zero-persistence pairs are dropped from every
reported diagram.

Internally the filtration is truncated at the enclosing radius
``min_i max_j d(i, j)``: at that scale the complex is a cone, so every finite
H0/H1 event has already happened and no H1 class is born later. This changes
nothing in the output and avoids enumerating triangles that cannot matter.

On top of the diagrams sit the density-sliced signed measure, the total
persistence loss with its analytic gradient, and the gradient-ascent point
optimizer whose per-sample displacement is the persistence score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._cohomology import OK, cohomology_h1
from ._reduction import count_triangles, fill_triangles, reduce_triangles, union_find_h0
from .density import kde_values
from .io import LabelVector, ScoreVector


@dataclass
class PersistencePair:
    degree: int
    birth: float
    death: float                     # math.inf for essential classes
    birth_simplex: tuple
    death_simplex: tuple | None = None

    @property
    def persistence(self) -> float:
        return self.death - self.birth


@dataclass
class PersistenceDiagram:
    pairs: list        # finite pairs, positive persistence only
    essentials: list   # death = inf

    def finite(self, degree: int) -> list:
        return [p for p in self.pairs if p.degree == degree]

    def essential(self, degree: int) -> list:
        return [p for p in self.essentials if p.degree == degree]

    def as_array(self, degree: int) -> np.ndarray:
        """Sorted (birth, death) rows for one degree, finite pairs only."""
        rows = sorted((p.birth, p.death) for p in self.finite(degree))
        return np.asarray(rows, dtype=np.float64).reshape(-1, 2)


def _distance_matrix(pts: np.ndarray) -> np.ndarray:
    sq = np.sum(pts * pts, axis=1)
    D = sq[:, None] + sq[None, :] - 2.0 * (pts @ pts.T)
    np.maximum(D, 0.0, out=D)
    np.sqrt(D, out=D)
    np.fill_diagonal(D, 0.0)
    return D


def rips_persistence(
    points: np.ndarray,
    degree: int = 1,
    max_edge: float | None = None,
    engine: str = "cohomology",
) -> PersistenceDiagram:
    """Persistence diagram of the Vietoris-Rips filtration on a point cloud.

    ``degree`` is the maximum homology degree computed (0 or 1); the result
    carries pairs for all degrees up to it. ``max_edge`` truncates the
    filtration (default: unbounded, i.e. the point-set diameter governs).
    Critical simplices are recorded on each pair for gradient use.

    Two H1 engines compute the same pairs: ``"cohomology"`` (default,
    coboundary columns with the emergent-pair fast path) and
    ``"reduction"`` (direct triangle boundary-matrix reduction, the slow
    conformance reference the tests cross-validate against).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = pts.shape[0]
    if n < 1:
        raise ValueError("need at least one point")
    if degree not in (0, 1):
        raise ValueError(f"homology degree must be 0 or 1, got {degree}")
    if engine not in ("cohomology", "reduction"):
        raise ValueError(f"unknown engine {engine!r}")
    pairs: list[PersistencePair] = []
    essentials: list[PersistencePair] = []
    if n == 1:
        essentials.append(PersistencePair(0, 0.0, math.inf, (0,)))
        return PersistenceDiagram(pairs, essentials)

    D = _distance_matrix(pts)
    enclosing = float(np.min(np.max(D, axis=1)))
    r = enclosing if max_edge is None else min(float(max_edge), enclosing)

    iu, ju = np.triu_indices(n, k=1)
    w = D[iu, ju]
    keep = w <= r
    iu, ju, w = iu[keep], ju[keep], w[keep]
    order = np.lexsort((ju, iu, w))
    eu = iu[order].astype(np.int64)
    ev = ju[order].astype(np.int64)
    ew = w[order]
    n_edges = ew.size

    merge_ids, dying, parent = union_find_h0(eu, ev, n)
    for mid, dv in zip(merge_ids, dying):
        death = float(ew[mid])
        if death > 0.0:
            pairs.append(
                PersistencePair(0, 0.0, death, (int(dv),), (int(eu[mid]), int(ev[mid])))
            )
    roots = {}
    for v in range(n):
        root = v
        while parent[root] != root:
            root = parent[root]
        roots.setdefault(int(root), v)  # v ascending, so this is the min vertex
    for minv in sorted(roots.values()):
        essentials.append(PersistencePair(0, 0.0, math.inf, (int(minv),)))

    if degree >= 1 and n >= 3 and n_edges >= 1:
        forest = np.zeros(n_edges, dtype=np.bool_)
        forest[merge_ids] = True
        if engine == "cohomology":
            pairs_1, ess_1 = _h1_cohomology(D, r, eu, ev, ew, forest, n)
        else:
            pairs_1, ess_1 = _h1_reduction(D, r, eu, ev, ew, forest, n)
        pairs.extend(pairs_1)
        essentials.extend(ess_1)
    return PersistenceDiagram(pairs, essentials)


def _h1_cohomology(D, r, eu, ev, ew, forest, n):
    work_cap = arena_cap = max(1 << 14, 16 * n)
    while True:
        status, pe, pt, pv, n_out, ess_e, n_ess = cohomology_h1(
            D, r, eu, ev, ew, forest, work_cap, arena_cap
        )
        if status == OK:
            break
        work_cap *= 4
        arena_cap *= 4
    pairs = []
    for p in range(n_out):
        e = int(pe[p])
        birth = float(ew[e])
        death = float(pv[p])
        if death > birth:
            tid = int(pt[p])
            tri = (tid // (n * n), (tid // n) % n, tid % n)
            pairs.append(PersistencePair(1, birth, death, (int(eu[e]), int(ev[e])), tri))
    essentials = [
        PersistencePair(1, float(ew[int(ess_e[q])]), math.inf,
                        (int(eu[int(ess_e[q])]), int(ev[int(ess_e[q])])))
        for q in range(n_ess)
    ]
    return pairs, essentials


def _h1_reduction(D, r, eu, ev, ew, forest, n):
    n_edges = ew.size
    edge_rank = np.full((n, n), -1, dtype=np.int64)
    ranks = np.arange(n_edges, dtype=np.int64)
    edge_rank[eu, ev] = ranks
    edge_rank[ev, eu] = ranks

    pairs = []
    paired = np.zeros(n_edges, dtype=bool)
    n_tri = count_triangles(D, r)
    if n_tri > 0:
        ti = np.empty(n_tri, dtype=np.int64)
        tj = np.empty(n_tri, dtype=np.int64)
        tk = np.empty(n_tri, dtype=np.int64)
        tval = np.empty(n_tri, dtype=np.float64)
        fill_triangles(D, r, ti, tj, tk, tval)
        t_order = np.lexsort((tk, tj, ti, tval))
        ti, tj, tk, tval = ti[t_order], tj[t_order], tk[t_order], tval[t_order]

        cap = max(8 * n_tri, 1 << 16)
        while True:
            status, pair_edge, pair_tri, n_pairs = reduce_triangles(
                ti, tj, tk, edge_rank, n_edges, cap
            )
            if status == 0:
                break
            cap *= 4
        for p in range(n_pairs):
            e = int(pair_edge[p])
            t = int(pair_tri[p])
            paired[e] = True
            birth = float(ew[e])
            death = float(tval[t])
            if death > birth:
                pairs.append(
                    PersistencePair(
                        1, birth, death,
                        (int(eu[e]), int(ev[e])),
                        (int(ti[t]), int(tj[t]), int(tk[t])),
                    )
                )
    essentials = [
        PersistencePair(1, float(ew[e]), math.inf, (int(eu[e]), int(ev[e])))
        for e in np.flatnonzero(~forest & ~paired)
    ]
    return pairs, essentials


# ---------------------------------------------------------------------------
# bottleneck distance


def _matching_feasible(cost_ab, diag_a, diag_b, c):
    """Perfect matching test for threshold c (augmenting paths)."""
    na, nb = len(diag_a), len(diag_b)
    n_left = na + nb
    n_right = nb + na

    def neighbors(i):
        if i < na:
            for j in range(nb):
                if cost_ab[i][j] <= c:
                    yield j
            if diag_a[i] <= c:
                yield from range(nb, n_right)
        else:
            for j in range(nb):
                if diag_b[j] <= c:
                    yield j
            yield from range(nb, n_right)

    match_r = [-1] * n_right

    def augment(i, seen):
        for j in neighbors(i):
            if seen[j]:
                continue
            seen[j] = True
            if match_r[j] < 0 or augment(match_r[j], seen):
                match_r[j] = i
                return True
        return False

    for i in range(n_left):
        if not augment(i, [False] * n_right):
            return False
    return True


def _bottleneck_finite(a_pairs, b_pairs):
    if not a_pairs and not b_pairs:
        return 0.0
    diag_a = [(d - b) / 2.0 for b, d in a_pairs]
    diag_b = [(d - b) / 2.0 for b, d in b_pairs]
    cost_ab = [
        [max(abs(ba - bb), abs(da - db)) for bb, db in b_pairs] for ba, da in a_pairs
    ]
    cands = set(diag_a) | set(diag_b) | {0.0}
    for row in cost_ab:
        cands.update(row)
    cands = sorted(cands)
    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _matching_feasible(cost_ab, diag_a, diag_b, cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return cands[lo]


def bottleneck_distance(A: PersistenceDiagram, B: PersistenceDiagram) -> float:
    """Exact bottleneck distance, maximised over degrees 0 and 1.

    Finite pairs may match the diagonal; essential classes are matched
    among themselves (sorted by birth) and a count mismatch gives +inf.
    """
    worst = 0.0
    for deg in (0, 1):
        a_e = sorted(p.birth for p in A.essential(deg))
        b_e = sorted(p.birth for p in B.essential(deg))
        if len(a_e) != len(b_e):
            return math.inf
        if a_e:
            worst = max(worst, max(abs(x - y) for x, y in zip(a_e, b_e)))
        a_f = [(p.birth, p.death) for p in A.finite(deg)]
        b_f = [(p.birth, p.death) for p in B.finite(deg)]
        worst = max(worst, _bottleneck_finite(a_f, b_f))
    return worst


# ---------------------------------------------------------------------------
# density-sliced signed measure, loss, gradient


@dataclass
class PersistenceOptimConfig:
    steps: int = 6
    learning_rate: float = 0.1
    grid_size: int = 10
    homology_degree: int = 1
    density_bandwidth: float = 0.4
    max_edge_length: float | None = None   # None: the point-set diameter governs

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.grid_size < 1:
            raise ValueError("grid size must be >= 1")
        if self.homology_degree != 1:
            raise ValueError("only degree-1 optimization is supported")
        if self.learning_rate <= 0 or self.density_bandwidth <= 0:
            raise ValueError("learning rate and density bandwidth must be positive")


@dataclass
class PersistenceBar:
    pair_id: int
    slice_index: int          # 1-based grid slice
    birth: float
    death: float
    birth_edge: tuple         # indices into the full input cloud
    death_edge: tuple


@dataclass
class SignedMeasure:
    """Signed point masses in (distance, slice) space for finite H1 bars."""

    masses: list = field(default_factory=list)   # ((distance, slice), sign, pair_id)
    bars: list = field(default_factory=list)
    thresholds: np.ndarray = field(default_factory=lambda: np.empty(0))

    def total_mass(self) -> int:
        return sum(sign for _, sign, _ in self.masses)


def _longest_edge(pts, tri):
    i, j, k = tri
    best = None
    best_key = None
    for u, v in ((i, j), (i, k), (j, k)):
        key = (float(np.linalg.norm(pts[u] - pts[v])), u, v)
        if best_key is None or key > best_key:
            best_key = key
            best = (u, v)
    return best


def hilbert_signed_measure(points, density, config: PersistenceOptimConfig | None = None) -> SignedMeasure:
    """Density-sliced H1 persistence as +/- point masses.

    The codensity axis is cut at ``grid_size`` equally spaced quantiles; the
    s-th slice is the subcloud whose codensity is at or below the s-th
    threshold (so slices are nested and the last one is the full cloud).
    Each finite H1 bar of a slice contributes a +1 mass at its birth and a
    -1 mass at its death, sharing a pairing id. Slices with fewer than three
    points contribute nothing.
    """
    config = config or PersistenceOptimConfig()
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    dens = density.values if isinstance(density, ScoreVector) else np.asarray(density, dtype=np.float64)
    if dens.shape[0] != pts.shape[0]:
        raise ValueError(f"{pts.shape[0]} points but {dens.shape[0]} density values")
    m = config.grid_size
    codens = -dens
    levels = np.arange(1, m + 1) / m
    thresholds = np.quantile(codens, levels)
    measure = SignedMeasure(thresholds=thresholds)
    for s, t in enumerate(thresholds, start=1):
        sub = np.flatnonzero(codens <= t)
        if sub.size < 3:
            continue
        dg = rips_persistence(pts[sub], degree=1, max_edge=config.max_edge_length)
        for pair in dg.finite(1):
            bu, bv = pair.birth_simplex
            du, dv = _longest_edge(pts[sub], pair.death_simplex)
            pid = len(measure.bars)
            measure.bars.append(
                PersistenceBar(
                    pair_id=pid,
                    slice_index=s,
                    birth=pair.birth,
                    death=pair.death,
                    birth_edge=(int(sub[bu]), int(sub[bv])),
                    death_edge=(int(sub[du]), int(sub[dv])),
                )
            )
            measure.masses.append(((pair.birth, s), +1, pid))
            measure.masses.append(((pair.death, s), -1, pid))
    return measure


def persistence_loss(measure: SignedMeasure) -> float:
    """Total persistence over all slices (the transport cost to the zero measure)."""
    return float(sum(bar.death - bar.birth for bar in measure.bars))


def loss_gradient(points, measure: SignedMeasure) -> np.ndarray:
    """d(loss)/d(points): unit vectors at each bar's critical edges.

    The death edge is stretched (+) and the birth edge contracted (-);
    contributions sum over bars and slices. Zero-length critical edges
    cannot occur for positive-persistence bars and are skipped defensively.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    grad = np.zeros_like(pts)
    for bar in measure.bars:
        for (u, v), sign in ((bar.death_edge, 1.0), (bar.birth_edge, -1.0)):
            diff = pts[u] - pts[v]
            nrm = float(np.linalg.norm(diff))
            if nrm <= 0.0:
                continue
            g = sign * diff / nrm
            grad[u] += g
            grad[v] -= g
    return grad


def optimize_points(points, config: PersistenceOptimConfig | None = None):
    """Gradient-ascent refinement of one class subcloud.

    Each step recomputes the in-class KDE (bandwidth ``density_bandwidth``),
    rebuilds the sliced signed measure, and moves the points along the loss
    gradient with rate ``learning_rate``. Returns the final positions and a
    loss trace of length steps+1 (loss after 0..steps updates); clouds with
    fewer than four points or ``steps=0`` come back unchanged with an empty
    trace.
    """
    config = config or PersistenceOptimConfig()
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64)).copy()
    if config.steps == 0 or pts.shape[0] < 4:
        return pts, []
    trace = []
    for _ in range(config.steps):
        dens = kde_values(pts, config.density_bandwidth)
        measure = hilbert_signed_measure(pts, dens, config)
        trace.append(persistence_loss(measure))
        grad = loss_gradient(pts, measure)
        pts = pts + config.learning_rate * grad
    dens = kde_values(pts, config.density_bandwidth)
    trace.append(persistence_loss(hilbert_signed_measure(pts, dens, config)))
    return pts, trace


def persistence_scores(Y, labels: LabelVector, config: PersistenceOptimConfig | None = None) -> ScoreVector:
    """Per-sample displacement magnitude under the class-wise optimizer."""
    config = config or PersistenceOptimConfig()
    coords = np.asarray(getattr(Y, "coords", Y), dtype=np.float64)
    if coords.shape[0] != len(labels):
        raise ValueError(f"{coords.shape[0]} points but {len(labels)} labels")
    out = np.zeros(coords.shape[0], dtype=np.float64)
    for c in range(labels.num_classes):
        idx = np.flatnonzero(labels.labels == c)
        if idx.size == 0:
            continue
        moved, _ = optimize_points(coords[idx], config)
        out[idx] = np.linalg.norm(coords[idx] - moved, axis=1)
    return ScoreVector(out, kind="persistence")


def save_bars_csv(measure: SignedMeasure, path) -> None:
    """Diagram dump: one ``degree,slice,birth,death`` row per bar."""
    with open(path, "w") as fh:
        for bar in measure.bars:
            fh.write(f"1,{bar.slice_index},{bar.birth!r},{bar.death!r}\n")
