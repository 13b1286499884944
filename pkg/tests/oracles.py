"""Independent brute-force oracles used by the test suite.

The homology oracle never touches the production reduction path: it builds
every clique complex in the filtration explicitly, computes persistent
Betti numbers rank(H_k(K_s) -> H_k(K_t)) by GF(2) linear algebra on cycle
and boundary subspaces, and recovers the diagram with the standard
inclusion-exclusion over thresholds. Practical up to ~8 points.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np


def gf2_rank(vectors) -> int:
    """Rank of a set of GF(2) vectors encoded as python-int bitmasks."""
    basis = {}
    rank = 0
    for v in vectors:
        while v:
            p = v.bit_length() - 1
            if p in basis:
                v ^= basis[p]
            else:
                basis[p] = v
                rank += 1
                break
    return rank


def gf2_kernel(cols):
    """Kernel basis (as combination bitmasks over column indices) of the
    GF(2) matrix whose columns are the given row-bitmask vectors."""
    pivots = {}
    kernel = []
    for e, v in enumerate(cols):
        combo = 1 << e
        while v:
            p = v.bit_length() - 1
            if p in pivots:
                pv, pc = pivots[p]
                v ^= pv
                combo ^= pc
            else:
                pivots[p] = (v, combo)
                break
        if v == 0:
            kernel.append(combo)
    return kernel


def rips_diagram_oracle(points, max_edge=None):
    """Exact H0/H1 Vietoris-Rips diagrams of a small point cloud.

    Returns {degree: (finite [(birth, death)...], essential_births [...])}
    with zero-persistence pairs dropped, matching the production convention.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = pts.shape[0]
    if n == 1:
        return {0: ([], [0.0]), 1: ([], [])}
    r_user = math.inf if max_edge is None else float(max_edge)

    edges = []
    for i, j in combinations(range(n), 2):
        w = float(np.linalg.norm(pts[i] - pts[j]))
        if w <= r_user:
            edges.append((w, i, j))
    edges.sort()
    edge_id = {(i, j): e for e, (w, i, j) in enumerate(edges)}
    tris = []
    for i, j, k in combinations(range(n), 3):
        if (i, j) in edge_id and (i, k) in edge_id and (j, k) in edge_id:
            w = max(edges[edge_id[(i, j)]][0], edges[edge_id[(i, k)]][0], edges[edge_id[(j, k)]][0])
            tris.append((w, i, j, k))

    thresholds = sorted({0.0} | {w for w, _, _ in edges})
    n_t = len(thresholds)

    # per threshold: boundary-1 columns (vertex masks) and triangle boundary
    # columns (edge masks), plus Z1 kernel bases
    b0 = []          # beta_0 of K_t
    z1_bases = []    # kernel of d1 at K_t
    tri_cols = []    # image generators of d2 at K_t
    for t in range(n_t):
        val = thresholds[t]
        cols1 = []
        for e, (w, i, j) in enumerate(edges):
            if w <= val:
                cols1.append((1 << i) | (1 << j))
            else:
                cols1.append(0)  # keep global edge coordinates aligned
        live = [c for c in cols1 if c]
        b0.append(n - gf2_rank(live))
        kernel = [combo for combo in gf2_kernel(cols1)
                  if all(edges[e][0] <= val for e in _bits(combo))]
        z1_bases.append(kernel)
        cols2 = []
        for w, i, j, k in tris:
            if w <= val:
                cols2.append(
                    (1 << edge_id[(i, j)]) | (1 << edge_id[(i, k)]) | (1 << edge_id[(j, k)])
                )
        tri_cols.append(cols2)

    # persistent Betti numbers
    def beta0(s, t):
        return b0[t] if s >= 0 else 0

    b1_rank = [gf2_rank(list(cols)) for cols in tri_cols]
    z1_dim = [len(b) for b in z1_bases]

    def beta1(s, t):
        if s < 0:
            return 0
        inter = z1_dim[s] + b1_rank[t] - gf2_rank(z1_bases[s] + tri_cols[t])
        return z1_dim[s] - inter

    out = {}
    for deg, beta in ((0, beta0), (1, beta1)):
        finite = []
        essential = []
        table = [[beta(s, t) for t in range(n_t)] for s in range(n_t)]
        for i in range(n_t):
            for j in range(i + 1, n_t):
                mult = (table[i][j - 1] - table[i][j]) - (
                    (table[i - 1][j - 1] - table[i - 1][j]) if i > 0 else 0
                )
                for _ in range(mult):
                    if thresholds[j] > thresholds[i]:
                        finite.append((thresholds[i], thresholds[j]))
            mult_inf = table[i][n_t - 1] - (table[i - 1][n_t - 1] if i > 0 else 0)
            for _ in range(mult_inf):
                essential.append(thresholds[i])
        out[deg] = (sorted(finite), sorted(essential))
    return out


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def diagrams_close(got, expected, atol=1e-12):
    """Compare (finite, essential) per degree with a value tolerance."""
    for deg in (0, 1):
        gf, ge = got[deg]
        ef, ee = expected[deg]
        if len(gf) != len(ef) or len(ge) != len(ee):
            return False
        for (b1, d1), (b2, d2) in zip(sorted(gf), sorted(ef)):
            if abs(b1 - b2) > atol or abs(d1 - d2) > atol:
                return False
        for x, y in zip(sorted(ge), sorted(ee)):
            if abs(x - y) > atol:
                return False
    return True


def diagram_to_oracle_format(diagram):
    """Flatten a production PersistenceDiagram for comparison."""
    out = {}
    for deg in (0, 1):
        finite = sorted((p.birth, p.death) for p in diagram.finite(deg))
        essential = sorted(p.birth for p in diagram.essential(deg))
        out[deg] = (finite, essential)
    return out


def bottleneck_oracle(a_pairs, b_pairs):
    """Exhaustive bottleneck distance between two small finite diagrams.

    Every subset of A may match the diagonal; the rest matches an injection
    into B; unmatched B points go to the diagonal. Exponential, fine for
    up to ~5 points a side.
    """
    from itertools import combinations, permutations

    def diag(p):
        return (p[1] - p[0]) / 2.0

    best = math.inf
    idx_a = list(range(len(a_pairs)))
    for k in range(len(a_pairs) + 1):
        for to_diag in combinations(idx_a, k):
            rest = [i for i in idx_a if i not in to_diag]
            if len(rest) > len(b_pairs):
                continue
            base = max((diag(a_pairs[i]) for i in to_diag), default=0.0)
            for chosen in permutations(range(len(b_pairs)), len(rest)):
                cost = base
                for i, j in zip(rest, chosen):
                    cost = max(
                        cost,
                        abs(a_pairs[i][0] - b_pairs[j][0]),
                        abs(a_pairs[i][1] - b_pairs[j][1]),
                    )
                for j in range(len(b_pairs)):
                    if j not in chosen:
                        cost = max(cost, diag(b_pairs[j]))
                best = min(best, cost)
    return best
