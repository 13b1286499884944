"""Numba kernels for Vietoris-Rips boundary-matrix reduction.

The public API lives in :mod:`topocoreset.persistence`; these kernels do the
O(n^3) triangle enumeration and the Z/2 column reduction over the edge rows.
Columns are kept as descending-sorted rank arrays so the pivot is element 0.
"""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def count_triangles(D, r):
    n = D.shape[0]
    cnt = 0
    for i in range(n):
        for j in range(i + 1, n):
            if D[i, j] <= r:
                for k in range(j + 1, n):
                    if D[i, k] <= r and D[j, k] <= r:
                        cnt += 1
    return cnt


@numba.njit(cache=True)
def fill_triangles(D, r, ti, tj, tk, tval):
    n = D.shape[0]
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            dij = D[i, j]
            if dij <= r:
                for k in range(j + 1, n):
                    dik = D[i, k]
                    djk = D[j, k]
                    if dik <= r and djk <= r:
                        v = dij
                        if dik > v:
                            v = dik
                        if djk > v:
                            v = djk
                        ti[idx] = i
                        tj[idx] = j
                        tk[idx] = k
                        tval[idx] = v
                        idx += 1
    return idx


@numba.njit(cache=True)
def reduce_triangles(ti, tj, tk, edge_rank, n_edges, arena_cap):
    """Standard left-to-right reduction of the triangle boundary columns.

    Returns (status, pair_edge, pair_tri, n_pairs). status 1 means the
    column arena overflowed and the caller should retry with more room.
    Claimed columns are stored fully reduced, so later additions see the
    same state the textbook algorithm would.
    """
    m = ti.shape[0]
    max_pairs = n_edges if n_edges < m else m
    owner = np.full(n_edges, -1, dtype=np.int64)
    stored_start = np.empty(max_pairs, dtype=np.int64)
    stored_len = np.empty(max_pairs, dtype=np.int64)
    pair_edge = np.empty(max_pairs, dtype=np.int64)
    pair_tri = np.empty(max_pairs, dtype=np.int64)
    arena = np.empty(arena_cap, dtype=np.int64)
    cur = np.empty(n_edges, dtype=np.int64)
    tmp = np.empty(n_edges, dtype=np.int64)
    arena_used = 0
    n_stored = 0

    for t in range(m):
        e1 = edge_rank[ti[t], tj[t]]
        e2 = edge_rank[ti[t], tk[t]]
        e3 = edge_rank[tj[t], tk[t]]
        # descending sort of the three boundary ranks
        if e1 < e2:
            e1, e2 = e2, e1
        if e2 < e3:
            e2, e3 = e3, e2
        if e1 < e2:
            e1, e2 = e2, e1
        cur[0] = e1
        cur[1] = e2
        cur[2] = e3
        clen = 3
        while clen > 0:
            pivot = cur[0]
            own = owner[pivot]
            if own < 0:
                if arena_used + clen > arena_cap:
                    return 1, pair_edge, pair_tri, n_stored
                stored_start[n_stored] = arena_used
                stored_len[n_stored] = clen
                for x in range(clen):
                    arena[arena_used + x] = cur[x]
                arena_used += clen
                owner[pivot] = n_stored
                pair_edge[n_stored] = pivot
                pair_tri[n_stored] = t
                n_stored += 1
                break
            # cur ^= stored[own]; both descending, pivots cancel
            s0 = stored_start[own]
            sl = stored_len[own]
            a = 0
            b = 0
            o = 0
            while a < clen and b < sl:
                x = cur[a]
                y = arena[s0 + b]
                if x == y:
                    a += 1
                    b += 1
                elif x > y:
                    tmp[o] = x
                    o += 1
                    a += 1
                else:
                    tmp[o] = y
                    o += 1
                    b += 1
            while a < clen:
                tmp[o] = cur[a]
                o += 1
                a += 1
            while b < sl:
                tmp[o] = arena[s0 + b]
                o += 1
                b += 1
            for x in range(o):
                cur[x] = tmp[x]
            clen = o
    return 0, pair_edge, pair_tri, n_stored


@numba.njit(cache=True)
def union_find_h0(eu, ev, n):
    """Kruskal pass over edges already in filtration order.

    Returns (merge_edge_ids, dying_vertices, parent): merge_edge_ids indexes
    the input edge arrays, dying_vertices is the minimal vertex of the
    component that dies at each merge (elder rule: the component with the
    smaller minimal vertex survives), and parent is the final union-find
    forest for component recovery.
    """
    parent = np.arange(n, dtype=np.int64)
    minv = np.arange(n, dtype=np.int64)
    merge_edge = np.empty(n - 1 if n > 0 else 0, dtype=np.int64)
    dying = np.empty_like(merge_edge)
    n_merge = 0
    for e in range(eu.shape[0]):
        ru = eu[e]
        while parent[ru] != ru:
            parent[ru] = parent[parent[ru]]
            ru = parent[ru]
        rv = ev[e]
        while parent[rv] != rv:
            parent[rv] = parent[parent[rv]]
            rv = parent[rv]
        if ru == rv:
            continue
        if minv[ru] < minv[rv]:
            keep, die = ru, rv
        else:
            keep, die = rv, ru
        parent[die] = keep
        merge_edge[n_merge] = e
        dying[n_merge] = minv[die]
        n_merge += 1
    return merge_edge[:n_merge], dying[:n_merge], parent
