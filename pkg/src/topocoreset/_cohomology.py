"""Coboundary-based H1 reduction (anti-transpose of the triangle boundary).

Edge columns are processed youngest-first; a column holds the edge's
triangle cofacets and its pivot is the oldest one in filtration order.
This computes exactly the pairs of the textbook boundary-matrix reduction,
but almost every column claims its pivot untouched, and untouched columns
are regenerable from their edge, so nothing is stored for them (the
emergent/apparent-pairs effect). Untouched columns only need the minimum
cofacet (one O(n) scan); chained reductions run on a lazy binary heap with
mod-2 pair cancellation. Spanning-forest edges are skipped outright
(clearing): they belong to vertex-edge pairs and always reduce to zero.

Triangles are keyed by (filtration value, packed vertex id) so ties break
lexicographically, matching the rest of the package.
"""

from __future__ import annotations

import numba
import numpy as np
from numba import types
from numba.typed import Dict

OVERFLOW = 1
OK = 0


@numba.njit(cache=True, inline="always")
def _pack(i, j, k, n):
    return (i * n + j) * n + k


@numba.njit(cache=True, inline="always")
def _tri_value(u, v, k, w_uv, D):
    val = w_uv
    duk = D[u, k]
    dvk = D[v, k]
    if duk > val:
        val = duk
    if dvk > val:
        val = dvk
    return val


@numba.njit(cache=True, inline="always")
def _tri_key(u, v, k, n):
    a, b, c = u, v, k
    if a > b:
        a, b = b, a
    if c < a:
        a, b, c = c, a, b
    elif c < b:
        b, c = c, b
    return _pack(a, b, c, n)


@numba.njit(cache=True)
def _min_cofacet(u, v, w_uv, D, r, n):
    """Oldest cofacet of edge (u, v): returns (found, value, id)."""
    best_val = np.inf
    best_id = np.int64(-1)
    for k in range(n):
        if k == u or k == v:
            continue
        if D[u, k] <= r and D[v, k] <= r:
            val = _tri_value(u, v, k, w_uv, D)
            tid = _tri_key(u, v, k, n)
            if val < best_val or (val == best_val and tid < best_id):
                best_val = val
                best_id = tid
    return best_id >= 0, best_val, best_id


@numba.njit(cache=True, inline="always")
def _heap_push(hval, hid, hn, val, tid):
    i = hn
    hval[i] = val
    hid[i] = tid
    while i > 0:
        p = (i - 1) >> 1
        if hval[p] > hval[i] or (hval[p] == hval[i] and hid[p] > hid[i]):
            hval[p], hval[i] = hval[i], hval[p]
            hid[p], hid[i] = hid[i], hid[p]
            i = p
        else:
            break
    return hn + 1


@numba.njit(cache=True, inline="always")
def _heap_pop(hval, hid, hn):
    n = hn - 1
    hval[0] = hval[n]
    hid[0] = hid[n]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= n:
            break
        m = l
        rgt = l + 1
        if rgt < n and (hval[rgt] < hval[l] or (hval[rgt] == hval[l] and hid[rgt] < hid[l])):
            m = rgt
        if hval[m] < hval[i] or (hval[m] == hval[i] and hid[m] < hid[i]):
            hval[m], hval[i] = hval[i], hval[m]
            hid[m], hid[i] = hid[i], hid[m]
            i = m
        else:
            break
    return n


@numba.njit(cache=True)
def _push_cofacets(u, v, w_uv, D, r, n, hval, hid, hn, skip_id):
    """Push every cofacet of (u, v) except skip_id; returns new size or -1."""
    cap = hval.shape[0]
    for k in range(n):
        if k == u or k == v:
            continue
        if D[u, k] <= r and D[v, k] <= r:
            tid = _tri_key(u, v, k, n)
            if tid == skip_id:
                continue
            if hn >= cap:
                return -1
            hn = _heap_push(hval, hid, hn, _tri_value(u, v, k, w_uv, D), tid)
    return hn


@numba.njit(cache=True)
def cohomology_h1(D, r, eu, ev, ew, forest, heap_cap, arena_cap):
    """All (positive edge, triangle) persistence pairs plus unpaired edges.

    Returns (status, out_edge, out_tri_id, out_val, n_out, ess_edge, n_ess).
    out_* includes zero-persistence pairs (the caller filters); ess_edge
    lists positive edges whose class never dies under the threshold.
    status != OK means a buffer overflowed; retry with more room.
    """
    n = D.shape[0]
    n_edges = ew.shape[0]

    # pivot registry: triangle id -> arena column index (>= 0) or
    # -(edge rank)-1 for a column still equal to that edge's cofacets
    owner = Dict.empty(key_type=types.int64, value_type=types.int64)

    stored_start = np.empty(n_edges + 1, dtype=np.int64)
    stored_len = np.empty(n_edges + 1, dtype=np.int64)
    arena_val = np.empty(arena_cap, dtype=np.float64)
    arena_id = np.empty(arena_cap, dtype=np.int64)
    arena_used = 0
    n_stored = 0

    hval = np.empty(heap_cap, dtype=np.float64)
    hid = np.empty(heap_cap, dtype=np.int64)

    out_edge = np.empty(n_edges, dtype=np.int64)
    out_tri = np.empty(n_edges, dtype=np.int64)
    out_val = np.empty(n_edges, dtype=np.float64)
    n_out = 0
    ess_edge = np.empty(n_edges, dtype=np.int64)
    n_ess = 0

    for e in range(n_edges - 1, -1, -1):
        if forest[e]:
            continue
        u = eu[e]
        v = ev[e]
        found, t0_val, t0_id = _min_cofacet(u, v, ew[e], D, r, n)
        if not found:
            ess_edge[n_ess] = e
            n_ess += 1
            continue
        if t0_id not in owner:
            # untouched column: claim without materializing anything
            owner[t0_id] = np.int64(-e - 1)
            out_edge[n_out] = e
            out_tri[n_out] = t0_id
            out_val[n_out] = t0_val
            n_out += 1
            continue

        hn = _push_cofacets(u, v, ew[e], D, r, n, hval, hid, 0, np.int64(-1))
        if hn < 0:
            return OVERFLOW, out_edge, out_tri, out_val, n_out, ess_edge, n_ess
        while True:
            # pop with mod-2 cancellation to expose the true pivot
            pv = np.float64(0.0)
            pid = np.int64(-1)
            while hn > 0:
                tv = hval[0]
                tid = hid[0]
                hn = _heap_pop(hval, hid, hn)
                parity = 1
                while hn > 0 and hid[0] == tid:
                    hn = _heap_pop(hval, hid, hn)
                    parity ^= 1
                if parity == 1:
                    pv = tv
                    pid = tid
                    break
            if pid < 0:
                ess_edge[n_ess] = e
                n_ess += 1
                break
            if pid not in owner:
                # drain the heap to store the reduced column, pivot first
                start = arena_used
                if arena_used >= arena_cap:
                    return OVERFLOW, out_edge, out_tri, out_val, n_out, ess_edge, n_ess
                arena_val[arena_used] = pv
                arena_id[arena_used] = pid
                arena_used += 1
                while hn > 0:
                    tv = hval[0]
                    tid = hid[0]
                    hn = _heap_pop(hval, hid, hn)
                    parity = 1
                    while hn > 0 and hid[0] == tid:
                        hn = _heap_pop(hval, hid, hn)
                        parity ^= 1
                    if parity == 1:
                        if arena_used >= arena_cap:
                            return OVERFLOW, out_edge, out_tri, out_val, n_out, ess_edge, n_ess
                        arena_val[arena_used] = tv
                        arena_id[arena_used] = tid
                        arena_used += 1
                stored_start[n_stored] = start
                stored_len[n_stored] = arena_used - start
                owner[pid] = np.int64(n_stored)
                n_stored += 1
                out_edge[n_out] = e
                out_tri[n_out] = pid
                out_val[n_out] = pv
                n_out += 1
                break
            own = owner[pid]
            if own < 0:
                # add the owner's implicit column, minus the shared pivot
                oe = np.int64(-own - 1)
                hn = _push_cofacets(eu[oe], ev[oe], ew[oe], D, r, n, hval, hid, hn, pid)
                if hn < 0:
                    return OVERFLOW, out_edge, out_tri, out_val, n_out, ess_edge, n_ess
            else:
                s0 = stored_start[own]
                sl = stored_len[own]
                if hn + sl - 1 > heap_cap:
                    return OVERFLOW, out_edge, out_tri, out_val, n_out, ess_edge, n_ess
                for x in range(s0 + 1, s0 + sl):  # skip the shared pivot
                    hn = _heap_push(hval, hid, hn, arena_val[x], arena_id[x])
    return OK, out_edge, out_tri, out_val, n_out, ess_edge, n_ess
