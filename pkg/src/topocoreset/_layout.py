"""Numba kernels for the low-dimensional layout optimizer.

All randomness is drawn from SplitMix64 counter streams keyed by
(seed, stream ids, epoch, purpose), so a run is a pure function of its
inputs and relabeling the stream ids relabels the result.
"""

from __future__ import annotations

import numba
import numpy as np

from .rng import _mix64, unit_uniform

_TAG_INIT = np.uint64(0xA5A5)
_TAG_NEG = np.uint64(0x5A5A)


@numba.njit(numba.uint64(numba.uint64, numba.int64), cache=True, inline="always")
def _fold(h, x):
    return _mix64(h ^ np.uint64(x))


@numba.njit(cache=True)
def init_coords(sids, seed, dim):
    """Seeded iid uniform init in [-10, 10]^dim, one stream per row id."""
    n = sids.shape[0]
    out = np.empty((n, dim), dtype=np.float64)
    for i in range(n):
        for t in range(dim):
            h = _fold(_TAG_INIT, seed)
            h = _fold(h, sids[i])
            h = _fold(h, t)
            out[i, t] = -10.0 + 20.0 * unit_uniform(h)
    return out


@numba.njit(cache=True, inline="always")
def _is_neighbor(adj_indptr, adj_sids, pos, cand_sid):
    lo = adj_indptr[pos]
    hi = adj_indptr[pos + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        v = adj_sids[mid]
        if v == cand_sid:
            return True
        if v < cand_sid:
            lo = mid + 1
        else:
            hi = mid
    return False


@numba.njit(cache=True)
def optimize_layout_kernel(
    coords,
    heads_pos,
    tails_pos,
    heads_sid,
    tails_sid,
    epochs_per_sample,
    adj_indptr,
    adj_sids,
    sid_of,
    sid_to_pos,
    epochs,
    lr,
    a,
    b,
    neg_samples,
    seed,
    synchronized,
):
    """SGD over the fuzzy graph: attraction along sampled edges, repulsion
    from sampled non-neighbors. Edges fire on the deterministic
    epochs-per-sample schedule (frequency proportional to their membership
    strength). Sequential mode updates in place in canonical stream-id
    order and is the conformance reference; synchronized mode accumulates
    an epoch buffer so updates commute.
    """
    n, dim = coords.shape
    n_edges = epochs_per_sample.shape[0]
    # shifted so the strongest edges fire from the very first epoch
    next_fire = epochs_per_sample - 1.0
    buf = np.zeros((n, dim), dtype=np.float64)
    min_d2 = 1e-6  # distance floor 1e-3, squared

    for e in range(epochs):
        alpha = lr * (1.0 - e / epochs)
        if synchronized:
            for i in range(n):
                for t in range(dim):
                    buf[i, t] = 0.0
        for idx in range(n_edges):
            if next_fire[idx] > e:
                continue
            next_fire[idx] += epochs_per_sample[idx]
            u = heads_pos[idx]
            v = tails_pos[idx]
            su = heads_sid[idx]
            sv = tails_sid[idx]

            d2 = 0.0
            for t in range(dim):
                diff = coords[u, t] - coords[v, t]
                d2 += diff * diff
            if d2 < min_d2:
                d2 = min_d2
            pd2b = d2 ** b
            coeff = (-2.0 * a * b * pd2b) / (d2 * (1.0 + a * pd2b))
            for t in range(dim):
                g = coeff * (coords[u, t] - coords[v, t])
                if g > 4.0:
                    g = 4.0
                elif g < -4.0:
                    g = -4.0
                if synchronized:
                    buf[u, t] += alpha * g
                    buf[v, t] -= alpha * g
                else:
                    coords[u, t] += alpha * g
                    coords[v, t] -= alpha * g

            for side in range(2):
                head = u if side == 0 else v
                for m in range(neg_samples):
                    cand = -1
                    for attempt in range(16):
                        h = _fold(_TAG_NEG, seed)
                        h = _fold(h, su)
                        h = _fold(h, sv)
                        h = _fold(h, e)
                        h = _fold(h, side)
                        h = _fold(h, m)
                        h = _fold(h, attempt)
                        c = np.int64(h % np.uint64(n))
                        if c == sid_of[head]:
                            continue
                        if _is_neighbor(adj_indptr, adj_sids, head, c):
                            continue
                        cand = c
                        break
                    if cand < 0:
                        continue
                    w = sid_to_pos[cand]
                    d2 = 0.0
                    for t in range(dim):
                        diff = coords[head, t] - coords[w, t]
                        d2 += diff * diff
                    if d2 < min_d2:
                        d2 = min_d2
                    pd2b = d2 ** b
                    coeff = (2.0 * b) / ((0.001 + d2) * (1.0 + a * pd2b))
                    for t in range(dim):
                        g = coeff * (coords[head, t] - coords[w, t])
                        if g > 4.0:
                            g = 4.0
                        elif g < -4.0:
                            g = -4.0
                        if synchronized:
                            buf[head, t] += alpha * g
                        else:
                            coords[head, t] += alpha * g
        if synchronized:
            for i in range(n):
                for t in range(dim):
                    coords[i, t] += buf[i, t]
    return coords
