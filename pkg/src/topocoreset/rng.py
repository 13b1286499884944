"""Seedable, portable random streams.

Two PRNG families are used across the package and fixed here so results
are reproducible across platforms:

* NumPy ``PCG64`` (via ``numpy.random.default_rng``) for array-level draws
  such as Gaussian perturbation noise and within-stratum sampling. Streams
  are derived from ``SeedSequence`` entropy tuples ``(seed, tag, ...)``.
* SplitMix64 counter streams for the layout optimizer, where every draw is
  keyed by (seed, stream ids, epoch, purpose) so the result is independent
  of iteration schedule. SplitMix64 is numba-friendly and has a published
  reference (Steele, Lea & Flood, 2014).
"""

from __future__ import annotations

import numba
import numpy as np

_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# purpose tags for keyed streams (arbitrary distinct constants)
TAG_PERTURB = 0x33
TAG_STRATUM = 0x44


@numba.njit(numba.uint64(numba.uint64), cache=True)
def _mix64(z):
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> np.uint64(30))) * _MIX1) & _MASK
    z = ((z ^ (z >> np.uint64(27))) * _MIX2) & _MASK
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True)
def key_hash(parts):
    """Fold an int64 array of key parts into one SplitMix64 word."""
    h = np.uint64(0)
    for p in parts:
        h = _mix64(h ^ np.uint64(p))
    return h


@numba.njit(cache=True)
def unit_uniform(h):
    """Map a 64-bit word to a double in [0, 1)."""
    return (h >> np.uint64(11)) * (1.0 / 9007199254740992.0)


def stream(seed: int, *tags: int) -> np.random.Generator:
    """PCG64 generator keyed by (seed, *tags)."""
    entropy = tuple(int(t) & 0xFFFFFFFFFFFFFFFF for t in (seed, *tags))
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(seed: int, tag: int) -> int:
    """Derive a module seed from a master seed, SplitMix64-mixed.

    Clamped to 63 bits so it stays a valid int64 stream key everywhere.
    """
    parts = np.asarray([np.uint64(seed & 0xFFFFFFFFFFFFFFFF).astype(np.int64), tag],
                       dtype=np.int64)
    return int(key_hash(parts)) & 0x7FFFFFFFFFFFFFFF
