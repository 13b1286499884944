"""Unified scoring and class-distribution-preserving stratified sampling.

Class budgets come from largest-remainder apportionment of the total kept
count, proportional to the original class counts, so the coreset keeps the
dataset's (possibly unbalanced) class mix. Within a class the unified-score
range is cut into equal-width strata that are visited smallest-population
first with ceiling quotas, drawing uniformly without replacement inside
each stratum.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .io import LabelVector, ScoreVector, SelectionResult
from .rng import TAG_STRATUM, stream


@dataclass
class SelectionConfig:
    alpha: float = 0.5
    beta: float = 0.5
    pruning_rate: float = 0.5
    strata: int = 50
    seed: int = 0
    normalization: str = "global"   # or "per_class"

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0 or not 0.0 <= self.beta <= 1.0:
            raise ValueError("alpha and beta must lie in [0, 1]")
        if not 0.0 < self.pruning_rate < 1.0:
            raise ValueError(f"pruning rate must be in (0,1), got {self.pruning_rate}")
        if self.strata < 1:
            raise ValueError("need at least one stratum")
        if self.normalization not in ("global", "per_class"):
            raise ValueError(f"unknown normalization {self.normalization!r}")


def _minmax(values: np.ndarray) -> np.ndarray:
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def unified_scores(
    pers: ScoreVector,
    dens: ScoreVector,
    alpha: float = 0.5,
    beta: float = 0.5,
    normalization: str = "global",
    labels: LabelVector | None = None,
) -> ScoreVector:
    """alpha * normalized persistence + beta * normalized density.

    Inputs are min-max normalized to [0, 1] (globally by default; per class
    when requested, which needs labels). Constant inputs normalize to zero.
    """
    if len(pers) != len(dens):
        raise ValueError(f"score lengths differ: {len(pers)} vs {len(dens)}")
    if normalization == "global":
        p = _minmax(pers.values)
        d = _minmax(dens.values)
    elif normalization == "per_class":
        if labels is None:
            raise ValueError("per-class normalization needs labels")
        p = np.zeros(len(pers))
        d = np.zeros(len(dens))
        for c in range(labels.num_classes):
            idx = np.flatnonzero(labels.labels == c)
            if idx.size:
                p[idx] = _minmax(pers.values[idx])
                d[idx] = _minmax(dens.values[idx])
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    out = alpha * p + beta * d
    return ScoreVector(out, kind="unified", normalized=bool(alpha + beta <= 1.0))


def largest_remainder(total: int, weights: np.ndarray) -> np.ndarray:
    """Integer apportionment of ``total`` proportional to ``weights``."""
    weights = np.asarray(weights, dtype=np.float64)
    if total < 0 or weights.sum() <= 0:
        raise ValueError("need a nonnegative total and positive weight mass")
    quota = total * weights / weights.sum()
    base = np.floor(quota).astype(np.int64)
    short = total - int(base.sum())
    if short > 0:
        frac = quota - base
        order = np.lexsort((np.arange(len(weights)), -frac))
        base[order[:short]] += 1
    return base


def _cap_budgets(budgets: np.ndarray, capacity: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Clip class budgets to capacity, redistributing surplus proportionally."""
    budgets = budgets.copy()
    for _ in range(len(budgets)):
        over = budgets > capacity
        if not over.any():
            return budgets
        surplus = int((budgets[over] - capacity[over]).sum())
        budgets[over] = capacity[over]
        room = (budgets < capacity) & ~over
        if surplus == 0:
            return budgets
        if not room.any():
            warnings.warn("kept-count budget exceeds the clean pool; keeping everything")
            return np.minimum(budgets, capacity)
        add = largest_remainder(surplus, weights * room)
        budgets = np.minimum(budgets + add, capacity)
    return budgets


def stratified_sample(
    clean_indices: np.ndarray,
    unified: ScoreVector,
    labels: LabelVector,
    config: SelectionConfig,
) -> SelectionResult:
    """Seeded stratified draw over the clean pool.

    The kept count is round((1 - pruning_rate) * N_clean); per-class budgets
    follow the original class proportions (largest remainder), capped at the
    clean class sizes with a warning when saturated.
    """
    clean = np.asarray(clean_indices, dtype=np.int64)
    if clean.size == 0:
        raise ValueError("clean index set is empty")
    if len(unified) != len(labels):
        raise ValueError("scores and labels disagree on N")
    n_clean = clean.size
    total = int(np.floor((1.0 - config.pruning_rate) * n_clean + 0.5))
    total = max(total, 1)

    class_weights = labels.class_counts().astype(np.float64)
    clean_labels = labels.labels[clean]
    capacity = np.bincount(clean_labels, minlength=labels.num_classes)
    present = capacity > 0
    budgets = largest_remainder(total, class_weights * present)
    budgets = _cap_budgets(budgets, capacity, class_weights * present)

    kept: list[int] = []
    per_class: dict[int, int] = {}
    for c in range(labels.num_classes):
        if budgets[c] == 0:
            per_class[c] = 0
            continue
        members = clean[clean_labels == c]
        chosen = _sample_class(members, unified.values[members], int(budgets[c]), config, c)
        kept.extend(chosen)
        per_class[c] = len(chosen)
    return SelectionResult(
        kept_indices=np.asarray(sorted(kept), dtype=np.int64),
        pruning_rate=config.pruning_rate,
        per_class_counts=per_class,
    )


def _sample_class(members, scores, budget, config, class_id):
    """Equal-width strata, visited by ascending population, ceiling quotas."""
    rng = stream(config.seed, TAG_STRATUM, class_id)
    if budget >= members.size:
        return list(members)
    lo, hi = scores.min(), scores.max()
    nb = config.strata
    if hi == lo:
        strata_of = np.zeros(members.size, dtype=np.int64)
    else:
        strata_of = np.minimum(((scores - lo) / (hi - lo) * nb).astype(np.int64), nb - 1)
    pops = np.bincount(strata_of, minlength=nb)
    visit = np.lexsort((np.arange(nb), pops))

    chosen: list[int] = []
    remaining = budget
    leftovers: list[np.ndarray] = []
    for rank, s in enumerate(visit):
        members_s = members[strata_of == s]
        quota = int(np.ceil(remaining / (nb - rank)))
        take = min(members_s.size, quota, remaining)
        if take > 0:
            pick = rng.choice(members_s, size=take, replace=False)
            chosen.extend(int(i) for i in pick)
            remaining -= take
            members_s = np.setdiff1d(members_s, pick)
        if members_s.size:
            leftovers.append(members_s)
    if remaining > 0 and leftovers:
        pool = np.concatenate(leftovers)
        pick = rng.choice(np.sort(pool), size=min(remaining, pool.size), replace=False)
        chosen.extend(int(i) for i in pick)
    return chosen
