import numpy as np
import pytest

from topocoreset import (
    LabelVector,
    ScoreVector,
    SelectionConfig,
    largest_remainder,
    stratified_sample,
    unified_scores,
)


def make_scores(values, kind):
    return ScoreVector(np.asarray(values, dtype=float), kind=kind)


# --------------------------------------------------------------- unified


def test_weighted_combination_arithmetic():
    pers = make_scores([0.0, 0.4, 1.0], "persistence")
    dens = make_scores([0.0, 0.6, 1.0], "density")
    out = unified_scores(pers, dens, alpha=0.5, beta=0.5)
    assert out.values[1] == pytest.approx(0.5)
    assert out.kind == "unified"
    assert out.normalized


def test_alpha_only_preserves_argsort():
    rng = np.random.default_rng(0)
    pers = make_scores(rng.uniform(size=50), "persistence")
    dens = make_scores(rng.uniform(size=50), "density")
    out = unified_scores(pers, dens, alpha=1.0, beta=0.0)
    np.testing.assert_array_equal(np.argsort(out.values), np.argsort(pers.values))


def test_constant_density_degenerates():
    rng = np.random.default_rng(1)
    pers = make_scores(rng.uniform(size=20), "persistence")
    dens = make_scores(np.full(20, 3.3), "density")
    out = unified_scores(pers, dens, alpha=0.7, beta=0.3)
    pn = (pers.values - pers.values.min()) / np.ptp(pers.values)
    np.testing.assert_allclose(out.values, 0.7 * pn)


def test_length_mismatch_rejected():
    with pytest.raises(ValueError):
        unified_scores(make_scores([1.0], "persistence"), make_scores([1.0, 2.0], "density"))


def test_normalized_flag_follows_weight_sum():
    pers = make_scores([0.0, 1.0], "persistence")
    dens = make_scores([1.0, 0.0], "density")
    assert unified_scores(pers, dens, alpha=0.5, beta=0.5).normalized
    out = unified_scores(pers, dens, alpha=1.0, beta=1.0)
    assert not out.normalized
    assert out.values.max() <= 2.0


def test_per_class_normalization_mode():
    labels = LabelVector(np.array([0, 0, 1, 1]), 2)
    pers = make_scores([0.0, 1.0, 10.0, 30.0], "persistence")
    dens = make_scores([0.0, 0.0, 0.0, 0.0], "density")
    out = unified_scores(pers, dens, alpha=1.0, beta=0.0,
                         normalization="per_class", labels=labels)
    np.testing.assert_allclose(out.values, [0.0, 1.0, 0.0, 1.0])


# --------------------------------------------------------------- apportionment


def test_largest_remainder_exact_proportion():
    np.testing.assert_array_equal(largest_remainder(50, np.array([60.0, 40.0])), [30, 20])


def test_largest_remainder_total_always_met():
    rng = np.random.default_rng(2)
    for _ in range(50):
        k = int(rng.integers(2, 8))
        w = rng.uniform(0.1, 5.0, size=k)
        total = int(rng.integers(1, 200))
        parts = largest_remainder(total, w)
        assert parts.sum() == total
        assert np.all(parts >= 0)


# --------------------------------------------------------------- stratified sampling


def fixture(seed=3, n=100, classes=(60, 40)):
    rng = np.random.default_rng(seed)
    labels = np.concatenate([np.full(c, i) for i, c in enumerate(classes)])
    scores = ScoreVector(rng.uniform(size=n), kind="unified")
    return labels, scores


def test_budget_rule_60_40():
    labels, scores = fixture()
    cfg = SelectionConfig(pruning_rate=0.5, seed=1)
    res = stratified_sample(np.arange(100), scores, LabelVector(labels, 2), cfg)
    assert res.kept_indices.size == 50
    assert res.per_class_counts == {0: 30, 1: 20}


def test_saturated_class_fully_kept():
    labels = np.array([0] * 90 + [1] * 10)
    rng = np.random.default_rng(4)
    scores = ScoreVector(rng.uniform(size=100), kind="unified")
    # prune class 1's pool down to 2 clean samples; its budget saturates
    clean = np.concatenate([np.arange(90), [90, 91]])
    cfg = SelectionConfig(pruning_rate=0.5, seed=2)
    res = stratified_sample(clean, scores, LabelVector(labels, 2), cfg)
    assert res.kept_indices.size == 46
    assert res.per_class_counts[1] == 2
    assert res.per_class_counts[0] == 44


def test_ascending_population_quota_trace():
    # strata populations [1, 5, 10] with budget 6 must allocate (1, 3, 2)
    labels = np.zeros(16, dtype=int)
    vals = np.concatenate([
        np.full(1, 0.01),                      # stratum 0, population 1
        np.linspace(0.34, 0.35, 5),            # middle stratum, population 5
        np.linspace(0.67, 0.99, 10),           # top stratum, population 10
    ])
    scores = ScoreVector(vals, kind="unified")
    cfg = SelectionConfig(pruning_rate=1 - 6 / 16, strata=3, seed=5)
    res = stratified_sample(np.arange(16), scores, LabelVector(labels, 1), cfg)
    kept = res.kept_indices
    assert kept.size == 6
    takes = [
        np.sum(kept < 1),
        np.sum((kept >= 1) & (kept < 6)),
        np.sum(kept >= 6),
    ]
    assert takes == [1, 3, 2]


def test_deterministic_given_seed_and_subset_of_clean():
    labels, scores = fixture(seed=6)
    clean = np.arange(5, 95)
    cfg = SelectionConfig(pruning_rate=0.7, seed=9, strata=5)
    lv = LabelVector(labels, 2)
    a = stratified_sample(clean, scores, lv, cfg)
    b = stratified_sample(clean, scores, lv, cfg)
    np.testing.assert_array_equal(a.kept_indices, b.kept_indices)
    assert set(a.kept_indices) <= set(clean)
    c = stratified_sample(clean, scores, lv, SelectionConfig(pruning_rate=0.7, seed=10, strata=5))
    assert not np.array_equal(a.kept_indices, c.kept_indices)


def test_affine_rescale_same_selection():
    labels, scores = fixture(seed=7)
    lv = LabelVector(labels, 2)
    cfg = SelectionConfig(pruning_rate=0.6, seed=3)
    base = stratified_sample(np.arange(100), scores, lv, cfg)
    rescaled = ScoreVector(scores.values * 4.25 - 1.75, kind="unified")
    again = stratified_sample(np.arange(100), rescaled, lv, cfg)
    np.testing.assert_array_equal(base.kept_indices, again.kept_indices)


def test_per_class_fraction_within_one_sample():
    rng = np.random.default_rng(8)
    labels = np.concatenate([np.full(c, i) for i, c in enumerate((217, 133, 50))])
    scores = ScoreVector(rng.uniform(size=400), kind="unified")
    lv = LabelVector(labels, 3)
    for p in (0.3, 0.5, 0.9):
        cfg = SelectionConfig(pruning_rate=p, seed=1)
        res = stratified_sample(np.arange(400), scores, lv, cfg)
        total = res.kept_indices.size
        for c, n_c in enumerate((217, 133, 50)):
            expect = total * n_c / 400
            assert abs(res.per_class_counts[c] - expect) <= 1.0


def test_kept_count_budget_rule():
    rng = np.random.default_rng(9)
    labels = rng.integers(0, 3, size=157)
    scores = ScoreVector(rng.uniform(size=157), kind="unified")
    clean = np.sort(rng.choice(157, size=120, replace=False))
    lv = LabelVector(labels, 3)
    for p in (0.25, 0.5, 0.75):
        res = stratified_sample(clean, scores, lv, SelectionConfig(pruning_rate=p, seed=0))
        assert res.kept_indices.size == int(np.floor((1 - p) * 120 + 0.5))
