import numpy as np
import pytest

from topocoreset import (
    DataError,
    EmbeddingMatrix,
    FormatError,
    LabelVector,
    ScoreVector,
    SelectionResult,
    ShapeError,
    load_embeddings,
    load_scores,
    load_selection,
    perturb_embeddings,
    save_embeddings,
    save_scores,
    save_selection,
)


def small_dataset():
    Z = EmbeddingMatrix(np.array([[1.0, 2.0], [3.0, 4.0], [0.5, -1.5]], dtype=np.float32))
    y = LabelVector(np.array([0, 1, 0]), num_classes=2)
    return Z, y


def test_csv_parse(tmp_path):
    path = tmp_path / "tiny.csv"
    path.write_text("1.0,2.0,0\n3.0,4.0,1")
    Z, y = load_embeddings(path, format="csv")
    assert Z.data.shape == (2, 2)
    np.testing.assert_array_equal(Z.data, [[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(y.labels, [0, 1])
    assert y.num_classes == 2


def test_binary_roundtrip_bitwise(tmp_path):
    rng = np.random.default_rng(7)
    Z = EmbeddingMatrix(rng.normal(size=(17, 5)).astype(np.float32))
    y = LabelVector(rng.integers(0, 3, size=17), num_classes=3)
    path = tmp_path / "data.tprn"
    save_embeddings(Z, y, path, format="binary")
    Z2, y2 = load_embeddings(path)
    assert Z2.data.tobytes() == Z.data.tobytes()
    np.testing.assert_array_equal(y2.labels, y.labels)
    assert y2.num_classes == 3


def test_csv_roundtrip_bitwise(tmp_path):
    rng = np.random.default_rng(8)
    Z = EmbeddingMatrix(rng.normal(size=(9, 4)).astype(np.float32))
    y = LabelVector(rng.integers(0, 2, size=9), num_classes=2)
    path = tmp_path / "data.csv"
    save_embeddings(Z, y, path, format="csv")
    Z2, y2 = load_embeddings(path, format="csv")
    assert Z2.data.tobytes() == Z.data.tobytes()
    np.testing.assert_array_equal(y2.labels, y.labels)


def test_nan_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,NaN,0\n2.0,3.0,1")
    with pytest.raises(DataError):
        load_embeddings(path, format="csv")


def test_ragged_row_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0,0\n3.0,1")
    with pytest.raises(ShapeError):
        load_embeddings(path, format="csv")


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "bad.tprn"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(FormatError):
        load_embeddings(path, format="binary")


def test_unsupported_version_rejected(tmp_path):
    Z, y = small_dataset()
    path = tmp_path / "data.tprn"
    save_embeddings(Z, y, path, format="binary")
    blob = bytearray(path.read_bytes())
    blob[4] = 9  # version field
    path.write_bytes(bytes(blob))
    with pytest.raises(FormatError):
        load_embeddings(path)


def test_truncated_binary_rejected(tmp_path):
    Z, y = small_dataset()
    path = tmp_path / "data.tprn"
    save_embeddings(Z, y, path, format="binary")
    blob = path.read_bytes()
    path.write_bytes(blob[:-4])
    with pytest.raises(ShapeError):
        load_embeddings(path)


def test_scores_format_contract(tmp_path):
    path = tmp_path / "scores.csv"
    save_scores(ScoreVector(np.array([0.5, 0.25]), kind="density"), path)
    assert path.read_text() == "0,0.5\n1,0.25"
    back = load_scores(path, kind="density")
    np.testing.assert_array_equal(back.values, [0.5, 0.25])


def test_selection_roundtrip(tmp_path):
    sel = SelectionResult(
        kept_indices=np.array([4, 1, 9]),
        pruning_rate=0.5,
        per_class_counts={0: 2, 1: 1},
    )
    path = tmp_path / "sel.json"
    save_selection(sel, path)
    back = load_selection(path)
    np.testing.assert_array_equal(back.kept_indices, [1, 4, 9])
    assert back.pruning_rate == 0.5
    assert back.per_class_counts == {0: 2, 1: 1}


def test_selection_invalid_rate_rejected_before_write(tmp_path):
    with pytest.raises(DataError):
        SelectionResult(kept_indices=np.array([], dtype=int), pruning_rate=1.5)


def test_perturb_zero_multiplier_is_identity():
    Z, _ = small_dataset()
    out = perturb_embeddings(Z, multiplier=0.0, seed=3)
    assert out.data.tobytes() == Z.data.tobytes()


def test_perturb_constant_row_unchanged():
    Z = EmbeddingMatrix(np.array([[2.0, 2.0, 2.0], [1.0, 5.0, 9.0]], dtype=np.float32))
    out = perturb_embeddings(Z, multiplier=4.0, seed=11)
    np.testing.assert_array_equal(out.data[0], Z.data[0])
    assert not np.array_equal(out.data[1], Z.data[1])


def test_perturb_noise_scale_tracks_row_std():
    # frozen check: empirical std of the added noise within 5% of sigma_z
    rng = np.random.default_rng(0)
    row = rng.normal(loc=3.0, scale=2.5, size=1000).astype(np.float32)
    Z = EmbeddingMatrix(row[None, :])
    sigma = float(Z.data[0].astype(np.float64).std())
    out = perturb_embeddings(Z, multiplier=1.0, seed=42)
    noise = out.data[0].astype(np.float64) - Z.data[0].astype(np.float64)
    assert abs(noise.std() - sigma) / sigma < 0.05


def test_perturb_seed_reproducible():
    Z, _ = small_dataset()
    a = perturb_embeddings(Z, multiplier=0.5, seed=9)
    b = perturb_embeddings(Z, multiplier=0.5, seed=9)
    c = perturb_embeddings(Z, multiplier=0.5, seed=10)
    assert a.data.tobytes() == b.data.tobytes()
    assert a.data.tobytes() != c.data.tobytes()


def test_labels_validated():
    with pytest.raises(DataError):
        LabelVector(np.array([0, 3]), num_classes=2)


def test_embedding_rejects_nonfinite():
    with pytest.raises(DataError):
        EmbeddingMatrix(np.array([[1.0, np.inf]]))
