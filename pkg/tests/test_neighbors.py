import numpy as np
import pytest

from topocoreset import knn_graph, pairwise_distances


def test_line_points_euclidean():
    X = np.array([[0.0], [1.0], [3.0]])
    g = knn_graph(X, k=1, metric="euclidean")
    np.testing.assert_array_equal(g.indices[:, 0], [1, 0, 1])


def test_collinear_vectors_cosine():
    X = np.array([[1.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
    g = knn_graph(X, k=1, metric="cosine")
    assert g.indices[0, 0] == 1
    assert g.distances[0, 0] == pytest.approx(0.0, abs=1e-12)


def test_duplicate_tiebreak_by_index():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(6, 3))
    X[5] = X[2]
    g = knn_graph(X, k=1, metric="euclidean")
    assert g.indices[5, 0] == 2
    assert g.indices[2, 0] == 5


def test_k_too_large_rejected():
    X = np.zeros((3, 2))
    with pytest.raises(ValueError):
        knn_graph(X, k=3, metric="euclidean")


def test_rows_sorted_and_self_excluded():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(40, 8))
    g = knn_graph(X, k=7, metric="cosine")
    for i in range(40):
        assert i not in g.indices[i]
        assert np.all(np.diff(g.distances[i]) >= 0)
    assert g.distances.min() >= 0.0
    assert g.distances.max() <= 2.0


def test_matches_bruteforce_on_random_instances():
    rng = np.random.default_rng(2)
    for metric in ("euclidean", "cosine"):
        for n in (20, 111, 500):
            X = rng.normal(size=(n, 6))
            k = 9
            g = knn_graph(X, k=k, metric=metric)
            D = pairwise_distances(X, metric)
            np.fill_diagonal(D, np.inf)
            ref = np.argsort(D, axis=1, kind="stable")[:, :k]
            np.testing.assert_array_equal(g.indices, ref)


def test_permutation_equivariance():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(30, 5))
    perm = rng.permutation(30)
    g = knn_graph(X, k=4, metric="euclidean")
    gp = knn_graph(X[perm], k=4, metric="euclidean")
    inv = np.empty(30, dtype=int)
    inv[perm] = np.arange(30)
    # neighbor ids of the permuted graph, mapped back, match the original
    np.testing.assert_array_equal(perm[gp.indices[inv]], g.indices)


def test_zero_row_cosine_convention():
    X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
    D = pairwise_distances(X, "cosine")
    np.testing.assert_allclose(D[0, 1:], [1.0, 1.0], atol=1e-15)
