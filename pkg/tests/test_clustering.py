import numpy as np
import pytest

from oracles import gaussian_blobs
from xtypes.clustering import ClusterModel, compute_inertia, fit_kmeans
from xtypes.type_repr import KIND_JACCARD, KIND_LOADED, TypeMatrix


def matrix_from(vectors, kind=KIND_LOADED, prefix="t"):
    ids = tuple(f"{prefix}{i:03d}" for i in range(len(vectors)))
    return TypeMatrix(ids, np.asarray(vectors, dtype=np.float64), kind)


def test_two_blob_recovery_exact():
    rng = np.random.default_rng(0)
    points, labels = gaussian_blobs(rng, [(0.0, 0.0), (50.0, 50.0)], 20, 1.0)
    model = fit_kmeans(matrix_from(points), k=2, seed=1)
    got = np.array([model.assignment[t] for t in model.type_ids])
    # Same partition as ground truth, up to relabeling.
    mapping = {}
    for truth, found in zip(labels, got):
        mapping.setdefault(truth, found)
        assert mapping[truth] == found
    assert len(set(mapping.values())) == 2


def test_inertia_non_increasing_over_iterations():
    rng = np.random.default_rng(7)
    points = rng.normal(size=(40, 5))
    model = fit_kmeans(matrix_from(points), k=4, seed=3)
    history = model.inertia_history
    assert history, "expected a recorded inertia history"
    for earlier, later in zip(history, history[1:]):
        assert later <= earlier + 1e-9


def test_determinism():
    rng = np.random.default_rng(3)
    points = rng.normal(size=(30, 4))
    a = fit_kmeans(matrix_from(points), k=5, seed=11)
    b = fit_kmeans(matrix_from(points), k=5, seed=11)
    assert a.assignment == b.assignment
    assert np.array_equal(a.centroids, b.centroids)
    assert a.inertia == b.inertia


def test_row_permutation_gives_same_partition():
    rng = np.random.default_rng(9)
    points = rng.normal(size=(25, 3))
    ids = tuple(f"t{i:03d}" for i in range(25))
    base = TypeMatrix(ids, points, KIND_LOADED)
    order = rng.permutation(25)
    shuffled = TypeMatrix(tuple(ids[i] for i in order), points[order], KIND_LOADED)
    a = fit_kmeans(base, k=4, seed=2)
    b = fit_kmeans(shuffled, k=4, seed=2)
    assert a.assignment == b.assignment


def test_identical_rows_co_assigned():
    rng = np.random.default_rng(21)
    distinct = rng.normal(size=(6, 4)) * 10
    rows = np.vstack([distinct[i % 6] for i in range(18)])
    model = fit_kmeans(matrix_from(rows), k=3, seed=5)
    for i in range(18):
        same = model.assignment[f"t{i:03d}"]
        twin = model.assignment[f"t{(i % 6):03d}"]
        assert same == twin


def test_every_cluster_non_empty():
    rng = np.random.default_rng(2)
    points = rng.normal(size=(12, 2))
    for k in (1, 3, 7, 12):
        model = fit_kmeans(matrix_from(points), k=k, seed=k)
        assert set(model.assignment.values()) == set(range(k))


def test_assignment_is_argmin_of_final_centroids():
    rng = np.random.default_rng(17)
    points = rng.normal(size=(30, 3))
    matrix = matrix_from(points)
    model = fit_kmeans(matrix, k=4, seed=1)
    for i, type_id in enumerate(model.type_ids):
        distances = np.sum((model.centroids - matrix.vectors[i]) ** 2, axis=1)
        assert distances[model.assignment[type_id]] == distances.min()


def test_k_bounds():
    points = np.array([[0.0], [1.0], [2.0]])
    with pytest.raises(ValueError):
        fit_kmeans(matrix_from(points), k=0, seed=0)
    with pytest.raises(ValueError):
        fit_kmeans(matrix_from(points), k=4, seed=0)


def test_k_greater_than_distinct_rows_rejected():
    points = np.array([[0.0], [0.0], [5.0]])
    with pytest.raises(ValueError, match="distinct"):
        fit_kmeans(matrix_from(points), k=3, seed=0)


def test_k_equals_n_distinct_gives_singletons():
    points = np.array([[0.0, 0.0], [5.0, 0.0], [0.0, 5.0]])
    model = fit_kmeans(matrix_from(points), k=3, seed=4)
    assert sorted(model.assignment.values()) == [0, 1, 2]
    assert model.inertia == pytest.approx(0.0)


def test_inertia_matches_recomputation():
    rng = np.random.default_rng(31)
    points = rng.normal(size=(20, 4))
    matrix = matrix_from(points)
    model = fit_kmeans(matrix, k=3, seed=2)
    order = {t: i for i, t in enumerate(model.type_ids)}
    labels = np.array([model.assignment[t] for t in model.type_ids])
    recomputed = compute_inertia(matrix.vectors[[order[t] for t in model.type_ids]], model.centroids, labels)
    assert model.inertia == pytest.approx(recomputed, rel=1e-12)


def test_inertia_non_increasing_in_k_statistically():
    rng = np.random.default_rng(40)
    points = rng.normal(size=(30, 4))
    matrix = matrix_from(points)
    means = []
    for k in (2, 4, 8):
        runs = [fit_kmeans(matrix, k=k, seed=seed).inertia for seed in range(5)]
        means.append(sum(runs) / len(runs))
    assert means[0] >= means[1] - 1e-9
    assert means[1] >= means[2] - 1e-9


def test_save_load_roundtrip(tmp_path):
    rng = np.random.default_rng(13)
    model = fit_kmeans(matrix_from(rng.normal(size=(10, 3))), k=3, seed=6)
    path = tmp_path / "clusters.json"
    model.save(path)
    again = ClusterModel.load(path)
    assert again.assignment == model.assignment
    assert again.k == model.k
    assert np.array_equal(again.centroids, model.centroids)
    assert again.inertia == model.inertia


def test_members_of():
    points = np.array([[0.0], [0.1], [9.0]])
    model = fit_kmeans(matrix_from(points), k=2, seed=0)
    lone = model.assignment["t002"]
    assert model.members_of(lone) == ("t002",)
