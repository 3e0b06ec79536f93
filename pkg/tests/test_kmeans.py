import numpy as np
import pytest

from mcca.errors import ConfigError
from mcca.kmeans import kmeans_fit


def _blobs(rng, centers, n_each, scale=1.0):
    parts = [c[:, None] + scale * rng.standard_normal((len(c), n_each)) for c in centers]
    return np.hstack(parts)


def test_each_point_its_own_centroid():
    points = np.array([[0.0, 5.0, 9.0], [1.0, 1.0, 1.0]])
    model, labels = kmeans_fit(points, r=3, seed=0)
    assert model.inertia == 0.0
    assert sorted(labels.tolist()) == [0, 1, 2]


def test_single_cluster_centroid_is_mean():
    rng = np.random.default_rng(0)
    points = rng.standard_normal((3, 30))
    model, labels = kmeans_fit(points, r=1, seed=0)
    np.testing.assert_allclose(model.centroids[:, 0], points.mean(axis=1), atol=1e-12)
    assert set(labels.tolist()) == {0}


def test_two_well_separated_blobs_recovered():
    rng = np.random.default_rng(1)
    points = _blobs(rng, [np.zeros(2), np.full(2, 10.0)], 100)
    truth = np.repeat([0, 1], 100)
    _, labels = kmeans_fit(points, r=2, seed=3)
    agree = max(np.mean(labels == truth), np.mean(labels == 1 - truth))
    assert agree == 1.0


def test_rejects_more_clusters_than_points():
    with pytest.raises(ConfigError):
        kmeans_fit(np.ones((2, 3)), r=4, seed=0)


def test_inertia_history_non_increasing():
    rng = np.random.default_rng(2)
    points = rng.standard_normal((4, 200))
    model, _ = kmeans_fit(points, r=5, seed=7)
    history = np.array(model.inertia_history)
    assert np.all(np.diff(history) <= 1e-9)
    assert history[-1] >= 0.0


def test_same_seed_bit_exact():
    rng = np.random.default_rng(3)
    points = rng.standard_normal((3, 120))
    model_a, labels_a = kmeans_fit(points, r=4, seed=11)
    model_b, labels_b = kmeans_fit(points, r=4, seed=11)
    assert model_a.centroids.tobytes() == model_b.centroids.tobytes()
    assert labels_a.tolist() == labels_b.tolist()
    assert model_a.inertia == model_b.inertia


def test_permutation_invariance():
    rng = np.random.default_rng(4)
    points = _blobs(rng, [np.zeros(3), np.full(3, 4.0), np.array([0.0, 8.0, 0.0])], 40)
    model_a, labels_a = kmeans_fit(points, r=3, seed=5)
    perm = rng.permutation(points.shape[1])
    model_b, labels_b = kmeans_fit(points[:, perm], r=3, seed=5)
    assert abs(model_a.inertia - model_b.inertia) <= 1e-9
    # Same clusters on the same points, up to the permutation of input order.
    assert labels_a[perm].tolist() == labels_b.tolist()


def test_empty_cluster_repair_keeps_r_clusters():
    # Three far points and one duplicate pile force an empty cluster at init
    # for some seeds; repair must still return r populated clusters.
    points = np.array([[0.0] * 10 + [100.0, 200.0]])
    for seed in range(5):
        model, labels = kmeans_fit(points, r=3, seed=seed)
        assert len(set(labels.tolist())) == 3
        assert model.inertia <= np.var(points) * points.shape[1]


def test_iterations_bounded_by_max_iter():
    rng = np.random.default_rng(6)
    points = rng.standard_normal((2, 300))
    model, _ = kmeans_fit(points, r=6, seed=1, max_iter=2)
    assert model.iterations_run <= 2
