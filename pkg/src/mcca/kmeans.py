"""Lloyd k-means with k-means++ seeding and hard assignments.

Written for reproducibility rather than speed at scale:

* Seeding runs over a canonical (lexicographic) ordering of the points, so
  the result does not depend on the order the rows arrive in, only on their
  values and the seed.
* Summations happen in fixed index order; the same seed and data always
  give bit-identical output.
* Empty clusters are repaired by reseeding the empty centroid at the point
  currently farthest from its own centroid (ties: lowest index).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .seeding import derive_rng
from .validation import check_matrix, check_positive_int


@dataclass(frozen=True)
class KMeansModel:
    """Centroids (one per column), final inertia, and the iteration trace."""

    centroids: np.ndarray
    inertia: float
    iterations_run: int
    inertia_history: tuple


def _sq_dists(points, centroids):
    """(N, r) squared euclidean distances, clipped against roundoff negatives."""
    p2 = np.sum(points**2, axis=0)
    c2 = np.sum(centroids**2, axis=0)
    d2 = p2[:, None] + c2[None, :] - 2.0 * (points.T @ centroids)
    return np.maximum(d2, 0.0)


def _plusplus_seeds(points, r, rng):
    n = points.shape[1]
    centroids = np.empty((points.shape[0], r))
    centroids[:, 0] = points[:, int(rng.integers(n))]
    d2 = _sq_dists(points, centroids[:, :1])[:, 0]
    for j in range(1, r):
        total = float(d2.sum())
        if total > 0.0:
            pick = int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right"))
            pick = min(pick, n - 1)
        else:
            pick = int(rng.integers(n))
        centroids[:, j] = points[:, pick]
        d2 = np.minimum(d2, _sq_dists(points, centroids[:, j : j + 1])[:, 0])
    return centroids


def _assign_and_repair(points, centroids):
    """Assign points to nearest centroids, reseeding any empty cluster."""
    d2 = _sq_dists(points, centroids)
    labels = np.argmin(d2, axis=1)
    own = d2[np.arange(points.shape[1]), labels]
    empties = np.flatnonzero(np.bincount(labels, minlength=centroids.shape[1]) == 0)
    if empties.size:
        picker = own.copy()
        for e in empties:
            p = int(np.argmax(picker))
            centroids[:, e] = points[:, p]
            labels[p] = e
            own[p] = 0.0
            picker[p] = -1.0
    return labels, float(own.sum())


def kmeans_fit(points, r, seed=0, max_iter=300, tol=1e-6):
    """Cluster columns of ``points`` (d, N) into ``r`` groups.

    Returns ``(KMeansModel, labels)`` with labels in ``[0, r)``.  Iterates
    until the relative centroid movement drops below ``tol`` or ``max_iter``
    is reached.
    """
    points = check_matrix(points, name="points")
    r = check_positive_int(r, "r")
    max_iter = check_positive_int(max_iter, "max_iter")
    n = points.shape[1]
    if n < r:
        raise ConfigError(f"need at least r={r} points, got {n}")

    # Canonical order makes seeding, and with it the whole run, invariant to
    # permutations of the input columns.
    order = np.lexsort(points[::-1])
    sorted_points = np.ascontiguousarray(points[:, order])
    rng = derive_rng(seed)
    centroids = _plusplus_seeds(sorted_points, r, rng)

    data_scale = max(float(np.sqrt((sorted_points**2).mean() * points.shape[0])), 1e-12)
    history = []
    iterations = 0
    for _ in range(max_iter):
        labels, inertia = _assign_and_repair(sorted_points, centroids)
        history.append(inertia)
        new_centroids = np.empty_like(centroids)
        for j in range(r):
            new_centroids[:, j] = sorted_points[:, labels == j].mean(axis=1)
        movement = float(np.linalg.norm(new_centroids - centroids))
        centroids = new_centroids
        iterations += 1
        if movement / max(float(np.linalg.norm(centroids)), data_scale) < tol:
            break
    labels, inertia = _assign_and_repair(sorted_points, centroids)
    history.append(inertia)

    unsort = np.empty(n, dtype=np.int64)
    unsort[order] = np.arange(n)
    model = KMeansModel(centroids, inertia, iterations, tuple(history))
    return model, labels[unsort]
