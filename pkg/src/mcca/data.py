"""Paired two-view datasets: container, standardization, context windows.

Data points are COLUMNS: a dataset with N points holds ``x`` with shape
(d_x, N) and ``y`` with shape (d_y, N).
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .validation import check_matrix

# Features whose variance falls below this are centered but not scaled.
VARIANCE_FLOOR = 1e-8


def _freeze(a):
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PairedDataset:
    """Two aligned views plus optional labels and oracle group ids.

    ``x``: (d_x, N) primary view, ``y``: (d_y, N) secondary view.  ``labels``
    is an optional length-N sequence of class ids, ``groups`` an optional
    length-N array of component ids in ``[0, group_count)``.
    """

    x: np.ndarray
    y: np.ndarray
    labels: tuple | None = None
    groups: np.ndarray | None = None
    group_count: int | None = None

    def __post_init__(self):
        x = _freeze(check_matrix(self.x, name="x"))
        y = _freeze(check_matrix(self.y, name="y"))
        if x.shape[1] != y.shape[1]:
            raise DataError(
                f"views disagree on the point count: x has {x.shape[1]}, y has {y.shape[1]}"
            )
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        n = x.shape[1]
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != n:
                raise DataError(f"labels must have length {n}, got {len(labels)}")
            object.__setattr__(self, "labels", labels)
        if self.groups is not None:
            groups = np.asarray(self.groups)
            if groups.shape != (n,):
                raise DataError(f"groups must have length {n}, got {groups.shape}")
            groups = groups.astype(np.int64)
            count = self.group_count
            if count is None:
                count = int(groups.max()) + 1 if n else 0
                object.__setattr__(self, "group_count", count)
            if groups.size and (groups.min() < 0 or groups.max() >= count):
                raise DataError(f"group ids must lie in [0, {count})")
            groups.setflags(write=False)
            object.__setattr__(self, "groups", groups)
        elif self.group_count is not None:
            raise DataError("group_count given without groups")

    @property
    def n_points(self) -> int:
        return self.x.shape[1]

    @property
    def d_x(self) -> int:
        return self.x.shape[0]

    @property
    def d_y(self) -> int:
        return self.y.shape[0]


@dataclass(frozen=True)
class StandardizationStats:
    """Per-group means and stds for both views, reusable on held-out data.

    ``group_ids`` fixes the key order; row g of each array belongs to
    ``group_ids[g]``.  Features floored during fitting keep std 1.0 so that
    applying the stats only centers them.
    """

    group_ids: tuple
    mean_x: np.ndarray
    std_x: np.ndarray
    mean_y: np.ndarray
    std_y: np.ndarray
    floored: bool = field(default=False)

    def apply(self, data: PairedDataset, group_key=None) -> PairedDataset:
        """Standardize ``data`` with the stored statistics."""
        index = self._group_index(data.n_points, group_key)
        x = (data.x - self.mean_x[:, index]) / self.std_x[:, index]
        y = (data.y - self.mean_y[:, index]) / self.std_y[:, index]
        return PairedDataset(x, y, labels=data.labels, groups=data.groups,
                             group_count=data.group_count)

    def _group_index(self, n, group_key):
        if group_key is None:
            if len(self.group_ids) != 1:
                raise DataError("stats were fitted per group; group_key is required")
            return np.zeros(n, dtype=np.int64)
        group_key = list(group_key)
        if len(group_key) != n:
            raise DataError(f"group_key must have length {n}, got {len(group_key)}")
        lookup = {gid: i for i, gid in enumerate(self.group_ids)}
        try:
            return np.array([lookup[g] for g in group_key], dtype=np.int64)
        except KeyError as exc:
            raise DataError(f"unknown group id {exc.args[0]!r}") from None


def _moments(view, cols):
    sub = view[:, cols]
    mean = sub.mean(axis=1)
    var = ((sub - mean[:, None]) ** 2).mean(axis=1)
    floored = var < VARIANCE_FLOOR
    std = np.where(floored, 1.0, np.sqrt(var))
    return mean, std, bool(floored.any())


def standardize(data: PairedDataset, group_key=None):
    """Center and variance-normalize each feature, per group or globally.

    Returns ``(standardized PairedDataset, StandardizationStats)``.  Features
    with variance below the floor are centered only, with a warning.
    """
    if group_key is None:
        ids = (None,)
        cols_per_group = [np.arange(data.n_points)]
    else:
        group_key = list(group_key)
        if len(group_key) != data.n_points:
            raise DataError(
                f"group_key must have length {data.n_points}, got {len(group_key)}"
            )
        ids = tuple(sorted(set(group_key), key=repr))
        cols_per_group = [
            np.array([i for i, g in enumerate(group_key) if g == gid])
            for gid in ids
        ]
    mean_x = np.empty((data.d_x, len(ids)))
    std_x = np.empty_like(mean_x)
    mean_y = np.empty((data.d_y, len(ids)))
    std_y = np.empty_like(mean_y)
    any_floored = False
    for g, cols in enumerate(cols_per_group):
        mean_x[:, g], std_x[:, g], fx = _moments(data.x, cols)
        mean_y[:, g], std_y[:, g], fy = _moments(data.y, cols)
        any_floored = any_floored or fx or fy
    if any_floored:
        warnings.warn("variance floor hit: some features were centered but not scaled")
    stats = StandardizationStats(ids, mean_x, std_x, mean_y, std_y, any_floored)
    return stats.apply(data, group_key), stats


def stack_context(frames, window: int) -> np.ndarray:
    """Stack each column with its ``window`` temporal neighbors.

    Column t of the output is the vertical concatenation of columns
    t - window//2 ... t + window//2 of ``frames``, with edge columns
    replicated at the boundaries.  ``window`` must be odd.
    """
    frames = check_matrix(frames, name="frames")
    if window < 1 or window % 2 == 0:
        raise DataError(f"window must be an odd positive integer, got {window}")
    half = window // 2
    t = frames.shape[1]
    padded = np.pad(frames, ((0, 0), (half, half)), mode="edge")
    return np.concatenate([padded[:, off : off + t] for off in range(window)], axis=0)
