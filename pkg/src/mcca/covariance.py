"""Weighted means and ridge-regularized (cross-)covariances per component.

The estimators are deliberately biased: denominators are the component's
weight sum (never N or weight_sum - 1), because that is the quantity the
training objective is defined over.  Ridge terms are added to the
auto-covariances only, after normalization.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError
from .validation import (
    check_matrix,
    check_nonnegative,
    check_positive_int,
    check_weights,
)


@dataclass(frozen=True)
class Hyperparameters:
    """Training knobs: projection dimension k, component count R, ridges, seed."""

    k: int = 1
    r_components: int = 1
    w_x: float = 0.0
    w_y: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "k", check_positive_int(self.k, "k"))
        object.__setattr__(
            self, "r_components", check_positive_int(self.r_components, "r_components")
        )
        object.__setattr__(self, "w_x", check_nonnegative(self.w_x, "w_x"))
        object.__setattr__(self, "w_y", check_nonnegative(self.w_y, "w_y"))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class ComponentCovariances:
    """Weighted first and second moments of one mixture component.

    ``cxx`` and ``cyy`` already include their ridge terms; ``cxy`` never
    does.  ``weight_sum`` is the total weight that produced the estimates.
    """

    mu_x: np.ndarray
    mu_y: np.ndarray
    cxx: np.ndarray
    cyy: np.ndarray
    cxy: np.ndarray
    weight_sum: float


def weighted_stats(x, y, weights, w_x=0.0, w_y=0.0) -> ComponentCovariances:
    """Weighted means and covariances of paired views ``x`` (d_x, N), ``y`` (d_y, N).

    Means first, then centered products (two-pass), everything divided by the
    weight sum.  ``w_x * I`` and ``w_y * I`` are added to cxx and cyy.
    """
    x = check_matrix(x, name="x")
    y = check_matrix(y, name="y")
    if x.shape[1] != y.shape[1]:
        raise ConfigError(
            f"x and y must have the same number of points: {x.shape[1]} vs {y.shape[1]}"
        )
    weights = check_weights(weights, x.shape[1])
    w_x = check_nonnegative(w_x, "w_x")
    w_y = check_nonnegative(w_y, "w_y")
    weight_sum = float(weights.sum())
    if weight_sum <= 0.0:
        raise NumericalError("empty component: weights sum to zero")

    mu_x = (x @ weights) / weight_sum
    mu_y = (y @ weights) / weight_sum
    xc = x - mu_x[:, None]
    yc = y - mu_y[:, None]
    xw = xc * weights
    cxx = (xw @ xc.T) / weight_sum
    cyy = ((yc * weights) @ yc.T) / weight_sum
    cxy = (xw @ yc.T) / weight_sum
    cxx = (cxx + cxx.T) / 2.0 + w_x * np.eye(x.shape[0])
    cyy = (cyy + cyy.T) / 2.0 + w_y * np.eye(y.shape[0])
    return ComponentCovariances(mu_x, mu_y, cxx, cyy, cxy, weight_sum)
