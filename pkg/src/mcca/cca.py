"""Linear CCA solved from covariance statistics, plus a sklearn-style wrapper.

The solver whitens the cross-covariance with the two inverse square roots,
takes the top-k singular triplets, and maps the singular vectors back
through the whitening transforms.  The resulting projections satisfy
``u.T @ cxx @ u == I_k`` and ``v.T @ cyy @ v == I_k`` against the
(ridge-regularized) covariances they were fitted to.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .covariance import ComponentCovariances, Hyperparameters, weighted_stats
from .errors import ConfigError, DataError
from .linalg import DEFAULT_EIG_FLOOR, inv_sqrt_psd, svd_truncated
from .validation import check_matrix


@dataclass(frozen=True)
class CcaModel:
    """One transformation pair: projections, centers, canonical correlations."""

    u: np.ndarray
    v: np.ndarray
    center_x: np.ndarray
    center_y: np.ndarray
    correlations: np.ndarray
    hyper: Hyperparameters

    @property
    def k(self) -> int:
        return self.u.shape[1]

    def project_x(self, points, centered=True):
        return project(self, "x", points, centered=centered)

    def project_y(self, points, centered=True):
        return project(self, "y", points, centered=centered)


def fit_cca(stats: ComponentCovariances, k: int, hyper: Hyperparameters | None = None,
            eig_floor: float = DEFAULT_EIG_FLOOR) -> CcaModel:
    """Solve one CCA problem from fitted component statistics."""
    d_x, d_y = stats.cxx.shape[0], stats.cyy.shape[0]
    if not 1 <= k <= min(d_x, d_y):
        raise ConfigError(f"k must be in [1, {min(d_x, d_y)}], got {k}")
    if hyper is None:
        hyper = Hyperparameters(k=k)
    isq_x = inv_sqrt_psd(stats.cxx, eig_floor)
    isq_y = inv_sqrt_psd(stats.cyy, eig_floor)
    whitened = isq_x @ stats.cxy @ isq_y
    svd = svd_truncated(whitened, k)
    u = isq_x @ svd.u
    v = isq_y @ svd.v
    return CcaModel(u, v, stats.mu_x.copy(), stats.mu_y.copy(), svd.s, hyper)


def cca_objective(u, v, cxy) -> float:
    """Trace objective ``tr(u.T @ cxy @ v)`` for candidate projections."""
    u = check_matrix(u, name="u")
    v = check_matrix(v, name="v")
    cxy = check_matrix(cxy, name="cxy")
    if cxy.shape != (u.shape[0], v.shape[0]) or u.shape[1] != v.shape[1]:
        raise DataError(
            f"shape mismatch: u {u.shape}, v {v.shape}, cxy {cxy.shape}"
        )
    return float(np.trace(u.T @ cxy @ v))


def project(model: CcaModel, view: str, points, centered=True) -> np.ndarray:
    """Project points (one per column) through one view's transformation."""
    if view not in ("x", "y"):
        raise ConfigError(f"view must be 'x' or 'y', got {view!r}")
    basis = model.u if view == "x" else model.v
    center = model.center_x if view == "x" else model.center_y
    points = np.asarray(points, dtype=np.float64)
    single = points.ndim == 1
    points = check_matrix(points if not single else points[:, None], name="points")
    if points.shape[0] != basis.shape[0]:
        raise DataError(
            f"points have dimension {points.shape[0]}, view {view} expects {basis.shape[0]}"
        )
    out = basis.T @ (points - center[:, None] if centered else points)
    return out[:, 0] if single else out


class LinearCCA(BaseEstimator, TransformerMixin):
    """Canonical correlation analysis on paired views, sklearn conventions.

    Parameters
    ----------
    k : int, projection dimension.
    w_x, w_y : float, ridge added to each view's auto-covariance.
    centered : bool, whether transform subtracts the fitted means.

    Attributes
    ----------
    model_ : CcaModel with the fitted transformation pair.
    correlations_ : (k,) canonical correlations, descending.
    """

    def __init__(self, k=1, w_x=0.0, w_y=0.0, centered=True):
        self.k = k
        self.w_x = w_x
        self.w_y = w_y
        self.centered = centered

    def fit(self, X, Y):
        """Fit on views ``X`` (n_samples, d_x) and ``Y`` (n_samples, d_y)."""
        x = check_matrix(X, name="X").T
        y = check_matrix(Y, name="Y").T
        stats = weighted_stats(x, y, np.ones(x.shape[1]), self.w_x, self.w_y)
        hyper = Hyperparameters(k=self.k, r_components=1, w_x=self.w_x, w_y=self.w_y)
        self.model_ = fit_cca(stats, self.k, hyper)
        self.correlations_ = self.model_.correlations
        return self

    def transform(self, X):
        """Project rows of ``X`` into the canonical space, (n_samples, k)."""
        self._check_fitted()
        return self.model_.project_x(check_matrix(X, name="X").T, self.centered).T

    def transform_y(self, Y):
        self._check_fitted()
        return self.model_.project_y(check_matrix(Y, name="Y").T, self.centered).T

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise ConfigError("this LinearCCA instance is not fitted yet")
