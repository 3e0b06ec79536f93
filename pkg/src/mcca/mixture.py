"""Mixture-of-CCA training, single-view component assignment, and embeddings.

Training is a two-stage heuristic: hard assignments come from k-means (over
a global CCA projection by default, or the native concatenated space), then
each component gets its own CCA fit on its weighted covariances, which is
globally optimal per component given the assignments.  A held-out point with
only the primary view is assigned to the component whose whitened projection
leaves the smallest residual norm, discounted by the log mixing fraction.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .cca import cca_objective, fit_cca
from .covariance import Hyperparameters, weighted_stats
from .data import PairedDataset
from .errors import ConfigError, DataError, NumericalError
from .kmeans import kmeans_fit
from .seeding import STREAM_KMEANS, derive_seed
from .validation import check_matrix

INIT_SPACES = ("cca_projection", "native")


@dataclass(frozen=True)
class Assignment:
    """Hard point-to-component assignments as a one-hot (N, R) matrix."""

    alpha: np.ndarray

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=np.float64, copy=True)
        if alpha.ndim != 2:
            raise DataError(f"alpha must be 2-dimensional, got shape {alpha.shape}")
        if np.any(alpha < 0) or not np.all(np.isfinite(alpha)):
            raise DataError("alpha entries must be finite and nonnegative")
        if np.abs(alpha.sum(axis=1) - 1.0).max() > 1e-12:
            raise DataError("every alpha row must sum to 1")
        if not np.all((alpha == 0.0) | (alpha == 1.0)):
            raise DataError("alpha rows must be one-hot (hard assignments)")
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def from_labels(cls, labels, r_components: int) -> "Assignment":
        labels = np.asarray(labels, dtype=np.int64)
        if labels.ndim != 1:
            raise DataError("labels must be one-dimensional")
        if labels.size and (labels.min() < 0 or labels.max() >= r_components):
            raise DataError(f"labels must lie in [0, {r_components})")
        alpha = np.zeros((labels.shape[0], r_components))
        alpha[np.arange(labels.shape[0]), labels] = 1.0
        return cls(alpha)

    @property
    def labels(self) -> np.ndarray:
        return np.argmax(self.alpha, axis=1)

    @property
    def n_points(self) -> int:
        return self.alpha.shape[0]

    @property
    def r_components(self) -> int:
        return self.alpha.shape[1]


@dataclass(frozen=True)
class MccaModel:
    """R per-component transformation pairs plus mixing fractions."""

    components: tuple
    pi: np.ndarray
    hyper: Hyperparameters

    def __post_init__(self):
        pi = np.array(self.pi, dtype=np.float64, copy=True)
        if pi.shape != (len(self.components),):
            raise DataError("pi must have one entry per component")
        if np.any(pi < 0) or abs(pi.sum() - 1.0) > 1e-12:
            raise DataError("pi must be nonnegative and sum to 1")
        ks = {c.k for c in self.components}
        if len(ks) != 1:
            raise DataError("all components must share the same k")
        pi.setflags(write=False)
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def r_components(self) -> int:
        return len(self.components)

    @property
    def k(self) -> int:
        return self.components[0].k


@dataclass(frozen=True)
class TrainingReport:
    """Fit diagnostics: objective, per-component spectra, sizes, warnings."""

    objective: float
    per_component_correlations: tuple
    component_sizes: tuple
    init_space_used: str
    warnings: tuple = ()


def mcca_objective(models, alpha, data: PairedDataset) -> float:
    """Sum of per-component trace objectives under the given assignments."""
    alpha_arr = (alpha.alpha if isinstance(alpha, Assignment)
                 else np.asarray(alpha, dtype=np.float64))
    if alpha_arr.shape != (data.n_points, len(models)):
        raise DataError(
            f"alpha must have shape ({data.n_points}, {len(models)}), got {alpha_arr.shape}"
        )
    total = 0.0
    for r, model in enumerate(models):
        stats = weighted_stats(data.x, data.y, alpha_arr[:, r])
        total += cca_objective(model.u, model.v, stats.cxy)
    return total


def init_assignments(data: PairedDataset, hyper: Hyperparameters,
                     space: str = "cca_projection") -> Assignment:
    """Cluster the points to bootstrap the assignments.

    ``cca_projection`` clusters the 2k-dimensional concatenation of both
    views' global CCA projections; ``native`` clusters the raw concatenation
    of the views.
    """
    if space not in INIT_SPACES:
        raise ConfigError(f"space must be one of {INIT_SPACES}, got {space!r}")
    if data.n_points < hyper.r_components:
        raise ConfigError(
            f"need at least r_components={hyper.r_components} points, got {data.n_points}"
        )
    if space == "cca_projection":
        stats = weighted_stats(data.x, data.y, np.ones(data.n_points), hyper.w_x, hyper.w_y)
        base = fit_cca(stats, hyper.k, hyper)
        feats = np.vstack([base.project_x(data.x), base.project_y(data.y)])
    else:
        feats = np.vstack([data.x, data.y])
    _, labels = kmeans_fit(feats, hyper.r_components,
                           seed=derive_seed(hyper.seed, STREAM_KMEANS))
    return Assignment.from_labels(labels, hyper.r_components)


def fit_mcca(data: PairedDataset, alpha: Assignment, hyper: Hyperparameters,
             init_space_used: str = "external"):
    """Fit every component's CCA against the fixed assignments.

    Returns ``(MccaModel, TrainingReport)``.  A component with no points is
    an error; a component with fewer than k points only warns (the ridge
    keeps its covariances positive definite).
    """
    if alpha.n_points != data.n_points or alpha.r_components != hyper.r_components:
        raise DataError(
            f"alpha has shape {alpha.alpha.shape}, expected "
            f"({data.n_points}, {hyper.r_components})"
        )
    if hyper.k > min(data.d_x, data.d_y):
        raise ConfigError(
            f"k={hyper.k} exceeds min(d_x, d_y)={min(data.d_x, data.d_y)}"
        )
    components = []
    spectra = []
    sizes = []
    notes = []
    objective = 0.0
    for r in range(hyper.r_components):
        weights = alpha.alpha[:, r]
        size = float(weights.sum())
        if size <= 0.0:
            raise NumericalError(f"component {r} is empty")
        if size < hyper.k:
            notes.append(f"component {r} has {int(size)} points, fewer than k={hyper.k}")
        stats = weighted_stats(data.x, data.y, weights, hyper.w_x, hyper.w_y)
        model = fit_cca(stats, hyper.k, hyper)
        objective += cca_objective(model.u, model.v, stats.cxy)
        components.append(model)
        spectra.append(tuple(model.correlations))
        sizes.append(size)
    pi = np.array(sizes) / data.n_points
    report = TrainingReport(objective, tuple(spectra), tuple(sizes),
                            init_space_used, tuple(notes))
    return MccaModel(tuple(components), pi, hyper), report


def train(data: PairedDataset, hyper: Hyperparameters, init_space: str = "cca_projection",
          oracle_groups=None):
    """End-to-end training: initialize assignments, then fit the components.

    ``oracle_groups`` bypasses clustering with externally supplied component
    ids (length N, values in [0, r_components)).
    """
    if oracle_groups is not None:
        alpha = Assignment.from_labels(oracle_groups, hyper.r_components)
        used = "oracle"
    else:
        alpha = init_assignments(data, hyper, init_space)
        used = init_space
    model, report = fit_mcca(data, alpha, hyper, init_space_used=used)
    return model, report, alpha


def _as_columns(points, dim, what):
    points = np.asarray(points, dtype=np.float64)
    single = points.ndim == 1
    cols = check_matrix(points[:, None] if single else points, name=what)
    if cols.shape[0] != dim:
        raise DataError(f"{what} have dimension {cols.shape[0]}, model expects {dim}")
    return cols, single


def _assign(bases, centers, pi, points, use_prior):
    scores = np.empty((len(bases), points.shape[1]))
    for r, (basis, center) in enumerate(zip(bases, centers)):
        if pi[r] <= 0.0:
            scores[r] = np.inf
            continue
        proj = basis.T @ (points - center[:, None])
        scores[r] = np.sum(proj**2, axis=0)
        if use_prior:
            scores[r] -= np.log(pi[r])
    return np.argmin(scores, axis=0)


def assign_x(model: MccaModel, x, use_prior: bool = True):
    """Component index for primary-view points (lowest index wins ties)."""
    if not np.any(model.pi > 0):
        raise NumericalError("no component has positive mixing fraction")
    cols, single = _as_columns(x, model.components[0].u.shape[0], "points")
    idx = _assign([c.u for c in model.components], [c.center_x for c in model.components],
                  model.pi, cols, use_prior)
    return int(idx[0]) if single else idx


def assign_y(model: MccaModel, y, use_prior: bool = True):
    """Mirror of :func:`assign_x` for secondary-view points."""
    if not np.any(model.pi > 0):
        raise NumericalError("no component has positive mixing fraction")
    cols, single = _as_columns(y, model.components[0].v.shape[0], "points")
    idx = _assign([c.v for c in model.components], [c.center_y for c in model.components],
                  model.pi, cols, use_prior)
    return int(idx[0]) if single else idx


def embed(model: MccaModel, x, mode: str = "concatenation", centered: bool = True,
          assignments=None, use_prior: bool = True):
    """Embed primary-view points.

    ``concatenation`` (default) stacks every component's projection (R*k
    dimensions, no assignment involved); ``projection`` routes each point
    through its assigned component's transformation only (k dimensions,
    assignment inferred unless given).
    """
    if mode not in ("projection", "concatenation"):
        raise ConfigError(f"mode must be 'projection' or 'concatenation', got {mode!r}")
    cols, single = _as_columns(x, model.components[0].u.shape[0], "points")
    if mode == "concatenation":
        out = np.vstack([c.project_x(cols, centered=centered) for c in model.components])
    else:
        if assignments is None:
            assignments = assign_x(model, cols, use_prior=use_prior)
        else:
            assignments = np.atleast_1d(np.asarray(assignments, dtype=np.int64))
            if assignments.shape != (cols.shape[1],):
                raise DataError(
                    f"assignments must have length {cols.shape[1]}, got {assignments.shape}"
                )
            if assignments.size and (assignments.min() < 0
                                     or assignments.max() >= model.r_components):
                raise DataError(f"assignments must lie in [0, {model.r_components})")
        out = np.empty((model.k, cols.shape[1]))
        for r in range(model.r_components):
            mask = assignments == r
            if np.any(mask):
                out[:, mask] = model.components[r].project_x(cols[:, mask], centered=centered)
    return out[:, 0] if single else out


def tabulate_assignments(labels, assigned, r_components: int, label_count=None):
    """Row-normalized label-by-component frequency table.

    Returns ``(matrix, row_labels)``.  Row order is sorted unique labels, or
    ``range(label_count)`` when ``label_count`` is given (labels must then be
    ints); rows of labels that never occur stay all-zero and trigger a
    warning.
    """
    labels = list(labels)
    assigned = np.asarray(assigned, dtype=np.int64).ravel()
    if len(labels) != assigned.shape[0]:
        raise DataError(
            f"need one label per assignment ({assigned.shape[0]}), got {len(labels)}"
        )
    if label_count is None:
        row_labels = sorted(set(labels), key=repr)
    else:
        row_labels = list(range(int(label_count)))
    index = {label: i for i, label in enumerate(row_labels)}
    counts = np.zeros((len(row_labels), r_components))
    for label, r in zip(labels, assigned):
        if label not in index:
            raise DataError(f"label {label!r} outside [0, {label_count})")
        counts[index[label], r] += 1.0
    totals = counts.sum(axis=1)
    absent = [row_labels[i] for i in np.flatnonzero(totals == 0)]
    if absent:
        warnings.warn(f"labels never observed, rows left all-zero: {absent}")
    out = np.zeros_like(counts)
    present = totals > 0
    out[present] = counts[present] / totals[present, None]
    return out, row_labels


def perplexity_matrix(model: MccaModel, data: PairedDataset, label_count=None,
                      use_prior: bool = True) -> np.ndarray:
    """Label-by-component assignment frequencies, rows normalized to sum to 1.

    Assignments come from :func:`assign_x` on the primary view.  See
    :func:`tabulate_assignments` for the row ordering and absent-label rule.
    """
    if data.labels is None:
        raise DataError("perplexity matrix needs a labeled dataset")
    assigned = assign_x(model, data.x, use_prior=use_prior)
    matrix, _ = tabulate_assignments(data.labels, assigned, model.r_components, label_count)
    return matrix


class MixtureCCA(BaseEstimator, TransformerMixin):
    """Mixture-of-CCA estimator with sklearn conventions (samples as rows).

    Parameters
    ----------
    r_components : int, number of mixture components.
    k : int, projection dimension of every component.
    w_x, w_y : float, ridge regularizers for the two views.
    init_space : 'cca_projection' or 'native', clustering space for the
        assignment initialization (ignored when ``groups`` is passed to fit).
    mode : 'projection' or 'concatenation', embedding produced by transform.
    centered : bool, subtract component means before projecting.
    use_prior : bool, keep the log mixing-fraction term in assignment scores.
    seed : int, seeds the clustering initialization.

    Attributes
    ----------
    model_ : fitted :class:`MccaModel`.
    report_ : :class:`TrainingReport` for the fit.
    alpha_ : :class:`Assignment` used to fit the components.
    """

    def __init__(self, r_components=2, k=1, w_x=0.0, w_y=0.0,
                 init_space="cca_projection", mode="concatenation",
                 centered=True, use_prior=True, seed=0):
        self.r_components = r_components
        self.k = k
        self.w_x = w_x
        self.w_y = w_y
        self.init_space = init_space
        self.mode = mode
        self.centered = centered
        self.use_prior = use_prior
        self.seed = seed

    def fit(self, X, Y, groups=None):
        """Fit on paired views ``X`` (n, d_x), ``Y`` (n, d_y).

        ``groups`` supplies oracle component ids and skips clustering.
        """
        data = PairedDataset(check_matrix(X, name="X").T, check_matrix(Y, name="Y").T)
        hyper = Hyperparameters(k=self.k, r_components=self.r_components,
                                w_x=self.w_x, w_y=self.w_y, seed=self.seed)
        self.model_, self.report_, self.alpha_ = train(
            data, hyper, init_space=self.init_space, oracle_groups=groups
        )
        return self

    def predict(self, X):
        """Component index per row of ``X``."""
        self._check_fitted()
        return assign_x(self.model_, check_matrix(X, name="X").T, use_prior=self.use_prior)

    def predict_y(self, Y):
        self._check_fitted()
        return assign_y(self.model_, check_matrix(Y, name="Y").T, use_prior=self.use_prior)

    def transform(self, X):
        """Embed rows of ``X``; (n, k) for projection, (n, R*k) for concatenation."""
        self._check_fitted()
        emb = embed(self.model_, check_matrix(X, name="X").T, mode=self.mode,
                    centered=self.centered, use_prior=self.use_prior)
        return emb.T

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise ConfigError("this MixtureCCA instance is not fitted yet")
