"""Mixture-of-CCA representation learning.

Fits a union of per-component CCA subspaces on paired two-view data, assigns
single-view points to components at test time, produces projection or
concatenation embeddings, and evaluates them with kNN classification and
retrieval metrics.
"""

from .cca import CcaModel, LinearCCA, cca_objective, fit_cca, project
from .covariance import ComponentCovariances, Hyperparameters, weighted_stats
from .data import PairedDataset, StandardizationStats, stack_context, standardize
from .errors import ConfigError, DataError, MccaError, NumericalError
from .kmeans import KMeansModel, kmeans_fit
from .linalg import SvdResult, SymEigResult, inv_sqrt_psd, svd_truncated, sym_eig
from .matio import load_matrix, read_labels, read_points, write_labels, write_matrix, write_points
from .metrics import (
    KnnConfig,
    RetrievalTask,
    build_query_reps,
    center_reps,
    knn_classify,
    mean_reciprocal_rank,
    recall_at_k,
    retrieval_metrics,
    roc_auc,
    roc_auc_macro,
    scale_and_concat,
    score_pairs,
)
from .mixture import (
    Assignment,
    MccaModel,
    MixtureCCA,
    TrainingReport,
    assign_x,
    assign_y,
    embed,
    fit_mcca,
    init_assignments,
    mcca_objective,
    perplexity_matrix,
    train,
)
from .model_io import load_model, save_model
from .synth import GroundTruth, SynthSpec, generate

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "CcaModel",
    "ComponentCovariances",
    "ConfigError",
    "DataError",
    "GroundTruth",
    "Hyperparameters",
    "KMeansModel",
    "KnnConfig",
    "LinearCCA",
    "MccaError",
    "MccaModel",
    "MixtureCCA",
    "NumericalError",
    "PairedDataset",
    "RetrievalTask",
    "StandardizationStats",
    "SvdResult",
    "SymEigResult",
    "SynthSpec",
    "TrainingReport",
    "assign_x",
    "assign_y",
    "build_query_reps",
    "cca_objective",
    "center_reps",
    "embed",
    "fit_cca",
    "fit_mcca",
    "generate",
    "init_assignments",
    "inv_sqrt_psd",
    "kmeans_fit",
    "knn_classify",
    "load_matrix",
    "load_model",
    "mcca_objective",
    "mean_reciprocal_rank",
    "perplexity_matrix",
    "project",
    "read_labels",
    "read_points",
    "recall_at_k",
    "retrieval_metrics",
    "roc_auc",
    "roc_auc_macro",
    "save_model",
    "scale_and_concat",
    "score_pairs",
    "stack_context",
    "standardize",
    "svd_truncated",
    "sym_eig",
    "train",
    "weighted_stats",
    "write_labels",
    "write_matrix",
    "write_points",
]
