"""Downstream evaluation: kNN classification and retrieval metrics.

Vectors are columns throughout, matching the rest of the package.  The
ranking metrics are deliberately exact (brute-force search, full sorts) and
break score ties by lower item index so results are reproducible.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .validation import check_matrix, check_positive_int

METRICS = ("l2", "cosine")


@dataclass(frozen=True)
class KnnConfig:
    """k-nearest-neighbor settings: distance, neighbor count, raw-feature append."""

    metric: str = "l2"
    neighbors: int = 1
    append_raw: bool = False

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ConfigError(f"metric must be one of {METRICS}, got {self.metric!r}")
        object.__setattr__(self, "neighbors", check_positive_int(self.neighbors, "neighbors"))


@dataclass(frozen=True)
class RetrievalTask:
    """Query vectors, item vectors, and per-query relevant item index sets."""

    query_reps: np.ndarray
    item_reps: np.ndarray
    relevance: tuple

    def __post_init__(self):
        queries = check_matrix(self.query_reps, name="query_reps")
        items = check_matrix(self.item_reps, name="item_reps")
        if queries.shape[0] != items.shape[0]:
            raise DataError(
                f"query and item vectors disagree on dimension: "
                f"{queries.shape[0]} vs {items.shape[0]}"
            )
        relevance = tuple(frozenset(int(i) for i in rel) for rel in self.relevance)
        if len(relevance) != queries.shape[1]:
            raise DataError(
                f"need one relevance set per query ({queries.shape[1]}), got {len(relevance)}"
            )
        for q, rel in enumerate(relevance):
            if not rel:
                raise DataError(f"query {q} has no relevant items")
            if min(rel) < 0 or max(rel) >= items.shape[1]:
                raise DataError(f"query {q} references an item outside [0, {items.shape[1]})")
        object.__setattr__(self, "query_reps", queries)
        object.__setattr__(self, "item_reps", items)
        object.__setattr__(self, "relevance", relevance)

    @property
    def n_queries(self) -> int:
        return self.query_reps.shape[1]

    @property
    def n_items(self) -> int:
        return self.item_reps.shape[1]


def _distances(test, train, metric):
    if metric == "l2":
        t2 = np.sum(test**2, axis=0)[:, None]
        r2 = np.sum(train**2, axis=0)[None, :]
        return np.maximum(t2 + r2 - 2.0 * (test.T @ train), 0.0)
    tn = test / np.maximum(np.linalg.norm(test, axis=0), 1e-300)
    rn = train / np.maximum(np.linalg.norm(train, axis=0), 1e-300)
    return 1.0 - tn.T @ rn


def knn_classify(train_emb, train_labels, test_emb, config: KnnConfig, test_labels=None):
    """Exact k-nearest-neighbor majority vote.

    Points are columns.  Vote ties go to the tied label with the closest
    single neighbor.  Returns ``(predictions, accuracy_percent)``; accuracy
    is None when ``test_labels`` is not given.
    """
    train = check_matrix(train_emb, name="train_emb")
    test = check_matrix(test_emb, name="test_emb")
    if train.shape[0] != test.shape[0]:
        raise DataError(
            f"train and test dimensions differ: {train.shape[0]} vs {test.shape[0]}"
        )
    train_labels = list(train_labels)
    if len(train_labels) != train.shape[1]:
        raise DataError(
            f"need {train.shape[1]} train labels, got {len(train_labels)}"
        )
    if config.neighbors > train.shape[1]:
        raise ConfigError(
            f"neighbors={config.neighbors} exceeds train size {train.shape[1]}"
        )
    dists = _distances(test, train, config.metric)
    # Stable sort: equal distances keep ascending train index.
    order = np.argsort(dists, axis=1, kind="stable")[:, : config.neighbors]
    predictions = []
    for row in order:
        votes = {}
        first_seen = {}
        for rank, idx in enumerate(row):
            label = train_labels[idx]
            votes[label] = votes.get(label, 0) + 1
            first_seen.setdefault(label, rank)
        best = max(votes.values())
        predictions.append(
            min((label for label, v in votes.items() if v == best),
                key=lambda lab: first_seen[lab])
        )
    accuracy = None
    if test_labels is not None:
        test_labels = list(test_labels)
        if len(test_labels) != test.shape[1]:
            raise DataError(f"need {test.shape[1]} test labels, got {len(test_labels)}")
        hits = sum(p == t for p, t in zip(predictions, test_labels))
        accuracy = 100.0 * hits / len(test_labels)
    return predictions, accuracy


def build_query_reps(item_embeddings, seeds_per_query) -> np.ndarray:
    """Average the listed seed items' embeddings into one vector per query."""
    items = check_matrix(item_embeddings, name="item_embeddings")
    reps = np.empty((items.shape[0], len(seeds_per_query)))
    for q, seeds in enumerate(seeds_per_query):
        seeds = [int(s) for s in seeds]
        if not seeds:
            raise DataError(f"query {q} has an empty seed list")
        if min(seeds) < 0 or max(seeds) >= items.shape[1]:
            raise DataError(f"query {q} references an item outside [0, {items.shape[1]})")
        reps[:, q] = items[:, seeds].mean(axis=1)
    return reps


def center_reps(task: RetrievalTask) -> RetrievalTask:
    """Mean-center queries and items separately (idempotent)."""
    return RetrievalTask(
        task.query_reps - task.query_reps.mean(axis=1, keepdims=True),
        task.item_reps - task.item_reps.mean(axis=1, keepdims=True),
        task.relevance,
    )


def score_pairs(task: RetrievalTask) -> np.ndarray:
    """Shifted cosine scores ``(1 + cos) / 2`` in [0, 1], (queries, items).

    Zero-norm vectors would make the cosine undefined; their pairs score 0.5
    (the orthogonal value) with a warning.
    """
    qn = np.linalg.norm(task.query_reps, axis=0)
    un = np.linalg.norm(task.item_reps, axis=0)
    zq, zu = qn == 0.0, un == 0.0
    if zq.any() or zu.any():
        warnings.warn("zero-norm representation: affected pairs score 0.5")
    cos = (task.query_reps / np.where(zq, 1.0, qn)).T @ (task.item_reps / np.where(zu, 1.0, un))
    cos[zq, :] = 0.0
    cos[:, zu] = 0.0
    return 0.5 * (1.0 + cos)


def _ranking(scores_row):
    """Item indices from best to worst score, ties by lower index."""
    return np.argsort(-np.asarray(scores_row, dtype=np.float64), kind="stable")


def recall_at_k(scores, relevance, cutoff: int) -> float:
    """Mean over queries of |top-cutoff that are relevant| / |relevant|, x100."""
    cutoff = check_positive_int(cutoff, "cutoff")
    scores = check_matrix(scores, name="scores")
    values = []
    for row, rel in zip(scores, _check_relevance(relevance, scores)):
        top = _ranking(row)[:cutoff]
        values.append(len(rel.intersection(top.tolist())) / len(rel))
    return 100.0 * float(np.mean(values))


def mean_reciprocal_rank(scores, relevance) -> float:
    """Mean over queries of 1 / rank of the best-ranked relevant item."""
    scores = check_matrix(scores, name="scores")
    values = []
    for row, rel in zip(scores, _check_relevance(relevance, scores)):
        order = _ranking(row)
        for rank, idx in enumerate(order, start=1):
            if int(idx) in rel:
                values.append(1.0 / rank)
                break
    return float(np.mean(values))


def _check_relevance(relevance, scores):
    relevance = [frozenset(int(i) for i in rel) for rel in relevance]
    if len(relevance) != scores.shape[0]:
        raise DataError(
            f"need one relevance set per query ({scores.shape[0]}), got {len(relevance)}"
        )
    for q, rel in enumerate(relevance):
        if not rel:
            raise DataError(f"query {q} has no relevant items")
        if min(rel) < 0 or max(rel) >= scores.shape[1]:
            raise DataError(f"query {q} references an item outside [0, {scores.shape[1]})")
    return relevance


def roc_auc(scores, labels) -> float:
    """Rank-based AUC with midrank tie handling, scaled to [0, 100]."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel().astype(bool)
    if scores.shape != labels.shape:
        raise DataError("scores and labels must have the same length")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("ROC-AUC needs at least one positive and one negative")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(scores.size)
    sorted_scores = scores[order]
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # midrank, 1-based
        i = j + 1
    auc = (ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
    return 100.0 * float(auc)


def roc_auc_macro(scores, relevance) -> float:
    """Per-query AUC (relevant vs not), averaged over queries."""
    scores = check_matrix(scores, name="scores")
    values = []
    for row, rel in zip(scores, _check_relevance(relevance, scores)):
        labels = np.zeros(scores.shape[1], dtype=bool)
        labels[list(rel)] = True
        values.append(roc_auc(row, labels))
    return float(np.mean(values))


def retrieval_metrics(scores, relevance, cutoff: int) -> dict:
    """Recall@cutoff, MRR, and macro-averaged ROC-AUC for a score matrix."""
    return {
        f"recall_at_{int(cutoff)}": recall_at_k(scores, relevance, cutoff),
        "mrr": mean_reciprocal_rank(scores, relevance),
        "roc_auc": roc_auc_macro(scores, relevance),
    }


def mean_column_norm(matrix) -> float:
    return float(np.linalg.norm(check_matrix(matrix, name="matrix"), axis=0).mean())


def scale_and_concat(rep_a, rep_b, norm_a=None, norm_b=None) -> np.ndarray:
    """Stack two representations after balancing their average column norms.

    Each block is divided by its mean column norm; pass ``norm_a``/``norm_b``
    measured on a reference set to apply the same scaling to held-out data.
    """
    rep_a = check_matrix(rep_a, name="rep_a")
    rep_b = check_matrix(rep_b, name="rep_b")
    if rep_a.shape[1] != rep_b.shape[1]:
        raise DataError(
            f"blocks disagree on the point count: {rep_a.shape[1]} vs {rep_b.shape[1]}"
        )
    norm_a = mean_column_norm(rep_a) if norm_a is None else float(norm_a)
    norm_b = mean_column_norm(rep_b) if norm_b is None else float(norm_b)
    if norm_a <= 0.0 or norm_b <= 0.0:
        raise DataError("cannot scale a block whose average column norm is zero")
    return np.vstack([rep_a / norm_a, rep_b / norm_b])
