import numpy as np
import pytest

from mcca.errors import ConfigError, DataError
from mcca.metrics import (
    KnnConfig,
    RetrievalTask,
    build_query_reps,
    center_reps,
    knn_classify,
    mean_column_norm,
    mean_reciprocal_rank,
    recall_at_k,
    retrieval_metrics,
    roc_auc,
    roc_auc_macro,
    scale_and_concat,
    score_pairs,
)

from oracles import bf_auc, bf_mrr, bf_recall_at_k

# ---------------------------------------------------------------------------


class TestKnn:
    TRAIN = np.array([[0.0, 1.0, 10.0], [0.0, 0.0, 0.0]])
    LABELS = ["A", "A", "B"]

    def test_exact_match_single_neighbor(self):
        preds, acc = knn_classify(self.TRAIN, self.LABELS, self.TRAIN[:, [2]],
                                  KnnConfig(neighbors=1), test_labels=["B"])
        assert preds == ["B"] and acc == 100.0

    def test_global_majority_when_k_is_train_size(self):
        train = np.array([[0.0, 1.0, 2.0, 50.0]])
        labels = ["A", "A", "A", "B"]
        preds, _ = knn_classify(train, labels, np.array([[49.0]]),
                                KnnConfig(neighbors=4))
        assert preds == ["A"]

    def test_hand_distances(self):
        # test point (0.4, 0): nearest two are (0,0) and (1,0), both A.
        preds, _ = knn_classify(self.TRAIN, self.LABELS, np.array([[0.4], [0.0]]),
                                KnnConfig(neighbors=2))
        assert preds == ["A"]

    def test_vote_tie_goes_to_nearest_neighbor_label(self):
        train = np.array([[0.0, 1.0, 2.0, 3.0]])
        labels = ["A", "B", "B", "A"]
        # Neighbors of 0.9 at k=4: B(1.0), A(0.0), B(2.0), A(3.0) -> 2 vs 2,
        # nearest among tied labels is B.
        preds, _ = knn_classify(train, labels, np.array([[0.9]]), KnnConfig(neighbors=4))
        assert preds == ["B"]

    def test_cosine_metric(self):
        train = np.array([[1.0, 0.0], [0.0, 1.0]])
        labels = ["right", "up"]
        preds, _ = knn_classify(train, labels, np.array([[5.0], [0.1]]),
                                KnnConfig(metric="cosine", neighbors=1))
        assert preds == ["right"]

    def test_test_subset_of_train_is_perfect(self):
        rng = np.random.default_rng(0)
        train = rng.standard_normal((4, 30))
        labels = list(rng.integers(0, 3, size=30))
        _, acc = knn_classify(train, labels, train[:, ::3], KnnConfig(neighbors=1),
                              test_labels=labels[::3])
        assert acc == 100.0

    def test_errors(self):
        with pytest.raises(ConfigError):
            knn_classify(self.TRAIN, self.LABELS, self.TRAIN, KnnConfig(neighbors=9))
        with pytest.raises(DataError):
            knn_classify(self.TRAIN, ["A"], self.TRAIN, KnnConfig())
        with pytest.raises(ConfigError):
            KnnConfig(metric="manhattan")


class TestQueryReps:
    def test_single_seed_is_that_embedding(self):
        items = np.arange(12.0).reshape(3, 4)
        reps = build_query_reps(items, [[2]])
        np.testing.assert_array_equal(reps[:, 0], items[:, 2])

    def test_opposite_seeds_cancel(self):
        items = np.array([[1.0, -1.0], [2.0, -2.0]])
        reps = build_query_reps(items, [[0, 1]])
        np.testing.assert_allclose(reps[:, 0], 0.0)

    def test_identical_seeds_average_to_same(self):
        items = np.tile(np.array([[3.0], [4.0]]), (1, 10))
        reps = build_query_reps(items, [list(range(10))])
        np.testing.assert_allclose(reps[:, 0], [3.0, 4.0])

    def test_empty_seed_list_rejected(self):
        with pytest.raises(DataError):
            build_query_reps(np.ones((2, 3)), [[]])


class TestCenterAndScore:
    def _task(self, q, items, rel=None):
        rel = rel or [{0}] * np.atleast_2d(q).shape[1]
        return RetrievalTask(q, items, tuple(rel))

    def test_single_query_centers_to_zero(self):
        task = self._task(np.array([[3.0], [1.0]]), np.ones((2, 2)))
        out = center_reps(task)
        np.testing.assert_allclose(out.query_reps, 0.0, atol=1e-12)

    def test_item_mean_zero_and_idempotent(self):
        rng = np.random.default_rng(1)
        task = self._task(rng.standard_normal((3, 4)), rng.standard_normal((3, 6)))
        once = center_reps(task)
        np.testing.assert_allclose(once.item_reps.mean(axis=1), 0.0, atol=1e-12)
        twice = center_reps(once)
        np.testing.assert_allclose(twice.query_reps, once.query_reps, atol=1e-12)

    def test_score_extremes(self):
        h = np.array([[1.0], [0.0]])
        task = self._task(h, np.array([[2.0, -3.0, 0.0], [0.0, 0.0, 5.0]]),
                          rel=[{0}])
        scores = score_pairs(task)
        np.testing.assert_allclose(scores[0], [1.0, 0.0, 0.5], atol=1e-12)

    def test_zero_norm_scores_half_with_warning(self):
        task = self._task(np.zeros((2, 1)), np.ones((2, 2)), rel=[{0}])
        with pytest.warns(UserWarning):
            scores = score_pairs(task)
        np.testing.assert_allclose(scores, 0.5)

    def test_scores_invariant_to_positive_rescaling(self):
        rng = np.random.default_rng(2)
        q = rng.standard_normal((3, 2))
        items = rng.standard_normal((3, 5))
        base = score_pairs(self._task(q, items, rel=[{0}, {1}]))
        scaled = score_pairs(self._task(q * 7.0, items * 0.01, rel=[{0}, {1}]))
        np.testing.assert_allclose(base, scaled, atol=1e-12)

    def test_task_validation(self):
        with pytest.raises(DataError):
            RetrievalTask(np.ones((2, 1)), np.ones((3, 2)), ({0},))
        with pytest.raises(DataError):
            RetrievalTask(np.ones((2, 1)), np.ones((2, 2)), (set(),))
        with pytest.raises(DataError):
            RetrievalTask(np.ones((2, 1)), np.ones((2, 2)), ({5},))


class TestRankingMetrics:
    def test_recall_hand_example(self):
        scores = np.array([[0.9, 0.8, 0.1, 0.05]])
        assert recall_at_k(scores, [{0, 2}], 2) == 50.0

    def test_recall_perfect_and_full_cutoff(self):
        scores = np.array([[0.9, 0.8, 0.1]])
        assert recall_at_k(scores, [{0, 1}], 2) == 100.0
        assert recall_at_k(scores, [{2}], 3) == 100.0

    def test_mrr_hand_example(self):
        # First relevant results at ranks 1, 2, and 4.
        scores = np.array([
            [9.0, 5.0, 4.0, 1.0],
            [9.0, 5.0, 4.0, 1.0],
            [9.0, 5.0, 4.0, 1.0],
        ])
        relevance = [{0}, {1}, {3}]
        np.testing.assert_allclose(
            mean_reciprocal_rank(scores, relevance), (1.0 + 0.5 + 0.25) / 3.0
        )

    def test_mrr_first_always_relevant(self):
        scores = np.array([[5.0, 1.0], [7.0, 2.0]])
        assert mean_reciprocal_rank(scores, [{0}, {0}]) == 1.0

    def test_mrr_worst_case(self):
        scores = np.array([[5.0, 4.0, 3.0, 2.0, 1.0]])
        assert mean_reciprocal_rank(scores, [{4}]) == 1.0 / 5.0

    def test_tie_break_by_lower_index(self):
        scores = np.array([[0.5, 0.5, 0.5]])
        # Item 1 is relevant, but item 0 shares its score and ranks first.
        assert mean_reciprocal_rank(scores, [{1}]) == 0.5
        assert recall_at_k(scores, [{1}], 1) == 0.0

    def test_auc_perfect_separation(self):
        assert roc_auc([0.9, 0.8, 0.3, 0.1], [1, 1, 0, 0]) == 100.0

    def test_auc_all_ties_is_half(self):
        assert roc_auc([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0]) == 50.0

    def test_auc_hand_example(self):
        assert roc_auc([0.9, 0.5, 0.5, 0.1], [1, 0, 1, 0]) == 87.5

    def test_auc_single_class_rejected(self):
        with pytest.raises(DataError):
            roc_auc([0.4, 0.6], [1, 1])

    def test_metrics_match_brute_force_on_random_instances(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            n_items = int(rng.integers(2, 21))
            n_queries = int(rng.integers(1, 4))
            scores = np.round(rng.random((n_queries, n_items)), 1)  # force ties
            relevance = []
            for _ in range(n_queries):
                size = int(rng.integers(1, n_items))
                relevance.append(set(rng.choice(n_items, size=size, replace=False).tolist()))
            cutoff = int(rng.integers(1, n_items + 1))
            assert abs(recall_at_k(scores, relevance, cutoff)
                       - bf_recall_at_k(scores, relevance, cutoff)) <= 1e-12
            assert abs(mean_reciprocal_rank(scores, relevance)
                       - bf_mrr(scores, relevance)) <= 1e-12
            for row, rel in zip(scores, relevance):
                if 0 < len(rel) < n_items:
                    labels = [i in rel for i in range(n_items)]
                    assert abs(roc_auc(row, labels) - bf_auc(row, labels)) <= 1e-12

    def test_metrics_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(4)
        scores = rng.random((3, 12))
        relevance = [{1, 5}, {0}, {7, 2, 3}]
        transformed = np.exp(3.0 * scores) + 5.0
        assert recall_at_k(scores, relevance, 4) == recall_at_k(transformed, relevance, 4)
        assert mean_reciprocal_rank(scores, relevance) == mean_reciprocal_rank(
            transformed, relevance)
        assert roc_auc_macro(scores, relevance) == pytest.approx(
            roc_auc_macro(transformed, relevance), abs=1e-12)

    def test_retrieval_metrics_bundle(self):
        scores = np.array([[0.9, 0.8, 0.1, 0.05]])
        out = retrieval_metrics(scores, [{0, 2}], 2)
        assert out["recall_at_2"] == 50.0
        assert out["mrr"] == 1.0
        assert out["roc_auc"] == bf_auc(scores[0], [True, False, True, False])


class TestScaleAndConcat:
    def test_identical_blocks_scale_identically(self):
        rng = np.random.default_rng(5)
        rep = rng.standard_normal((3, 20))
        out = scale_and_concat(rep, rep)
        np.testing.assert_allclose(out[:3], out[3:])
        np.testing.assert_allclose(mean_column_norm(out[:3]), 1.0, atol=1e-12)

    def test_idempotent_on_unit_norm_block(self):
        rng = np.random.default_rng(6)
        rep = rng.standard_normal((4, 15))
        rep = rep / mean_column_norm(rep)
        out = scale_and_concat(rep, rep)
        np.testing.assert_allclose(out[:4], rep, atol=1e-12)

    def test_each_block_scaled_to_unit_mean_norm(self):
        rng = np.random.default_rng(7)
        out = scale_and_concat(5.0 * rng.standard_normal((2, 30)),
                               0.01 * rng.standard_normal((3, 30)))
        np.testing.assert_allclose(mean_column_norm(out[:2]), 1.0, atol=1e-12)
        np.testing.assert_allclose(mean_column_norm(out[2:]), 1.0, atol=1e-12)

    def test_reference_norms_reusable_on_held_out(self):
        rng = np.random.default_rng(8)
        train_a, train_b = rng.standard_normal((2, 40)), rng.standard_normal((3, 40))
        test_a, test_b = rng.standard_normal((2, 10)), rng.standard_normal((3, 10))
        na, nb = mean_column_norm(train_a), mean_column_norm(train_b)
        out = scale_and_concat(test_a, test_b, na, nb)
        np.testing.assert_allclose(out[:2], test_a / na)
        np.testing.assert_allclose(out[2:], test_b / nb)

    def test_zero_norm_block_rejected(self):
        with pytest.raises(DataError):
            scale_and_concat(np.zeros((2, 5)), np.ones((2, 5)))

    def test_mismatched_points_rejected(self):
        with pytest.raises(DataError):
            scale_and_concat(np.ones((2, 5)), np.ones((2, 6)))
