"""Cross validation, ratio experiments, and the feature-count sweep."""

import numpy as np
import pytest

from sentinel.ml.dataset import DatasetError
from sentinel.ml.evaluate import (
    EvalReport,
    EvaluationError,
    accuracy_vs_k,
    concat_datasets,
    cross_validate,
    ratio_experiment,
    report_from_confusion,
    stratified_folds,
)

from test_ml_gain import make_dataset
from test_ml_models import separable_dataset


class TestStratification:
    @pytest.mark.parametrize("n_pos,n_neg,folds", [(10, 10, 5), (23, 61, 7), (40, 13, 10), (9, 9, 3)])
    def test_per_fold_class_counts_within_one(self, n_pos, n_neg, folds):
        y = np.array([1] * n_pos + [0] * n_neg, dtype=np.int8)
        rng = np.random.default_rng(0)
        fold_rows = stratified_folds(y, folds, rng)
        # every row appears exactly once
        joined = np.sort(np.concatenate(fold_rows))
        assert np.array_equal(joined, np.arange(len(y)))
        for c, total in ((1, n_pos), (0, n_neg)):
            counts = [int((y[rows] == c).sum()) for rows in fold_rows]
            assert max(counts) - min(counts) <= 1
            assert sum(counts) == total

    def test_folds_must_be_at_least_two(self):
        ds = separable_dataset(n=40)
        with pytest.raises(EvaluationError, match="folds"):
            cross_validate(ds, "decision_tree", folds=1)

    def test_class_smaller_than_fold_count(self):
        ds = make_dataset([[0, 1, 0, 1, 0, 1, 0, 1]], ["boolean"], [1, 1, 1, 0, 0, 0, 0, 0])
        with pytest.raises(EvaluationError, match="fewer than"):
            cross_validate(ds, "decision_tree", folds=4)


class TestCrossValidate:
    @pytest.mark.parametrize("kind,hp", [
        ("decision_tree", None),
        ("naive_bayes", None),
        ("random_forest", {"n_trees": 6}),
        ("adaboost", {"rounds": 5}),
    ])
    def test_label_copy_feature_scores_perfectly(self, kind, hp):
        y = [0, 1] * 20
        ds = make_dataset([list(map(float, y)), [0.0] * 40], ["boolean", "numeric"], y)
        report = cross_validate(ds, kind, hp, folds=4, seed=3)
        assert report.accuracy == 1.0
        assert report.tpr["malicious"] == 1.0
        assert report.fpr["malicious"] == 0.0

    def test_accuracy_equals_confusion_recomputation(self):
        ds = separable_dataset(n=140, seed=2, noise=0.2)
        report = cross_validate(ds, "naive_bayes", folds=7, seed=11)
        c = report.confusion
        total = sum(c.values())
        assert total == ds.n_rows
        assert report.accuracy == pytest.approx((c["tp"] + c["tn"]) / total)
        assert report.tpr["malicious"] == pytest.approx(c["tp"] / (c["tp"] + c["fn"]))
        assert report.tpr["legitimate"] == pytest.approx(c["tn"] / (c["tn"] + c["fp"]))
        assert report.fpr["malicious"] == pytest.approx(c["fp"] / (c["fp"] + c["tn"]))
        assert report.fpr["legitimate"] == pytest.approx(c["fn"] / (c["fn"] + c["tp"]))

    def test_same_seed_same_report(self):
        ds = separable_dataset(n=100, seed=4, noise=0.1)
        a = cross_validate(ds, "random_forest", {"n_trees": 5}, folds=5, seed=9)
        b = cross_validate(ds, "random_forest", {"n_trees": 5}, folds=5, seed=9)
        assert a == b

    def test_report_round_trip(self):
        report = report_from_confusion(10, 2, 30, 3, folds=5, seed=1)
        assert EvalReport.from_dict(report.to_dict()) == report
        assert 0.0 <= report.accuracy <= 1.0


class TestRatioExperiment:
    def _split(self, n_pos=60, pool=400):
        ds = separable_dataset(n=n_pos + pool + 200, seed=6, noise=0.1)
        pos_rows = np.nonzero(ds.y == 1)[0][:n_pos]
        neg_rows = np.nonzero(ds.y == 0)[0][:pool]
        return ds.subset_rows(pos_rows), ds.subset_rows(neg_rows)

    def test_four_ratios_four_reports_in_order(self):
        positives, pool = self._split()
        results = ratio_experiment(
            positives, pool, [0.5, 1.0, 2.0, 5.0], "naive_bayes", folds=3, seed=2
        )
        assert [r for r, _ in results] == [0.5, 1.0, 2.0, 5.0]
        for ratio, report in results:
            expected_neg = int(round(positives.n_rows * ratio))
            c = report.confusion
            assert c["tp"] + c["fn"] == positives.n_rows
            assert c["tn"] + c["fp"] == expected_neg

    def test_same_seed_identical_results(self):
        positives, pool = self._split()
        a = ratio_experiment(positives, pool, [0.5, 2.0], "naive_bayes", folds=3, seed=5)
        b = ratio_experiment(positives, pool, [0.5, 2.0], "naive_bayes", folds=3, seed=5)
        assert a == b

    def test_insufficient_pool(self):
        positives, pool = self._split(n_pos=60, pool=100)
        with pytest.raises(EvaluationError, match="pool"):
            ratio_experiment(positives, pool, [5.0], "naive_bayes", folds=3, seed=1)

    def test_positives_must_be_malicious(self):
        positives, pool = self._split()
        with pytest.raises(EvaluationError, match="all malicious"):
            ratio_experiment(pool, pool, [1.0], "naive_bayes", folds=3, seed=1)
        with pytest.raises(EvaluationError, match="legitimate"):
            ratio_experiment(positives, positives, [1.0], "naive_bayes", folds=3, seed=1)

    def test_nonpositive_ratio_rejected(self):
        positives, pool = self._split()
        with pytest.raises(EvaluationError, match="positive"):
            ratio_experiment(positives, pool, [0.0], "naive_bayes", folds=3, seed=1)

    def test_empty_ratios_rejected(self):
        positives, pool = self._split()
        with pytest.raises(EvaluationError, match="no ratios"):
            ratio_experiment(positives, pool, [], "naive_bayes", folds=3, seed=1)


class TestConcat:
    def test_schema_mismatch(self):
        a = make_dataset([[0, 1]], ["boolean"], [0, 1])
        b = make_dataset([[0, 1], [1, 0]], ["boolean", "boolean"], [0, 1])
        with pytest.raises(DatasetError):
            concat_datasets(a, b)

    def test_concat_stacks_rows(self):
        a = make_dataset([[0, 1]], ["boolean"], [0, 1])
        b = make_dataset([[1, 1]], ["boolean"], [1, 1])
        joined = concat_datasets(a, b)
        assert joined.n_rows == 4
        assert joined.y.tolist() == [0, 1, 1, 1]


class TestAccuracyVsK:
    def test_curve_covers_requested_ks(self):
        ds = separable_dataset(n=80, seed=7)
        curve = accuracy_vs_k(ds, "decision_tree", folds=4, seed=3)
        assert [k for k, _ in curve] == [1, 2, 3]
        for _, acc in curve:
            assert 0.0 <= acc <= 1.0

    def test_out_of_range_k(self):
        ds = separable_dataset(n=80, seed=7)
        with pytest.raises(EvaluationError, match="out of range"):
            accuracy_vs_k(ds, "decision_tree", folds=4, seed=3, ks=[0])

    def test_perfect_feature_makes_k1_perfect(self):
        y = [0, 1] * 20
        ds = make_dataset(
            [[0.0] * 40, list(map(float, y))], ["numeric", "boolean"], y
        )
        curve = accuracy_vs_k(ds, "decision_tree", folds=4, seed=1, ks=[1])
        assert curve[0][1] == 1.0
