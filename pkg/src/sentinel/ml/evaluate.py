"""Stratified cross validation, class-ratio experiments, and the
accuracy-versus-feature-count sweep."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dataset import Dataset, DatasetError
from .info_gain import rank_features
from .models import TrainedModel, predict_matrix, train

MALICIOUS_KEY = "malicious"
LEGITIMATE_KEY = "legitimate"


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    tpr: dict[str, float]
    fpr: dict[str, float]
    confusion: dict[str, int]
    folds: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "tpr": dict(self.tpr),
            "fpr": dict(self.fpr),
            "confusion": dict(self.confusion),
            "folds": self.folds,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        return cls(
            accuracy=float(d["accuracy"]),
            tpr={k: float(v) for k, v in d["tpr"].items()},
            fpr={k: float(v) for k, v in d["fpr"].items()},
            confusion={k: int(v) for k, v in d["confusion"].items()},
            folds=int(d["folds"]),
            seed=int(d["seed"]),
        )


def _safe_rate(num: int, den: int) -> float:
    return num / den if den else 0.0


def report_from_confusion(tp: int, fp: int, tn: int, fn: int, folds: int, seed: int) -> EvalReport:
    total = tp + fp + tn + fn
    return EvalReport(
        accuracy=_safe_rate(tp + tn, total),
        tpr={
            MALICIOUS_KEY: _safe_rate(tp, tp + fn),
            LEGITIMATE_KEY: _safe_rate(tn, tn + fp),
        },
        fpr={
            # Fraction of the *other* class predicted as this one.
            MALICIOUS_KEY: _safe_rate(fp, fp + tn),
            LEGITIMATE_KEY: _safe_rate(fn, fn + tp),
        },
        confusion={"tp": tp, "fp": fp, "tn": tn, "fn": fn},
        folds=folds,
        seed=seed,
    )


def stratified_folds(y: np.ndarray, folds: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Test-row index arrays, one per fold. Each class is shuffled then
    dealt round-robin, so per-fold class counts differ by at most one."""
    out: list[list[int]] = [[] for _ in range(folds)]
    for c in (1, 0):
        idx = np.nonzero(y == c)[0]
        idx = rng.permutation(idx)
        for i in range(folds):
            out[i].extend(int(v) for v in idx[i::folds])
    return [np.array(sorted(rows), dtype=np.int64) for rows in out]


def cross_validate(
    ds: Dataset,
    kind: str,
    hyperparams: Optional[dict] = None,
    folds: int = 10,
    seed: int = 0,
) -> EvalReport:
    if folds < 2:
        raise EvaluationError("folds must be >= 2")
    positives, negatives = ds.class_counts()
    if min(positives, negatives) < folds:
        raise EvaluationError(
            f"smallest class has {min(positives, negatives)} rows, "
            f"fewer than {folds} folds"
        )
    master = np.random.SeedSequence(seed)
    children = master.spawn(folds + 1)
    shuffle_rng = np.random.default_rng(children[0])
    fold_rows = stratified_folds(ds.y, folds, shuffle_rng)
    tp = fp = tn = fn = 0
    all_rows = np.arange(ds.n_rows, dtype=np.int64)
    for i, test_rows in enumerate(fold_rows):
        train_rows = np.setdiff1d(all_rows, test_rows, assume_unique=True)
        fold_seed = int(children[i + 1].generate_state(1)[0])
        model = train(ds.subset_rows(train_rows), kind, hyperparams, seed=fold_seed)
        labels, _ = predict_matrix(model, ds.X[test_rows])
        truth = ds.y[test_rows]
        tp += int(((labels == 1) & (truth == 1)).sum())
        fp += int(((labels == 1) & (truth == 0)).sum())
        tn += int(((labels == 0) & (truth == 0)).sum())
        fn += int(((labels == 0) & (truth == 1)).sum())
    return report_from_confusion(tp, fp, tn, fn, folds, seed)


def concat_datasets(a: Dataset, b: Dataset) -> Dataset:
    if a.schema.names() != b.schema.names():
        raise DatasetError("datasets use different schemas")
    if a.feature_indices != b.feature_indices:
        raise DatasetError("datasets project different columns")
    return Dataset(
        X=np.vstack([a.X, b.X]),
        y=np.concatenate([a.y, b.y]),
        schema=a.schema,
        post_ids=a.post_ids + b.post_ids,
        feature_indices=a.feature_indices,
    )


def ratio_experiment(
    positives: Dataset,
    negative_pool: Dataset,
    ratios: Sequence[float],
    kind: str,
    hyperparams: Optional[dict] = None,
    folds: int = 10,
    seed: int = 0,
) -> list[tuple[float, EvalReport]]:
    """For each malicious:legitimate ratio 1:r, draw r*n_pos negatives from
    the pool without replacement (seeded per ratio) and cross validate."""
    if not ratios:
        raise EvaluationError("no ratios given")
    if int(positives.y.sum()) != positives.n_rows:
        raise EvaluationError("positives dataset must be all malicious")
    if int(negative_pool.y.sum()) != 0:
        raise EvaluationError("negative pool must be all legitimate")
    n_pos = positives.n_rows
    needed = max(int(round(n_pos * r)) for r in ratios)
    if needed > negative_pool.n_rows:
        raise EvaluationError(
            f"negative pool has {negative_pool.n_rows} rows, "
            f"largest ratio needs {needed}"
        )
    children = np.random.SeedSequence(seed).spawn(len(ratios))
    results: list[tuple[float, EvalReport]] = []
    for child, ratio in zip(children, ratios):
        if ratio <= 0:
            raise EvaluationError("ratios must be positive")
        k = int(round(n_pos * ratio))
        rng = np.random.default_rng(child)
        chosen = np.sort(rng.choice(negative_pool.n_rows, size=k, replace=False))
        combined = concat_datasets(positives, negative_pool.subset_rows(chosen))
        cv_seed = int(child.generate_state(1)[0])
        results.append((ratio, cross_validate(combined, kind, hyperparams, folds, cv_seed)))
    return results


def sample_negatives(
    negative_pool: Dataset, n_pos: int, ratio: float, child: np.random.SeedSequence
) -> np.ndarray:
    """Exposed for tests: the row indices ratio_experiment draws."""
    k = int(round(n_pos * ratio))
    rng = np.random.default_rng(child)
    return np.sort(rng.choice(negative_pool.n_rows, size=k, replace=False))


def accuracy_vs_k(
    ds: Dataset,
    kind: str,
    hyperparams: Optional[dict] = None,
    folds: int = 10,
    seed: int = 0,
    ks: Optional[Sequence[int]] = None,
) -> list[tuple[int, float]]:
    """Cross-validated accuracy after keeping only the top-k features by
    information gain, for each k. Ranking is computed once on the full set."""
    ranked = rank_features(ds)
    ks = list(ks) if ks is not None else list(range(1, ds.n_features + 1))
    curve: list[tuple[int, float]] = []
    for k in ks:
        if not 1 <= k <= ds.n_features:
            raise EvaluationError(f"k={k} out of range")
        chosen = sorted(index for index, _ in ranked[:k])
        report = cross_validate(ds.project(chosen), kind, hyperparams, folds, seed)
        curve.append((k, report.accuracy))
    return curve
