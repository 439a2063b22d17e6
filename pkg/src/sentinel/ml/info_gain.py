"""Information gain over single features, base-2 entropy.

All entropies are computed from integer label counts, never from
row-order-dependent float accumulations, so permuting the rows of a
dataset gives bitwise identical gains.
"""

from __future__ import annotations

import numpy as np

from .dataset import Dataset


def entropy_from_counts(counts: np.ndarray) -> float:
    """Shannon entropy (bits) of the distribution given by nonnegative
    integer counts. Zero-count cells contribute nothing."""
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    if total == 0:
        return 0.0
    live = counts[counts > 0].astype(np.float64)
    p = live / total
    return float(-(p * np.log2(p)).sum())


def label_entropy(y: np.ndarray) -> float:
    return entropy_from_counts(np.bincount(y, minlength=2))


def _categorical_gain(values: np.ndarray, y: np.ndarray) -> float:
    """Gain of the partition induced by exact value equality."""
    n = values.shape[0]
    _, inverse = np.unique(values, return_inverse=True)
    k = int(inverse.max()) + 1
    # counts[v, c] = rows with value v and class c
    counts = np.zeros((k, 2), dtype=np.int64)
    np.add.at(counts, (inverse, y), 1)
    sizes = counts.sum(axis=1)
    children = 0.0
    for v in range(k):
        children += (int(sizes[v]) / n) * entropy_from_counts(counts[v])
    return label_entropy(y) - children


def _numeric_gain(values: np.ndarray, y: np.ndarray) -> float:
    """Best gain over binary threshold splits at midpoints of consecutive
    distinct values. Returns the maximum; 0.0 when the feature is constant."""
    gain, _ = best_numeric_split(values, y)
    return gain


def best_numeric_split(values: np.ndarray, y: np.ndarray) -> tuple[float, float | None]:
    """(best gain, threshold) for the split x <= t vs x > t. The threshold
    is the midpoint between adjacent distinct values. None when no split
    exists (constant feature)."""
    n = values.shape[0]
    distinct, inverse = np.unique(values, return_inverse=True)
    k = distinct.shape[0]
    if k < 2:
        return 0.0, None
    counts = np.zeros((k, 2), dtype=np.int64)
    np.add.at(counts, (inverse, y), 1)
    # prefix[i] = label counts among rows with value <= distinct[i]
    prefix = np.cumsum(counts, axis=0)
    total = prefix[-1]
    n_total = int(total.sum())
    base = entropy_from_counts(total)

    best_gain = 0.0
    best_threshold: float | None = None
    for i in range(k - 1):
        left = prefix[i]
        right = total - left
        n_left = int(left.sum())
        n_right = n_total - n_left
        children = (n_left / n_total) * entropy_from_counts(left) + (
            n_right / n_total
        ) * entropy_from_counts(right)
        gain = base - children
        if gain > best_gain:
            best_gain = gain
            best_threshold = (float(distinct[i]) + float(distinct[i + 1])) / 2.0
    return best_gain, best_threshold


def info_gain(dataset: Dataset, feature_index: int) -> float:
    """Gain of one feature against the malicious/legitimate label.

    Numeric features are scored by their best threshold split; boolean
    and categorical features by the partition over exact values.
    """
    values = dataset.X[:, feature_index]
    y = dataset.y.astype(np.int64)
    kind = dataset.schema.features[feature_index].kind
    if kind == "numeric":
        return _numeric_gain(values, y)
    return _categorical_gain(values, y)


def rank_features(dataset: Dataset) -> list[tuple[int, float]]:
    """All features sorted by descending gain. Ties keep schema order,
    so the ranking is deterministic."""
    gains = [(i, info_gain(dataset, i)) for i in range(dataset.n_features)]
    gains.sort(key=lambda pair: (-pair[1], pair[0]))
    return gains


def select_top_k(dataset: Dataset, k: int) -> Dataset:
    if not 1 <= k <= dataset.n_features:
        raise ValueError(f"k must be in [1, {dataset.n_features}], got {k}")
    ranked = rank_features(dataset)
    chosen = sorted(index for index, _ in ranked[:k])
    return dataset.project(chosen)
