"""Greedy information-gain decision tree.

Numeric features split on a threshold (midpoint between adjacent distinct
values), boolean and categorical features on equality with a single value.
Growth stops at pure nodes, the depth cap, or when no split leaves
min_leaf rows on both sides. Leaves take the majority label; exact ties
go to legitimate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

SPLIT_NUMERIC = "num"
SPLIT_EQUALITY = "eq"
LEAF = "leaf"


def _xlog2x(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    mask = p > 0
    out[mask] = p[mask] * np.log2(p[mask])
    return out


def _binary_entropy(malicious: np.ndarray, total: np.ndarray) -> np.ndarray:
    """Entropy (bits) of two-class groups given malicious counts and sizes."""
    malicious = malicious.astype(np.float64)
    total = total.astype(np.float64)
    p = np.divide(malicious, total, out=np.zeros_like(malicious), where=total > 0)
    return -(_xlog2x(p) + _xlog2x(1.0 - p))


def best_numeric_split(
    values: np.ndarray, y: np.ndarray, min_leaf: int
) -> Optional[tuple[float, float]]:
    """(gain, threshold) of the best x <= t split, or None if no split
    satisfies min_leaf or improves on the node entropy."""
    n = values.shape[0]
    order = np.argsort(values, kind="stable")
    sv = values[order]
    sy = y[order]
    cuts = np.nonzero(sv[:-1] != sv[1:])[0]
    if cuts.size == 0:
        return None
    left_n = cuts + 1
    keep = (left_n >= min_leaf) & ((n - left_n) >= min_leaf)
    cuts = cuts[keep]
    if cuts.size == 0:
        return None
    cum_mal = np.cumsum(sy, dtype=np.int64)
    total_mal = int(cum_mal[-1])
    left_n = cuts + 1
    left_mal = cum_mal[cuts]
    right_n = n - left_n
    right_mal = total_mal - left_mal
    base = float(_binary_entropy(np.array([total_mal]), np.array([n]))[0])
    children = (left_n / n) * _binary_entropy(left_mal, left_n) + (
        right_n / n
    ) * _binary_entropy(right_mal, right_n)
    gains = base - children
    j = int(np.argmax(gains))
    if gains[j] <= 0.0:
        return None
    threshold = (float(sv[cuts[j]]) + float(sv[cuts[j] + 1])) / 2.0
    return float(gains[j]), threshold


def best_equality_split(
    values: np.ndarray, y: np.ndarray, min_leaf: int
) -> Optional[tuple[float, float]]:
    """(gain, value) of the best x == v split. Ties pick the smallest
    value since np.unique sorts."""
    n = values.shape[0]
    distinct, inverse = np.unique(values, return_inverse=True)
    if distinct.size < 2:
        return None
    counts = np.zeros((distinct.size, 2), dtype=np.int64)
    np.add.at(counts, (inverse, y), 1)
    group_n = counts.sum(axis=1)
    group_mal = counts[:, 1]
    total_mal = int(group_mal.sum())
    keep = (group_n >= min_leaf) & ((n - group_n) >= min_leaf)
    if not keep.any():
        return None
    base = float(_binary_entropy(np.array([total_mal]), np.array([n]))[0])
    rest_n = n - group_n
    rest_mal = total_mal - group_mal
    children = (group_n / n) * _binary_entropy(group_mal, group_n) + (
        rest_n / n
    ) * _binary_entropy(rest_mal, rest_n)
    gains = np.where(keep, base - children, -np.inf)
    j = int(np.argmax(gains))
    if gains[j] <= 0.0:
        return None
    return float(gains[j]), float(distinct[j])


@dataclass
class TreeNodes:
    """Flat node-array form, directly JSON serializable."""

    feature: list[int] = field(default_factory=list)
    split_kind: list[str] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    label: list[int] = field(default_factory=list)
    score: list[float] = field(default_factory=list)

    def add(self, split_kind: str, feature: int, threshold: float, label: int, score: float) -> int:
        index = len(self.feature)
        self.feature.append(feature)
        self.split_kind.append(split_kind)
        self.threshold.append(threshold)
        self.left.append(-1)
        self.right.append(-1)
        self.label.append(label)
        self.score.append(score)
        return index

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "split_kind": self.split_kind,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "label": self.label,
            "score": self.score,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TreeNodes":
        return cls(
            feature=[int(v) for v in d["feature"]],
            split_kind=[str(v) for v in d["split_kind"]],
            threshold=[float(v) for v in d["threshold"]],
            left=[int(v) for v in d["left"]],
            right=[int(v) for v in d["right"]],
            label=[int(v) for v in d["label"]],
            score=[float(v) for v in d["score"]],
        )


def _node_split(
    X: np.ndarray,
    y: np.ndarray,
    rows: np.ndarray,
    numeric_mask: np.ndarray,
    candidates: np.ndarray,
    min_leaf: int,
) -> Optional[tuple[int, str, float]]:
    """Best (feature, split kind, threshold) over the candidate features,
    ties broken by the lowest feature index."""
    best_gain = 0.0
    best: Optional[tuple[int, str, float]] = None
    sub_y = y[rows]
    for f in np.sort(candidates):
        values = X[rows, f]
        if numeric_mask[f]:
            found = best_numeric_split(values, sub_y, min_leaf)
            kind = SPLIT_NUMERIC
        else:
            found = best_equality_split(values, sub_y, min_leaf)
            kind = SPLIT_EQUALITY
        if found is not None and found[0] > best_gain:
            best_gain = found[0]
            best = (int(f), kind, found[1])
    return best


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    numeric_mask: np.ndarray,
    min_leaf: int = 2,
    max_depth: Optional[int] = None,
    candidates_per_split: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> TreeNodes:
    """Build a tree over all rows. With candidates_per_split set, each node
    considers that many features drawn without replacement from rng (the
    random-forest case); otherwise every feature is considered."""
    if min_leaf < 1:
        raise ValueError("min_leaf must be >= 1")
    if max_depth is not None and max_depth < 1:
        raise ValueError("max_depth must be >= 1 or None")
    n_features = X.shape[1]
    if candidates_per_split is not None:
        if not 1 <= candidates_per_split <= n_features:
            raise ValueError("candidates_per_split out of range")
        if rng is None:
            raise ValueError("candidates_per_split needs an rng")
    nodes = TreeNodes()
    all_features = np.arange(n_features)

    # Explicit stack: unlimited depth must not hit the interpreter's
    # recursion cap. Children are pushed right first so nodes are built
    # in left-first preorder, which pins the rng consumption order.
    root_rows = np.arange(X.shape[0], dtype=np.int64)
    work: list[tuple[np.ndarray, int, int, bool]] = [(root_rows, 0, -1, False)]
    while work:
        rows, depth, parent, is_left = work.pop()
        n = rows.shape[0]
        mal = int(y[rows].sum())
        score = mal / n
        label = 1 if mal > n - mal else 0
        pure = mal == 0 or mal == n
        at_depth_cap = max_depth is not None and depth >= max_depth
        split = None
        if not (pure or at_depth_cap or n < 2 * min_leaf):
            if candidates_per_split is None:
                candidates = all_features
            else:
                candidates = rng.choice(n_features, size=candidates_per_split, replace=False)
            split = _node_split(X, y, rows, numeric_mask, candidates, min_leaf)
        if split is None:
            index = nodes.add(LEAF, -1, 0.0, label, score)
        else:
            feature, kind, threshold = split
            index = nodes.add(kind, feature, threshold, label, score)
            values = X[rows, feature]
            if kind == SPLIT_NUMERIC:
                mask = values <= threshold
            else:
                mask = values == threshold
            work.append((rows[~mask], depth + 1, index, False))
            work.append((rows[mask], depth + 1, index, True))
        if parent >= 0:
            if is_left:
                nodes.left[parent] = index
            else:
                nodes.right[parent] = index
    return nodes


def predict_tree(nodes: TreeNodes, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(labels, scores) for every row, routed in batches."""
    n = X.shape[0]
    labels = np.zeros(n, dtype=np.int8)
    scores = np.zeros(n, dtype=np.float64)
    stack: list[tuple[int, np.ndarray]] = [(0, np.arange(n, dtype=np.int64))]
    while stack:
        node, rows = stack.pop()
        if rows.size == 0:
            continue
        if nodes.split_kind[node] == LEAF:
            labels[rows] = nodes.label[node]
            scores[rows] = nodes.score[node]
            continue
        values = X[rows, nodes.feature[node]]
        if nodes.split_kind[node] == SPLIT_NUMERIC:
            mask = values <= nodes.threshold[node]
        else:
            mask = values == nodes.threshold[node]
        stack.append((nodes.left[node], rows[mask]))
        stack.append((nodes.right[node], rows[~mask]))
    return labels, scores
