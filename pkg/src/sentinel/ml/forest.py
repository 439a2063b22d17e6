"""Random forest: bootstrap-sampled info-gain trees with per-split
feature subsampling and majority vote."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .tree import TreeNodes, grow_tree, predict_tree


def grow_forest(
    X: np.ndarray,
    y: np.ndarray,
    numeric_mask: np.ndarray,
    n_trees: int = 100,
    candidates_per_split: int = 7,
    min_leaf: int = 1,
    max_depth: Optional[int] = None,
    seed: int = 0,
) -> list[TreeNodes]:
    """Each tree gets its own child of the master seed, so the result is
    identical no matter what order the trees are built in."""
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    n = X.shape[0]
    children = np.random.SeedSequence(seed).spawn(n_trees)
    trees: list[TreeNodes] = []
    for child in children:
        rng = np.random.default_rng(child)
        sample = rng.integers(0, n, size=n)
        trees.append(
            grow_tree(
                X[sample],
                y[sample],
                numeric_mask,
                min_leaf=min_leaf,
                max_depth=max_depth,
                candidates_per_split=candidates_per_split,
                rng=rng,
            )
        )
    return trees


def predict_forest(trees: list[TreeNodes], X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(labels, scores). Score is the malicious vote fraction, so it takes
    values in {0, 1/B, ..., 1}. A tied vote goes to legitimate."""
    votes = np.zeros(X.shape[0], dtype=np.int64)
    for tree in trees:
        labels, _ = predict_tree(tree, X)
        votes += labels
    scores = votes / len(trees)
    labels = (scores > 0.5).astype(np.int8)
    return labels, scores
