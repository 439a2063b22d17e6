"""AdaBoost over depth-1 stumps.

Feature orderings and category partitions are computed once and reused
across rounds; only the weighted prefix sums change as the example
weights are reweighted.
"""

from __future__ import annotations

import math

import numpy as np

_EPS = 1e-12


class _FeaturePrep:
    """Immutable per-feature context shared by all boosting rounds."""

    def __init__(self, values: np.ndarray, numeric: bool):
        self.numeric = numeric
        if numeric:
            self.order = np.argsort(values, kind="stable")
            sv = values[self.order]
            self.cuts = np.nonzero(sv[:-1] != sv[1:])[0]
            self.thresholds = (sv[self.cuts] + sv[self.cuts + 1]) / 2.0
        else:
            self.distinct, self.inverse = np.unique(values, return_inverse=True)


def _best_stump_for_feature(
    prep: _FeaturePrep, w: np.ndarray, y_pos: np.ndarray
) -> tuple[float, float, int] | None:
    """(error, threshold, left_label) minimizing weighted error for this
    feature, or None when the feature is constant. left_label is the +-1
    prediction on the x <= t (or x == v) side."""
    if prep.numeric:
        if prep.cuts.size == 0:
            return None
        sw = w[prep.order]
        sp = np.where(y_pos[prep.order], sw, 0.0)
        wp_left = np.cumsum(sp)[prep.cuts]
        w_left = np.cumsum(sw)[prep.cuts]
        thresholds = prep.thresholds
    else:
        if prep.distinct.size < 2:
            return None
        k = prep.distinct.size
        wp_left = np.zeros(k)
        w_left = np.zeros(k)
        np.add.at(wp_left, prep.inverse, np.where(y_pos, w, 0.0))
        np.add.at(w_left, prep.inverse, w)
        thresholds = prep.distinct
    wp_total = float(np.where(y_pos, w, 0.0).sum())
    w_total = float(w.sum())
    wm_left = w_left - wp_left
    # error when the left side predicts +1: left misses the negatives
    # there, right misses the positives there.
    err_pos = wm_left + (wp_total - wp_left)
    err_neg = w_total - err_pos
    j_pos = int(np.argmin(err_pos))
    j_neg = int(np.argmin(err_neg))
    if err_pos[j_pos] <= err_neg[j_neg]:
        return float(err_pos[j_pos]), float(thresholds[j_pos]), 1
    return float(err_neg[j_neg]), float(thresholds[j_neg]), -1


def fit_adaboost(
    X: np.ndarray, y: np.ndarray, numeric_mask: np.ndarray, rounds: int = 50
) -> dict:
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    n, n_features = X.shape
    y_pos = y == 1
    y_signed = np.where(y_pos, 1.0, -1.0)
    preps = [_FeaturePrep(X[:, f], bool(numeric_mask[f])) for f in range(n_features)]
    w = np.full(n, 1.0 / n)
    stumps: list[dict] = []
    for _ in range(rounds):
        best: tuple[float, int, float, int] | None = None
        for f in range(n_features):
            found = _best_stump_for_feature(preps[f], w, y_pos)
            if found is None:
                continue
            error, threshold, left_label = found
            if best is None or error < best[0]:
                best = (error, f, threshold, left_label)
        if best is None:
            break
        error, f, threshold, left_label = best
        error = min(max(error, _EPS), 1.0 - _EPS)
        if error >= 0.5:
            break
        alpha = 0.5 * math.log((1.0 - error) / error)
        if preps[f].numeric:
            on_left = X[:, f] <= threshold
        else:
            on_left = X[:, f] == threshold
        h = np.where(on_left, float(left_label), float(-left_label))
        stumps.append(
            {
                "feature": f,
                "kind": "num" if preps[f].numeric else "eq",
                "threshold": threshold,
                "left_label": left_label,
                "alpha": alpha,
            }
        )
        w = w * np.exp(-alpha * y_signed * h)
        w /= w.sum()
    return {"rounds": rounds, "stumps": stumps}


def predict_adaboost(params: dict, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = X.shape[0]
    margin = np.zeros(n)
    alpha_sum = 0.0
    for stump in params["stumps"]:
        values = X[:, stump["feature"]]
        if stump["kind"] == "num":
            on_left = values <= stump["threshold"]
        else:
            on_left = values == stump["threshold"]
        h = np.where(on_left, float(stump["left_label"]), float(-stump["left_label"]))
        margin += stump["alpha"] * h
        alpha_sum += stump["alpha"]
    if alpha_sum == 0.0:
        return np.zeros(n, dtype=np.int8), np.full(n, 0.5)
    scores = (margin / alpha_sum + 1.0) / 2.0
    labels = (margin > 0).astype(np.int8)
    return labels, scores
