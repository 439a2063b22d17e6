"""Naive Bayes over the mixed feature schema.

Numeric features get a per-class Gaussian with a variance floor;
boolean and categorical features get Laplace-smoothed frequency tables.
The score is the posterior probability of the malicious class.
"""

from __future__ import annotations

import math

import numpy as np

_LOG_2PI = math.log(2.0 * math.pi)


def fit_bayes(
    X: np.ndarray, y: np.ndarray, numeric_mask: np.ndarray, variance_floor: float = 1e-9
) -> dict:
    if variance_floor <= 0:
        raise ValueError("variance_floor must be positive")
    n, n_features = X.shape
    params: dict = {
        "variance_floor": variance_floor,
        "log_prior": [],
        "numeric": {},
        "categorical": {},
    }
    class_rows = [np.nonzero(y == c)[0] for c in (0, 1)]
    for rows in class_rows:
        params["log_prior"].append(math.log(rows.size / n))
    for f in range(n_features):
        column = X[:, f]
        if numeric_mask[f]:
            means = []
            variances = []
            for rows in class_rows:
                sub = column[rows]
                means.append(float(sub.mean()))
                variances.append(max(float(sub.var()), variance_floor))
            params["numeric"][str(f)] = {"mean": means, "var": variances}
        else:
            # Category ids are small ints; the table covers every id seen
            # in training, ids beyond it fall back to the smoothed zero row.
            k = int(column.max()) + 1
            tables = []
            zero = []
            for rows in class_rows:
                counts = np.bincount(column[rows].astype(np.int64), minlength=k)
                smoothed = (counts + 1.0) / (rows.size + k)
                tables.append(np.log(smoothed).tolist())
                zero.append(math.log(1.0 / (rows.size + k)))
            params["categorical"][str(f)] = {"k": k, "log_prob": tables, "log_zero": zero}
    return params


def predict_bayes(params: dict, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = X.shape[0]
    log_post = np.tile(np.asarray(params["log_prior"], dtype=np.float64), (n, 1))
    for key, p in params["numeric"].items():
        f = int(key)
        column = X[:, f]
        for c in (0, 1):
            mean = p["mean"][c]
            var = p["var"][c]
            log_post[:, c] += -0.5 * (_LOG_2PI + math.log(var) + (column - mean) ** 2 / var)
    for key, p in params["categorical"].items():
        f = int(key)
        k = p["k"]
        ids = X[:, f].astype(np.int64)
        in_table = (ids >= 0) & (ids < k)
        clipped = np.clip(ids, 0, k - 1)
        for c in (0, 1):
            table = np.asarray(p["log_prob"][c], dtype=np.float64)
            # Ids never seen in training get the smoothed zero-count mass.
            contrib = np.where(in_table, table[clipped], p["log_zero"][c])
            log_post[:, c] += contrib
    # Normalize for a calibrated malicious posterior.
    shift = log_post.max(axis=1, keepdims=True)
    probs = np.exp(log_post - shift)
    probs /= probs.sum(axis=1, keepdims=True)
    scores = probs[:, 1]
    labels = (scores > 0.5).astype(np.int8)
    return labels, scores
