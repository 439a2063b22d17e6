"""Figure rendering for the report-style CLI paths.

Everything draws through the Agg backend so a headless run produces the
same files as a desktop one.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_LABEL_COLORS = {"malicious": "#c0392b", "legitimate": "#2d7dd2"}


def _finish(fig, path: str) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def ratio_figure(results: Sequence[tuple[float, dict]], path: str) -> str:
    """TPR and FPR for the malicious class across training ratios.
    results: (ratio, EvalReport.to_dict()) pairs."""
    ratios = [r for r, _ in results]
    tpr = [rep["tpr"]["malicious"] for _, rep in results]
    fpr = [rep["fpr"]["malicious"] for _, rep in results]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ratios, tpr, "o-", color=_LABEL_COLORS["malicious"], label="true positive rate")
    ax.plot(ratios, fpr, "s--", color=_LABEL_COLORS["legitimate"], label="false positive rate")
    ax.set_xlabel("legitimate-to-malicious training ratio (1:r)")
    ax.set_ylabel("rate")
    ax.set_ylim(-0.02, 1.02)
    ax.set_xticks(ratios)
    ax.legend()
    ax.set_title("Class-ratio sensitivity")
    return _finish(fig, path)


def curve_figure(curve: Sequence[tuple[int, float]], path: str) -> str:
    ks = [k for k, _ in curve]
    accs = [a for _, a in curve]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ks, accs, "o-", markersize=3, color="#2d7dd2")
    ax.set_xlabel("features kept (by information gain)")
    ax.set_ylabel("cross-validated accuracy")
    ax.set_ylim(min(accs) - 0.02, 1.0)
    ax.set_title("Accuracy vs feature count")
    return _finish(fig, path)


def gain_figure(named_gains: Sequence[tuple[str, float]], path: str, top: int = 15) -> str:
    rows = list(named_gains)[:top][::-1]
    names = [n for n, _ in rows]
    gains = [g for _, g in rows]
    fig, ax = plt.subplots(figsize=(6, 0.3 * len(rows) + 1.2))
    ax.barh(range(len(rows)), gains, color="#2d7dd2")
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(names, fontsize=8)
    ax.set_xlabel("information gain (bits)")
    ax.set_title(f"Top {len(rows)} features")
    return _finish(fig, path)


def breakdown_figure(breakdown: dict, title: str, path: str, top: int = 10) -> str:
    """Grouped bars per label class for one breakdown table
    (value -> {count, share} per label)."""
    labels = [l for l in ("malicious", "legitimate") if breakdown.get(l)]
    values: list[str] = []
    for label in labels:
        for value in breakdown[label]:
            if value not in values:
                values.append(value)
    values = values[:top]
    fig, ax = plt.subplots(figsize=(max(6, 0.8 * len(values)), 4))
    width = 0.8 / max(len(labels), 1)
    for offset, label in enumerate(labels):
        shares = [breakdown[label].get(v, {}).get("share", 0.0) for v in values]
        xs = [i + offset * width for i in range(len(values))]
        ax.bar(xs, shares, width=width, label=label, color=_LABEL_COLORS.get(label))
    ax.set_xticks([i + width * (len(labels) - 1) / 2 for i in range(len(values))])
    ax.set_xticklabels(values, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("share within class")
    ax.set_title(title)
    if labels:
        ax.legend()
    return _finish(fig, path)


def retention_figure(summary: dict, path: str) -> str:
    """Five summary bars on a log axis; retention spans seconds to weeks."""
    keys = ["min_hours", "median_hours", "mean_hours", "stddev_hours", "max_hours"]
    names = [k.replace("_hours", "") for k in keys]
    values = [max(summary[k], 1e-4) for k in keys]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(names, values, color="#c0392b")
    ax.set_yscale("log")
    ax.set_ylabel("hours (log scale)")
    ax.set_title(
        f"Retention of removed posts (n={summary['count']}, "
        f"{summary['within_5h_fraction']:.0%} gone within 5h)"
    )
    return _finish(fig, path)
