"""Training, classification, and the versioned model file format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..features import EncoderVocabularies
from ..model import (
    FeatureSchema,
    FeatureVector,
    LEGITIMATE,
    LabelValue,
    MALICIOUS,
    schema_from_json,
)
from . import bayes, boost, forest, tree
from .dataset import Dataset

MODEL_KINDS = ("naive_bayes", "decision_tree", "random_forest", "adaboost")

MODEL_FORMAT = "sentinel-model"
MODEL_VERSION = 1

DEFAULT_HYPERPARAMS: dict[str, dict] = {
    "naive_bayes": {"variance_floor": 1e-9},
    "decision_tree": {"min_leaf": 2, "max_depth": None},
    "random_forest": {
        "n_trees": 100,
        "candidates_per_split": 7,
        "min_leaf": 1,
        "max_depth": None,
    },
    "adaboost": {"rounds": 50},
}


class TrainError(ValueError):
    pass


class ModelFileError(ValueError):
    pass


@dataclass(frozen=True)
class TrainedModel:
    """Self-contained: schema, encoders, and parameters travel together,
    so classification needs no other state."""

    kind: str
    params: dict
    schema: FeatureSchema
    vocabularies: Optional[EncoderVocabularies]
    training_seed: int
    # Positions of the model's columns inside the full canonical schema,
    # kept so full-width vectors can be projected before scoring.
    feature_indices: tuple[int, ...]
    hyperparams: dict


def resolve_hyperparams(kind: str, overrides: Optional[dict] = None) -> dict:
    if kind not in MODEL_KINDS:
        raise TrainError(f"unknown model kind {kind!r}")
    merged = dict(DEFAULT_HYPERPARAMS[kind])
    for key, value in (overrides or {}).items():
        if key not in merged:
            raise TrainError(f"unknown hyperparameter {key!r} for {kind}")
        merged[key] = value
    for key in ("n_trees", "candidates_per_split", "min_leaf", "rounds"):
        if key in merged and (not isinstance(merged[key], int) or merged[key] < 1):
            raise TrainError(f"{key} must be a positive integer")
    if "max_depth" in merged and merged["max_depth"] is not None:
        if not isinstance(merged["max_depth"], int) or merged["max_depth"] < 1:
            raise TrainError("max_depth must be a positive integer or None")
    if "variance_floor" in merged and not merged["variance_floor"] > 0:
        raise TrainError("variance_floor must be positive")
    return merged


def _numeric_mask(ds: Dataset) -> np.ndarray:
    return np.array([k == "numeric" for k in ds.kinds()], dtype=bool)


def train(
    ds: Dataset,
    kind: str,
    hyperparams: Optional[dict] = None,
    seed: int = 0,
    vocabularies: Optional[EncoderVocabularies] = None,
) -> TrainedModel:
    merged = resolve_hyperparams(kind, hyperparams)
    positives, negatives = ds.class_counts()
    if positives < 2 or negatives < 2:
        raise TrainError(
            f"need at least 2 examples per class, got {positives} malicious "
            f"and {negatives} legitimate"
        )
    mask = _numeric_mask(ds)
    if kind == "naive_bayes":
        params = bayes.fit_bayes(ds.X, ds.y, mask, variance_floor=merged["variance_floor"])
    elif kind == "decision_tree":
        nodes = tree.grow_tree(
            ds.X,
            ds.y.astype(np.int64),
            mask,
            min_leaf=merged["min_leaf"],
            max_depth=merged["max_depth"],
        )
        params = {"tree": nodes.to_dict()}
    elif kind == "random_forest":
        trees = forest.grow_forest(
            ds.X,
            ds.y.astype(np.int64),
            mask,
            n_trees=merged["n_trees"],
            candidates_per_split=min(merged["candidates_per_split"], ds.n_features),
            min_leaf=merged["min_leaf"],
            max_depth=merged["max_depth"],
            seed=seed,
        )
        params = {"trees": [t.to_dict() for t in trees]}
    else:
        params = boost.fit_adaboost(ds.X, ds.y.astype(np.int64), mask, rounds=merged["rounds"])
    return TrainedModel(
        kind=kind,
        params=params,
        schema=ds.schema,
        vocabularies=vocabularies,
        training_seed=seed,
        feature_indices=ds.feature_indices,
        hyperparams=merged,
    )


def predict_matrix(model: TrainedModel, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(labels, scores) arrays for a matrix already in model-column order."""
    if X.shape[1] != len(model.schema):
        raise TrainError(
            f"matrix has {X.shape[1]} columns, model expects {len(model.schema)}"
        )
    if model.kind == "naive_bayes":
        return bayes.predict_bayes(model.params, X)
    if model.kind == "decision_tree":
        nodes = tree.TreeNodes.from_dict(model.params["tree"])
        labels, scores = tree.predict_tree(nodes, X)
        return labels, scores
    if model.kind == "random_forest":
        trees = [tree.TreeNodes.from_dict(d) for d in model.params["trees"]]
        return forest.predict_forest(trees, X)
    return boost.predict_adaboost(model.params, X)


def classify(model: TrainedModel, vector: FeatureVector) -> tuple[LabelValue, float]:
    """Label one vector. A full 42-column vector is projected down when the
    model was trained on a feature subset; anything else must match the
    model's column count exactly."""
    values = vector.values
    if len(values) != len(model.schema):
        full_width = max(model.feature_indices) + 1 if model.feature_indices else 0
        if len(values) >= full_width and len(model.feature_indices) == len(model.schema):
            values = tuple(values[i] for i in model.feature_indices)
        else:
            raise TrainError(
                f"vector {vector.post_id!r} has {len(vector.values)} values, "
                f"model expects {len(model.schema)}"
            )
    X = np.asarray([values], dtype=np.float64)
    labels, scores = predict_matrix(model, X)
    label: LabelValue = MALICIOUS if int(labels[0]) == 1 else LEGITIMATE
    return label, float(scores[0])


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": model.kind,
        "params": model.params,
        "schema": json.loads(model.schema.to_json()),
        "vocabularies": model.vocabularies.to_dict() if model.vocabularies else None,
        "training_seed": model.training_seed,
        "feature_indices": list(model.feature_indices),
        "hyperparams": model.hyperparams,
    }


def model_from_dict(d: dict) -> TrainedModel:
    if d.get("format") != MODEL_FORMAT:
        raise ModelFileError("not a model file")
    if d.get("version") != MODEL_VERSION:
        raise ModelFileError(
            f"unsupported model version {d.get('version')!r}, expected {MODEL_VERSION}"
        )
    vocab = d.get("vocabularies")
    return TrainedModel(
        kind=d["kind"],
        params=d["params"],
        schema=schema_from_json(json.dumps(d["schema"])),
        vocabularies=EncoderVocabularies.from_dict(vocab) if vocab else None,
        training_seed=int(d["training_seed"]),
        feature_indices=tuple(int(i) for i in d["feature_indices"]),
        hyperparams=d.get("hyperparams", {}),
    )


def save_model(model: TrainedModel, path: str) -> None:
    text = json.dumps(model_to_dict(model), sort_keys=True, separators=(",", ":"))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
        handle.write("\n")


def load_model(path: str) -> TrainedModel:
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: corrupt model file at offset {exc.pos}") from None
    if not isinstance(payload, dict):
        raise ModelFileError(f"{path}: corrupt model file at offset 0")
    try:
        return model_from_dict(payload)
    except (KeyError, TypeError) as exc:
        raise ModelFileError(f"{path}: malformed model file ({exc})") from None
