"""Classifiers, feature ranking, and evaluation built on the fixed schema."""

from .dataset import Dataset, DatasetError, from_corpus, from_vectors
from .evaluate import (
    EvalReport,
    EvaluationError,
    accuracy_vs_k,
    concat_datasets,
    cross_validate,
    ratio_experiment,
)
from .info_gain import info_gain, rank_features, select_top_k
from .models import (
    DEFAULT_HYPERPARAMS,
    MODEL_KINDS,
    ModelFileError,
    TrainError,
    TrainedModel,
    classify,
    load_model,
    predict_matrix,
    resolve_hyperparams,
    save_model,
    train,
)

__all__ = [
    "Dataset",
    "DatasetError",
    "from_corpus",
    "from_vectors",
    "EvalReport",
    "EvaluationError",
    "accuracy_vs_k",
    "concat_datasets",
    "cross_validate",
    "ratio_experiment",
    "info_gain",
    "rank_features",
    "select_top_k",
    "DEFAULT_HYPERPARAMS",
    "MODEL_KINDS",
    "ModelFileError",
    "TrainError",
    "TrainedModel",
    "classify",
    "load_model",
    "predict_matrix",
    "resolve_hyperparams",
    "save_model",
    "train",
]
