"""Matrix-backed dataset over the fixed feature schema."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from ..features import EncoderVocabularies, Lexicons, bundled_lexicons, extract_all
from ..model import (
    FeatureSchema,
    FeatureVector,
    LEGITIMATE,
    LabelValue,
    MALICIOUS,
    canonical_schema,
)
from ..urls import extract_urls

MALICIOUS_CLASS = 1
LEGITIMATE_CLASS = 0


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Dataset:
    """Rows are posts, columns follow the schema; y is 1 for malicious.

    feature_indices maps each column back to its position in the full
    42-slot schema, so projections keep their identity for reporting.
    """

    X: np.ndarray
    y: np.ndarray
    schema: FeatureSchema
    post_ids: tuple[str, ...]
    feature_indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise DatasetError("X and y shapes disagree")
        if self.X.shape[1] != len(self.schema):
            raise DatasetError("column count does not match schema")
        if len(self.feature_indices) != len(self.schema):
            raise DatasetError("feature index map does not match schema")

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def class_counts(self) -> tuple[int, int]:
        """(malicious, legitimate)"""
        positives = int(self.y.sum())
        return positives, self.n_rows - positives

    def kinds(self) -> tuple[str, ...]:
        return tuple(f.kind for f in self.schema.features)

    def project(self, indices: Sequence[int]) -> "Dataset":
        indices = list(indices)
        features = tuple(self.schema.features[i] for i in indices)
        return Dataset(
            X=np.ascontiguousarray(self.X[:, indices]),
            y=self.y,
            schema=FeatureSchema(features=features),
            post_ids=self.post_ids,
            feature_indices=tuple(self.feature_indices[i] for i in indices),
        )

    def subset_rows(self, rows: Sequence[int] | np.ndarray) -> "Dataset":
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(
            X=self.X[rows],
            y=self.y[rows],
            schema=self.schema,
            post_ids=tuple(self.post_ids[int(i)] for i in rows),
            feature_indices=self.feature_indices,
        )


def from_vectors(
    vectors: Iterable[FeatureVector],
    schema: Optional[FeatureSchema] = None,
    labels: Optional[dict[str, LabelValue]] = None,
) -> Dataset:
    schema = schema or canonical_schema()
    rows: list[tuple[float, ...]] = []
    ys: list[int] = []
    ids: list[str] = []
    for vector in vectors:
        if len(vector.values) != len(schema):
            raise DatasetError(
                f"vector {vector.post_id!r} has {len(vector.values)} values, "
                f"schema expects {len(schema)}"
            )
        label = vector.label
        if label is None and labels is not None:
            label = labels.get(vector.post_id)
        if label not in (MALICIOUS, LEGITIMATE):
            raise DatasetError(f"vector {vector.post_id!r} is unlabeled")
        rows.append(vector.values)
        ys.append(MALICIOUS_CLASS if label == MALICIOUS else LEGITIMATE_CLASS)
        ids.append(vector.post_id)
    if not rows:
        raise DatasetError("no vectors")
    return Dataset(
        X=np.asarray(rows, dtype=np.float64),
        y=np.asarray(ys, dtype=np.int8),
        schema=schema,
        post_ids=tuple(ids),
        feature_indices=tuple(range(len(schema))),
    )


def from_corpus(corpus, vocab: EncoderVocabularies, lex: Optional[Lexicons] = None) -> Dataset:
    """Extract every post in a labeled corpus. Posts without a label are
    rejected; posts whose primary URL fails to parse still yield rows
    (zeroed link block), matching the extractor's flagged-post contract."""
    lex = lex or bundled_lexicons()
    if corpus.labels is None:
        raise DatasetError("corpus carries no labels")
    vectors = []
    for post in corpus.posts:
        extracted = extract_urls(post)
        vector = extract_all(post, extracted, vocab, lex)
        vectors.append(vector)
    return from_vectors(vectors, labels=corpus.labels)
