"""Uniform prediction boundary: built-in linear models, a remote adapter, and
prediction-derived artifacts (decision cache, confusion cells)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import requests

from .data import Dataset, FeatureSchema
from .errors import (
    ArityMismatch,
    InvalidModel,
    MalformedResponse,
    OutOfRangeProbability,
    SingleClassDataset,
    TransportFailure,
)

TP, FP, TN, FN = "TP", "FP", "TN", "FN"
CELLS = (TP, FP, TN, FN)


@dataclass(frozen=True)
class DecisionConfig:
    """Decision threshold; predicted class is 1 iff p >= threshold."""

    threshold: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie strictly inside (0, 1)")

    def decide(self, probability: float) -> int:
        return 1 if probability >= self.threshold else 0


def encoded_width(schema: Sequence[FeatureSchema]) -> int:
    """Number of model input columns: 1 per continuous feature, one-hot per category."""
    width = 0
    for feature in schema:
        width += 1 if feature.is_continuous else len(feature.categories or ())
    return width


def encode_rows(schema: Sequence[FeatureSchema], rows: Sequence[Sequence]) -> np.ndarray:
    """Encode raw value rows into the model input matrix.

    Continuous features pass through; categorical features one-hot encode over
    the schema's category list (full one-hot, no reference drop), columns in
    schema order.
    """
    if all(f.is_continuous for f in schema):
        return np.asarray(rows, dtype=np.float64).reshape(len(rows), len(schema))
    out = np.zeros((len(rows), encoded_width(schema)), dtype=np.float64)
    col = 0
    for j, feature in enumerate(schema):
        if feature.is_continuous:
            out[:, col] = [row[j] for row in rows]
            col += 1
        else:
            index = {c: k for k, c in enumerate(feature.categories or ())}
            for i, row in enumerate(rows):
                out[i, col + index[row[j]]] = 1.0
            col += len(index)
    return out


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class Predictor:
    """Deterministic prediction boundary; implementations must be pure."""

    name: str = "predictor"

    def predict_proba_batch(self, rows: Sequence[Sequence]) -> np.ndarray:
        raise NotImplementedError

    def predict_proba(self, values: Sequence) -> float:
        return float(self.predict_proba_batch([values])[0])


class LinearPredictor(Predictor):
    """Logistic of an affine function over the encoded feature space."""

    def __init__(
        self,
        schema: Sequence[FeatureSchema],
        intercept: float,
        weights: Sequence[float],
        name: str = "linear",
    ) -> None:
        width = encoded_width(schema)
        if len(weights) != width:
            raise ArityMismatch(f"expected {width} weights, got {len(weights)}")
        self.schema = list(schema)
        self.intercept = float(intercept)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.name = name

    def predict_proba_batch(self, rows: Sequence[Sequence]) -> np.ndarray:
        X = encode_rows(self.schema, rows)
        # row-wise multiply + pairwise sum instead of BLAS matmul: the result
        # must be bit-identical whatever the batch size, so a recorded
        # probability can be reproduced by re-scoring a single row
        z = (X * self.weights).sum(axis=1) + self.intercept
        return _sigmoid(z)


def train_logistic(
    dataset: Dataset, epochs: int = 500, learning_rate: float = 0.1
) -> LinearPredictor:
    """Full-batch gradient-descent logistic regression.

    Features are standardized internally for stable steps; the returned
    predictor folds the standardization back into raw-space coefficients.
    Zero initialization and full-batch updates make training deterministic.
    """
    y = dataset.label_array.astype(np.float64)
    if y.min() == y.max():
        raise SingleClassDataset("all labels belong to one class")
    X = encode_rows(dataset.schema, [row.values for row in dataset.rows])
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    stds[stds == 0.0] = 1.0
    Xs = (X - means) / stds

    w = np.zeros(X.shape[1], dtype=np.float64)
    b = 0.0
    n = float(len(y))
    for _ in range(epochs):
        p = _sigmoid(Xs @ w + b)
        err = p - y
        w -= learning_rate * (Xs.T @ err) / n
        b -= learning_rate * float(err.mean())

    raw_w = w / stds
    raw_b = b - float(np.dot(w, means / stds))
    return LinearPredictor(dataset.schema, raw_b, raw_w, name="logistic")


def load_linear(path: str | Path, schema: Sequence[FeatureSchema]) -> LinearPredictor:
    """Load a coefficient file: JSON with "intercept" and "weights"."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except ValueError as exc:
            raise InvalidModel(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict) or "intercept" not in doc or "weights" not in doc:
        raise InvalidModel(f"{path}: expected keys 'intercept' and 'weights'")
    return LinearPredictor(schema, float(doc["intercept"]), doc["weights"], name="linear")


def save_linear(predictor: LinearPredictor, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(
            {"intercept": predictor.intercept, "weights": list(map(float, predictor.weights))},
            fh,
        )


class RemotePredictor(Predictor):
    """Adapter for an external model over HTTP.

    Wire format: POST {"instances": [[v1, v2, ...], ...]} with continuous
    values as numbers and categorical values as category-label strings,
    feature order = schema order; response {"probabilities": [p1, ...]}.
    """

    def __init__(self, endpoint: str, timeout: float = 30.0, name: str = "remote") -> None:
        self.endpoint = endpoint
        self.timeout = timeout
        self.name = name
        self._http = requests.Session()

    def predict_proba_batch(self, rows: Sequence[Sequence]) -> np.ndarray:
        payload = {"instances": [list(row) for row in rows]}
        try:
            response = self._http.post(self.endpoint, json=payload, timeout=self.timeout)
            response.raise_for_status()
        except requests.RequestException as exc:
            raise TransportFailure(f"{self.endpoint}: {exc}") from None
        try:
            body = response.json()
        except ValueError:
            raise MalformedResponse(f"{self.endpoint}: response is not JSON") from None
        if not isinstance(body, dict) or "probabilities" not in body:
            raise MalformedResponse(f"{self.endpoint}: missing 'probabilities'")
        probs = body["probabilities"]
        if not isinstance(probs, list) or len(probs) != len(rows):
            raise MalformedResponse(
                f"{self.endpoint}: expected {len(rows)} probabilities, got "
                f"{len(probs) if isinstance(probs, list) else type(probs).__name__}"
            )
        out = np.empty(len(probs), dtype=np.float64)
        for i, p in enumerate(probs):
            if not isinstance(p, (int, float)) or not math.isfinite(p):
                raise MalformedResponse(f"{self.endpoint}: non-numeric probability {p!r}")
            if not 0.0 <= p <= 1.0:
                raise OutOfRangeProbability(f"{self.endpoint}: probability {p} outside [0, 1]")
            out[i] = p
        return out


def remote_predict(endpoint: str, instances: Sequence[Sequence]) -> list[float]:
    """One-shot remote scoring; order-aligned with the input batch."""
    if not instances:
        raise ValueError("batch must be non-empty")
    return [float(p) for p in RemotePredictor(endpoint).predict_proba_batch(instances)]


@dataclass
class PredictionCache:
    """Per-row probability, decision, and confusion cell under a fixed threshold."""

    probabilities: np.ndarray
    decisions: np.ndarray
    cells: np.ndarray
    threshold: float

    def __len__(self) -> int:
        return len(self.probabilities)


def build_prediction_cache(
    dataset: Dataset, predictor: Predictor, decision: DecisionConfig
) -> PredictionCache:
    probabilities = np.asarray(
        predictor.predict_proba_batch([row.values for row in dataset.rows]), dtype=np.float64
    )
    return cache_from_probabilities(dataset, probabilities, decision)


def cache_from_probabilities(
    dataset: Dataset, probabilities: np.ndarray, decision: DecisionConfig
) -> PredictionCache:
    if probabilities.shape != (len(dataset),):
        raise ValueError("probability array does not match dataset size")
    decisions = (probabilities >= decision.threshold).astype(np.int64)
    y = dataset.label_array
    cells = np.where(
        decisions == 1, np.where(y == 1, TP, FP), np.where(y == 1, FN, TN)
    )
    return PredictionCache(
        probabilities=probabilities,
        decisions=decisions,
        cells=cells,
        threshold=decision.threshold,
    )


def confusion_matrix(cache: PredictionCache) -> dict[str, int]:
    """Counts per confusion cell; always sums to the dataset size."""
    return {cell: int(np.sum(cache.cells == cell)) for cell in CELLS}
