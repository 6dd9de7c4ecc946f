"""Session orchestration: ties ingestion, prediction, binning, generation,
cohorts, and aggregation together, and persists the whole state as one JSON
document referencing the dataset by content hash."""

from __future__ import annotations

import hashlib
import json
import uuid
from dataclasses import dataclass, field
from pathlib import Path
import numpy as np

from .aggregate import TransitionAggregate, aggregate_transitions
from .cohort import CohortSummary, FilterSet, apply_filterset, bin_slice, sort_features, summarize_cohort
from .data import Dataset, Instance, load_csv, parse_schema_spec
from .discretize import DEFAULT_BIN_COUNT, DiscretizationScheme, fit_discretizer
from .engine import (
    AlgorithmConfig,
    CounterfactualExplanation,
    generate_batch,
    scheme_fingerprint,
)
from .errors import DatasetMismatch, InvalidModel, UnknownRow
from .predict import (
    DecisionConfig,
    LinearPredictor,
    PredictionCache,
    Predictor,
    RemotePredictor,
    cache_from_probabilities,
    load_linear,
    train_logistic,
)

COHORT_NAMES = ("A", "B")


@dataclass
class Session:
    session_id: str
    dataset_path: str
    dataset_sha256: str
    schema_spec: dict
    model_spec: dict
    dataset: Dataset
    predictor: Predictor
    decision: DecisionConfig
    bin_count: int
    scheme: DiscretizationScheme
    algorithm: AlgorithmConfig
    cache: PredictionCache
    filters: dict[str, FilterSet]
    explanations: list[CounterfactualExplanation]
    fingerprint: str
    sample_cap: int | None = None
    sample_seed: int = 0
    sample_rows: list[int] | None = None
    _by_row: dict[int, CounterfactualExplanation] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._by_row = {e.row_id: e for e in self.explanations}

    # -- cohort-facing views -------------------------------------------

    def cohort(self, name: str) -> list[int]:
        return apply_filterset(self.dataset, self.cache, self.filters[name])

    def summary(self, name: str) -> CohortSummary:
        return summarize_cohort(self.cohort(name), self.dataset, self.scheme)

    def cohort_aggregate(self, name: str) -> tuple[TransitionAggregate, dict[str, int]]:
        """Aggregate of the cohort's explanations plus the unexplained tally
        (rows whose search failed, and rows with no generated explanation)."""
        row_ids = self.cohort(name)
        members = [self._by_row[i] for i in row_ids if i in self._by_row]
        aggregate = aggregate_transitions(members)
        if not members:
            aggregate.fingerprint = self.fingerprint
        unexplained = {
            "failed": len(aggregate.failed_ids),
            "missing": len(row_ids) - len(members),
        }
        return aggregate, unexplained

    def compare(self, sort_key: str) -> dict:
        summary_a = self.summary("A")
        summary_b = self.summary("B")
        agg_a, _ = self.cohort_aggregate("A")
        agg_b, _ = self.cohort_aggregate("B")
        order = sort_features(summary_a, summary_b, (agg_a, agg_b), sort_key, self.scheme)
        return {"order": order, "a": summary_a, "b": summary_b}

    def slice(self, name: str, feature: int, bin_index: int) -> list[Instance]:
        return bin_slice(self.cohort(name), self.dataset, self.scheme, feature, bin_index)

    def detail(self, row_id: int) -> CounterfactualExplanation:
        if row_id not in self._by_row:
            raise UnknownRow(f"no explanation for row {row_id}")
        return self._by_row[row_id]

    def success_rate(self) -> float:
        if not self.explanations:
            return 0.0
        return sum(e.success for e in self.explanations) / len(self.explanations)

    def set_filter(self, name: str, filterset: FilterSet) -> None:
        if name not in COHORT_NAMES:
            raise KeyError(name)
        self.filters[name] = filterset


def _file_sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def build_predictor(model_spec: dict, dataset: Dataset) -> Predictor:
    kind = model_spec.get("kind")
    if kind == "logistic":
        return train_logistic(
            dataset,
            epochs=int(model_spec.get("epochs", 500)),
            learning_rate=float(model_spec.get("learning_rate", 0.1)),
        )
    if kind == "linear":
        if "path" in model_spec:
            return load_linear(model_spec["path"], dataset.schema)
        if "intercept" in model_spec and "weights" in model_spec:
            return LinearPredictor(
                dataset.schema, float(model_spec["intercept"]), model_spec["weights"]
            )
        raise InvalidModel("linear model spec needs 'path' or inline coefficients")
    if kind == "remote":
        if "endpoint" not in model_spec:
            raise InvalidModel("remote model spec needs 'endpoint'")
        return RemotePredictor(model_spec["endpoint"])
    raise InvalidModel(f"unknown model kind {kind!r}")


def _resolve_locked(locked, dataset: Dataset) -> frozenset[int]:
    indices = set()
    for item in locked or ():
        indices.add(dataset.feature_index(item) if isinstance(item, str) else int(item))
    return frozenset(indices)


def _sample_rows(size: int, cap: int | None, seed: int) -> list[int] | None:
    if cap is None or cap >= size:
        return None
    rng = np.random.default_rng(seed)
    return sorted(int(i) for i in rng.choice(size, size=cap, replace=False))


def default_filters() -> dict[str, FilterSet]:
    # the session opens comparing predicted-positive vs predicted-negative
    return {
        "A": FilterSet(cells=frozenset({"TP", "FP"})),
        "B": FilterSet(cells=frozenset({"TN", "FN"})),
    }


def create_session(
    dataset_path: str | Path,
    schema_spec: dict | str | Path,
    model_spec: dict,
    overrides: dict | None = None,
    session_id: str | None = None,
) -> Session:
    """Load, train/wrap, predict, bin, and eagerly generate all explanations.

    Eager generation means filter edits afterwards only select among
    precomputed explanations; regeneration happens on config change only.
    """
    overrides = dict(overrides or {})
    spec = parse_schema_spec(schema_spec)
    dataset = load_csv(dataset_path, spec)

    decision = DecisionConfig(threshold=float(overrides.get("threshold", 0.5)))
    bin_count = int(overrides.get("bin_count", DEFAULT_BIN_COUNT))
    algorithm = AlgorithmConfig(
        max_changed_features=int(overrides.get("max_changed_features", 5)),
        max_bin_shift=int(overrides.get("max_bin_shift", 4)),
        locked_features=_resolve_locked(overrides.get("locked_features"), dataset),
        max_steps=overrides.get("max_steps"),
    )
    sample_cap = overrides.get("sample_cap")
    sample_cap = int(sample_cap) if sample_cap is not None else None
    sample_seed = int(overrides.get("sample_seed", 0))

    predictor = build_predictor(model_spec, dataset)
    cache = cache_from_probabilities(
        dataset,
        np.asarray(predictor.predict_proba_batch([r.values for r in dataset.rows])),
        decision,
    )
    scheme = fit_discretizer(dataset, bin_count)
    sample_rows = _sample_rows(len(dataset), sample_cap, sample_seed)
    explanations = generate_batch(
        dataset, predictor, scheme, algorithm, decision, row_ids=sample_rows
    )
    return Session(
        session_id=session_id or uuid.uuid4().hex,
        dataset_path=str(dataset_path),
        dataset_sha256=_file_sha256(dataset_path),
        schema_spec=spec,
        model_spec=dict(model_spec),
        dataset=dataset,
        predictor=predictor,
        decision=decision,
        bin_count=bin_count,
        scheme=scheme,
        algorithm=algorithm,
        cache=cache,
        filters=default_filters(),
        explanations=explanations,
        fingerprint=scheme_fingerprint(scheme, algorithm, decision),
        sample_cap=sample_cap,
        sample_seed=sample_seed,
        sample_rows=sample_rows,
    )


def update_config(
    session: Session,
    algorithm: AlgorithmConfig | None = None,
    bin_count: int | None = None,
) -> dict:
    """Re-bin and regenerate under new constraints; stored explanations are
    replaced wholesale so they always match the session fingerprint."""
    new_algorithm = algorithm if algorithm is not None else session.algorithm
    new_bin_count = bin_count if bin_count is not None else session.bin_count
    new_scheme = (
        fit_discretizer(session.dataset, new_bin_count)
        if new_bin_count != session.bin_count
        else session.scheme
    )
    new_fingerprint = scheme_fingerprint(new_scheme, new_algorithm, session.decision)
    previous_fingerprint = session.fingerprint
    previous_rate = session.success_rate()
    if new_fingerprint == previous_fingerprint:
        return {
            "regenerated": False,
            "fingerprint": previous_fingerprint,
            "previous_fingerprint": previous_fingerprint,
            "success_rate": previous_rate,
            "previous_success_rate": previous_rate,
            "success_rate_delta": 0.0,
        }
    explanations = generate_batch(
        session.dataset,
        session.predictor,
        new_scheme,
        new_algorithm,
        session.decision,
        row_ids=session.sample_rows,
    )
    session.algorithm = new_algorithm
    session.bin_count = new_bin_count
    session.scheme = new_scheme
    session.explanations = explanations
    session._by_row = {e.row_id: e for e in explanations}
    session.fingerprint = new_fingerprint
    rate = session.success_rate()
    return {
        "regenerated": True,
        "fingerprint": new_fingerprint,
        "previous_fingerprint": previous_fingerprint,
        "success_rate": rate,
        "previous_success_rate": previous_rate,
        "success_rate_delta": rate - previous_rate,
    }


def _predictor_doc(predictor: Predictor) -> dict:
    if isinstance(predictor, LinearPredictor):
        return {
            "kind": "linear",
            "name": predictor.name,
            "intercept": predictor.intercept,
            "weights": [float(w) for w in predictor.weights],
        }
    if isinstance(predictor, RemotePredictor):
        return {"kind": "remote", "name": predictor.name, "endpoint": predictor.endpoint}
    raise InvalidModel(f"cannot persist predictor of type {type(predictor).__name__}")


def session_to_doc(session: Session) -> dict:
    return {
        "session_id": session.session_id,
        "dataset": {
            "path": session.dataset_path,
            "sha256": session.dataset_sha256,
            "rows": len(session.dataset),
        },
        "schema_spec": session.schema_spec,
        "model_spec": session.model_spec,
        "decision": {"threshold": session.decision.threshold},
        "bin_count": session.bin_count,
        "algorithm": session.algorithm.to_json_dict(),
        "sample": {
            "cap": session.sample_cap,
            "seed": session.sample_seed,
            "rows": session.sample_rows,
        },
        "predictor": _predictor_doc(session.predictor),
        "probabilities": [float(p) for p in session.cache.probabilities],
        "scheme": session.scheme.to_json_dict(),
        "fingerprint": session.fingerprint,
        "filters": {name: fs.to_json_dict() for name, fs in session.filters.items()},
        "explanations": [e.to_json_dict() for e in session.explanations],
    }


def save_session(session: Session, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{session.session_id}.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(session_to_doc(session), fh, sort_keys=True, separators=(",", ":"))
    return path


def load_session(path: str | Path) -> Session:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    dataset_path = doc["dataset"]["path"]
    actual_hash = _file_sha256(dataset_path)
    if actual_hash != doc["dataset"]["sha256"]:
        raise DatasetMismatch(
            f"{dataset_path}: content hash changed since the session was saved"
        )
    dataset = load_csv(dataset_path, doc["schema_spec"])
    decision = DecisionConfig(threshold=float(doc["decision"]["threshold"]))
    predictor_doc = doc["predictor"]
    if predictor_doc["kind"] == "linear":
        predictor: Predictor = LinearPredictor(
            dataset.schema,
            float(predictor_doc["intercept"]),
            predictor_doc["weights"],
            name=predictor_doc.get("name", "linear"),
        )
    else:
        predictor = RemotePredictor(predictor_doc["endpoint"])
    cache = cache_from_probabilities(
        dataset, np.asarray(doc["probabilities"], dtype=np.float64), decision
    )
    sample = doc.get("sample", {})
    return Session(
        session_id=doc["session_id"],
        dataset_path=dataset_path,
        dataset_sha256=actual_hash,
        schema_spec=doc["schema_spec"],
        model_spec=doc["model_spec"],
        dataset=dataset,
        predictor=predictor,
        decision=decision,
        bin_count=int(doc["bin_count"]),
        scheme=DiscretizationScheme.from_json_dict(doc["scheme"]),
        algorithm=AlgorithmConfig.from_json_dict(doc["algorithm"]),
        cache=cache,
        filters={
            name: FilterSet.from_json_dict(fs) for name, fs in doc["filters"].items()
        },
        explanations=[
            CounterfactualExplanation.from_json_dict(e) for e in doc["explanations"]
        ],
        fingerprint=doc["fingerprint"],
        sample_cap=sample.get("cap"),
        sample_seed=int(sample.get("seed", 0)),
        sample_rows=sample.get("rows"),
    )
