"""Greedy counterfactual search over binned feature moves.

For one instance, the search repeatedly scores every legal single move —
shifting a continuous feature one bin up or down, or switching a categorical
feature to another category — and takes the move that pushes the predicted
probability furthest toward the opposite class. It stops the moment the
decision flips, or when no move helps, no move is legal, or the step cap is
hit. Two constraints shape the candidate set: at most ``max_changed_features``
features may differ from the original instance at any point, and no continuous
feature may sit more than ``max_bin_shift`` bins away from its original bin.

Deterministic throughout: candidates are generated in a canonical order
(feature index ascending; for continuous features the downward move before the
upward one; for categorical features ascending category ordinal) and ties on
the score are resolved by taking the first candidate, so identical inputs
always yield identical explanations.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .data import Dataset, Instance
from .discretize import (
    CategoryCoding,
    ContinuousBinning,
    DiscretizationScheme,
    bin_of,
    representative_value,
)
from .predict import DecisionConfig, Predictor

STOP_NO_IMPROVEMENT = "no_improvement"
STOP_EXHAUSTED = "exhausted"
STOP_STEP_CAP = "step_cap"


@dataclass(frozen=True)
class AlgorithmConfig:
    """Search constraints.

    max_changed_features: cap on features differing from the original instance.
    max_bin_shift: cap on cumulative bin displacement per continuous feature,
        measured against the original bin (not per step).
    locked_features: feature indices the search must never touch.
    max_steps: safety cap on accepted steps; defaults to
        max_changed_features * max_bin_shift + (number of categorical features).
    """

    max_changed_features: int = 5
    max_bin_shift: int = 4
    locked_features: frozenset[int] = frozenset()
    max_steps: int | None = None

    def __post_init__(self) -> None:
        if self.max_changed_features < 1:
            raise ValueError("max_changed_features must be >= 1")
        if self.max_bin_shift < 1:
            raise ValueError("max_bin_shift must be >= 1")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be >= 1 when given")
        object.__setattr__(self, "locked_features", frozenset(self.locked_features))

    def resolved_max_steps(self, scheme: DiscretizationScheme) -> int:
        if self.max_steps is not None:
            return self.max_steps
        n_categorical = sum(isinstance(f, CategoryCoding) for f in scheme.features)
        return self.max_changed_features * self.max_bin_shift + n_categorical

    def to_json_dict(self) -> dict:
        return {
            "max_changed_features": self.max_changed_features,
            "max_bin_shift": self.max_bin_shift,
            "locked_features": sorted(self.locked_features),
            "max_steps": self.max_steps,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "AlgorithmConfig":
        return cls(
            max_changed_features=int(doc["max_changed_features"]),
            max_bin_shift=int(doc["max_bin_shift"]),
            locked_features=frozenset(int(i) for i in doc.get("locked_features", [])),
            max_steps=doc.get("max_steps"),
        )


@dataclass(frozen=True)
class CandidateMove:
    """A single legal move: one bin shift or one category switch."""

    feature: int
    to_bin: int | None = None
    to_category: str | None = None


@dataclass(frozen=True)
class FeatureChange:
    """Net difference of one feature between original and current state."""

    feature: int
    from_bin: int | None = None
    to_bin: int | None = None
    from_value: float | None = None
    to_value: float | None = None
    from_category: str | None = None
    to_category: str | None = None

    @property
    def is_categorical(self) -> bool:
        return self.from_category is not None

    @property
    def source(self):
        return self.from_category if self.is_categorical else self.from_bin

    @property
    def target(self):
        return self.to_category if self.is_categorical else self.to_bin

    def to_json_dict(self) -> dict:
        if self.is_categorical:
            return {
                "feature": self.feature,
                "from_category": self.from_category,
                "to_category": self.to_category,
            }
        return {
            "feature": self.feature,
            "from_bin": self.from_bin,
            "to_bin": self.to_bin,
            "from_value": self.from_value,
            "to_value": self.to_value,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "FeatureChange":
        if "from_category" in doc:
            return cls(
                feature=int(doc["feature"]),
                from_category=doc["from_category"],
                to_category=doc["to_category"],
            )
        return cls(
            feature=int(doc["feature"]),
            from_bin=int(doc["from_bin"]),
            to_bin=int(doc["to_bin"]),
            from_value=float(doc["from_value"]),
            to_value=float(doc["to_value"]),
        )


@dataclass(frozen=True)
class TraceStep:
    step: int
    change: FeatureChange
    improvement: float
    prob_after: float

    def to_json_dict(self) -> dict:
        doc = {"step": self.step}
        doc.update(self.change.to_json_dict())
        doc["improvement"] = self.improvement
        doc["prob_after"] = self.prob_after
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "TraceStep":
        return cls(
            step=int(doc["step"]),
            change=FeatureChange.from_json_dict(doc),
            improvement=float(doc["improvement"]),
            prob_after=float(doc["prob_after"]),
        )


@dataclass
class CounterfactualExplanation:
    row_id: int
    original_prob: float
    original_decision: int
    success: bool
    stop_reason: str | None
    changes: list[FeatureChange]
    trace: list[TraceStep]
    final_prob: float
    fingerprint: str

    def to_json_dict(self) -> dict:
        return {
            "row_id": self.row_id,
            "success": self.success,
            "stop_reason": self.stop_reason,
            "original_prob": self.original_prob,
            "original_decision": self.original_decision,
            "final_prob": self.final_prob,
            "fingerprint": self.fingerprint,
            "changes": [c.to_json_dict() for c in self.changes],
            "trace": [t.to_json_dict() for t in self.trace],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "CounterfactualExplanation":
        return cls(
            row_id=int(doc["row_id"]),
            original_prob=float(doc["original_prob"]),
            original_decision=int(doc["original_decision"]),
            success=bool(doc["success"]),
            stop_reason=doc["stop_reason"],
            changes=[FeatureChange.from_json_dict(c) for c in doc["changes"]],
            trace=[TraceStep.from_json_dict(t) for t in doc["trace"]],
            final_prob=float(doc["final_prob"]),
            fingerprint=doc["fingerprint"],
        )


def scheme_fingerprint(
    scheme: DiscretizationScheme, config: AlgorithmConfig, decision: DecisionConfig
) -> str:
    """Hash identifying the binning + constraints + threshold explanations were
    generated under; aggregation refuses to mix fingerprints."""
    payload = json.dumps(
        {
            "scheme": scheme.to_json_dict(),
            "algorithm": config.to_json_dict(),
            "threshold": decision.threshold,
        },
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


class _SearchState:
    """Mutable per-row search state; bins tracked incrementally."""

    __slots__ = ("original", "current", "orig_bins", "cur_bins", "changed")

    def __init__(self, values: Sequence, scheme: DiscretizationScheme) -> None:
        self.original = list(values)
        self.current = list(values)
        self.orig_bins: list[int | None] = []
        for f, entry in enumerate(scheme.features):
            if isinstance(entry, ContinuousBinning) and entry.binnable:
                self.orig_bins.append(bin_of(values[f], f, scheme))
            else:
                self.orig_bins.append(None)
        self.cur_bins = list(self.orig_bins)
        self.changed: set[int] = set()


def _enumerate(
    state: _SearchState, scheme: DiscretizationScheme, config: AlgorithmConfig
) -> list[CandidateMove]:
    moves: list[CandidateMove] = []
    allow_new = len(state.changed) < config.max_changed_features
    for f, entry in enumerate(scheme.features):
        if f in config.locked_features:
            continue
        if isinstance(entry, ContinuousBinning):
            if not entry.binnable:
                continue
            if f not in state.changed and not allow_new:
                continue
            cur = state.cur_bins[f]
            orig = state.orig_bins[f]
            for to_bin in (cur - 1, cur + 1):  # downward move first
                if to_bin < 0 or to_bin >= scheme.bin_count:
                    continue
                if abs(to_bin - orig) > config.max_bin_shift:
                    continue
                moves.append(CandidateMove(f, to_bin=to_bin))
        else:
            # categorical features move once, from the original category only
            if f in state.changed or not allow_new:
                continue
            original = state.original[f]
            for category in entry.categories:
                if category != original:
                    moves.append(CandidateMove(f, to_category=category))
    return moves


def enumerate_candidates(
    current: Sequence,
    original: Sequence,
    scheme: DiscretizationScheme,
    config: AlgorithmConfig,
) -> list[CandidateMove]:
    """Legal moves from an arbitrary (current, original) state pair, in the
    canonical tie-breaking order."""
    state = _SearchState(original, scheme)
    for f in range(len(scheme.features)):
        if current[f] != original[f]:
            state.changed.add(f)
            state.current[f] = current[f]
            if state.orig_bins[f] is not None:
                state.cur_bins[f] = bin_of(current[f], f, scheme)
    return _enumerate(state, scheme, config)


def _applied_value(state: _SearchState, move: CandidateMove, scheme: DiscretizationScheme):
    if move.to_category is not None:
        return move.to_category
    # landing back on the original bin restores the exact original value,
    # which removes the feature from the changed count
    if move.to_bin == state.orig_bins[move.feature]:
        return state.original[move.feature]
    return representative_value(move.to_bin, move.feature, scheme)


def _apply(state: _SearchState, move: CandidateMove, value) -> FeatureChange:
    f = move.feature
    if move.to_category is not None:
        change = FeatureChange(
            feature=f, from_category=state.current[f], to_category=move.to_category
        )
    else:
        change = FeatureChange(
            feature=f,
            from_bin=state.cur_bins[f],
            to_bin=move.to_bin,
            from_value=state.current[f],
            to_value=value,
        )
        state.cur_bins[f] = move.to_bin
    state.current[f] = value
    if state.current[f] == state.original[f]:
        state.changed.discard(f)
    else:
        state.changed.add(f)
    return change


def _net_changes(state: _SearchState, scheme: DiscretizationScheme) -> list[FeatureChange]:
    changes: list[FeatureChange] = []
    for f in sorted(state.changed):
        if isinstance(scheme.features[f], ContinuousBinning):
            changes.append(
                FeatureChange(
                    feature=f,
                    from_bin=state.orig_bins[f],
                    to_bin=state.cur_bins[f],
                    from_value=state.original[f],
                    to_value=state.current[f],
                )
            )
        else:
            changes.append(
                FeatureChange(
                    feature=f,
                    from_category=state.original[f],
                    to_category=state.current[f],
                )
            )
    return changes


def generate_counterfactual(
    instance: Instance,
    predictor: Predictor,
    scheme: DiscretizationScheme,
    config: AlgorithmConfig,
    decision: DecisionConfig = DecisionConfig(),
    fingerprint: str | None = None,
) -> CounterfactualExplanation:
    """Run the greedy search for one instance.

    Each step scores all candidates in one predictor batch call. The score of
    a candidate is the probability shift toward the opposite class relative to
    the current state: p_current - p_candidate when the original decision is
    positive, p_candidate - p_current when negative. Only strictly positive
    shifts are accepted, so the trace is monotone and cannot cycle.

    Failure is a valid result: success=False with a stop reason recorded. A
    failed search produced no counterfactual, so its explanation carries an
    empty change list and final_prob equal to original_prob; the attempted
    steps stay in the trace. Applying `changes` to the original instance and
    re-scoring therefore reproduces final_prob in every case.
    """
    fp = fingerprint if fingerprint is not None else scheme_fingerprint(scheme, config, decision)
    state = _SearchState(instance.values, scheme)
    original_prob = predictor.predict_proba(state.original)
    original_decision = decision.decide(original_prob)

    trace: list[TraceStep] = []
    prob = original_prob
    success = False
    stop_reason: str | None = STOP_STEP_CAP
    for step in range(1, config.resolved_max_steps(scheme) + 1):
        candidates = _enumerate(state, scheme, config)
        if not candidates:
            stop_reason = STOP_EXHAUSTED
            break
        rows = []
        values = []
        for move in candidates:
            value = _applied_value(state, move, scheme)
            row = state.current.copy()
            row[move.feature] = value
            rows.append(row)
            values.append(value)
        probs = predictor.predict_proba_batch(rows)
        improvements = prob - probs if original_decision == 1 else probs - prob
        best = int(np.argmax(improvements))  # first max wins: canonical order breaks ties
        if improvements[best] <= 0.0:
            stop_reason = STOP_NO_IMPROVEMENT
            break
        change = _apply(state, candidates[best], values[best])
        prob = float(probs[best])
        trace.append(TraceStep(step, change, float(improvements[best]), prob))
        if decision.decide(prob) != original_decision:
            success = True
            stop_reason = None
            break

    return CounterfactualExplanation(
        row_id=instance.row_id,
        original_prob=float(original_prob),
        original_decision=original_decision,
        success=success,
        stop_reason=stop_reason,
        changes=_net_changes(state, scheme) if success else [],
        trace=trace,
        final_prob=float(prob) if success else float(original_prob),
        fingerprint=fp,
    )


def generate_batch(
    dataset: Dataset,
    predictor: Predictor,
    scheme: DiscretizationScheme,
    config: AlgorithmConfig,
    decision: DecisionConfig = DecisionConfig(),
    row_ids: Sequence[int] | None = None,
) -> list[CounterfactualExplanation]:
    """One explanation per requested row (all rows when row_ids is None),
    order-aligned with the request and identical to row-by-row generation."""
    fp = scheme_fingerprint(scheme, config, decision)
    if row_ids is None:
        rows: Iterable[Instance] = dataset.rows
    else:
        rows = [dataset.rows[i] for i in row_ids]
    return [
        generate_counterfactual(row, predictor, scheme, config, decision, fingerprint=fp)
        for row in rows
    ]


def apply_changes(values: Sequence, changes: Iterable[FeatureChange]) -> list:
    """Apply a net change set to an original value vector."""
    out = list(values)
    for change in changes:
        out[change.feature] = (
            change.to_category if change.is_categorical else change.to_value
        )
    return out


def write_jsonl(explanations: Iterable[CounterfactualExplanation], target: str | Path | IO) -> None:
    """Export one JSON object per row; key order is fixed, so identical inputs
    produce byte-identical files."""
    if hasattr(target, "write"):
        for expl in explanations:
            target.write(json.dumps(expl.to_json_dict()) + "\n")
        return
    with open(target, "w", encoding="utf-8") as fh:
        for expl in explanations:
            fh.write(json.dumps(expl.to_json_dict()) + "\n")


def read_jsonl(path: str | Path) -> list[CounterfactualExplanation]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(CounterfactualExplanation.from_json_dict(json.loads(line)))
    return out
