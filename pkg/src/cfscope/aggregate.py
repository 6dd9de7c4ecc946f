"""Collapses per-instance counterfactuals into per-feature transition counts.

A transition is one feature's net move (from bin -> to bin, or from category
-> to category) inside a successful explanation. Transitions are partitioned
by the instance's original predicted class so the two arrow directions can be
compared. Each transition cell keeps the contributing row ids so a single
arrow can be joined back to complete explanations for hover highlighting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .data import Dataset
from .engine import CounterfactualExplanation
from .errors import MixedScheme, UnknownRow

TransitionKey = tuple
Transitions = dict[int, dict[TransitionKey, "TransitionCell"]]


@dataclass
class TransitionCell:
    count: int = 0
    explanation_ids: list[int] = field(default_factory=list)


@dataclass
class TransitionAggregate:
    fingerprint: str
    positive_origin: Transitions
    negative_origin: Transitions
    failed_ids: list[int]

    def partition(self, origin: int) -> Transitions:
        return self.positive_origin if origin == 1 else self.negative_origin

    def feature_total(self, feature: int) -> int:
        total = 0
        for partition in (self.positive_origin, self.negative_origin):
            for cell in partition.get(feature, {}).values():
                total += cell.count
        return total


def aggregate_transitions(
    explanations: Sequence[CounterfactualExplanation],
) -> TransitionAggregate:
    """Fold explanations into transition counts; failures contribute nothing
    to the counts but are tallied separately."""
    fingerprint = explanations[0].fingerprint if explanations else ""
    positive: Transitions = {}
    negative: Transitions = {}
    failed: list[int] = []
    for expl in explanations:
        if expl.fingerprint != fingerprint:
            raise MixedScheme(
                f"explanation {expl.row_id} has fingerprint {expl.fingerprint}, "
                f"expected {fingerprint}"
            )
        if not expl.success:
            failed.append(expl.row_id)
            continue
        partition = positive if expl.original_decision == 1 else negative
        for change in expl.changes:
            cells = partition.setdefault(change.feature, {})
            cell = cells.setdefault((change.source, change.target), TransitionCell())
            cell.count += 1
            cell.explanation_ids.append(expl.row_id)
    return TransitionAggregate(
        fingerprint=fingerprint,
        positive_origin=positive,
        negative_origin=negative,
        failed_ids=failed,
    )


def explanation_detail(
    row_id: int, explanations: Iterable[CounterfactualExplanation]
) -> CounterfactualExplanation:
    """The full change set and trace for one row."""
    for expl in explanations:
        if expl.row_id == row_id:
            return expl
    raise UnknownRow(f"no explanation for row {row_id}")


def opposition_report(
    positive: Transitions, negative: Transitions
) -> dict[int, dict[str, float | None]]:
    """Per feature, the fraction of each partition's transition mass whose
    exact reverse (target, source) appears in the other partition. None when
    a partition carries no mass for the feature."""

    def mirrored_fraction(own: dict, other: dict) -> float | None:
        mass = sum(cell.count for cell in own.values())
        if mass == 0:
            return None
        mirrored = sum(
            cell.count for (src, dst), cell in own.items() if (dst, src) in other
        )
        return mirrored / mass

    report: dict[int, dict[str, float | None]] = {}
    for feature in sorted(set(positive) | set(negative)):
        own_pos = positive.get(feature, {})
        own_neg = negative.get(feature, {})
        report[feature] = {
            "positive_mirrored": mirrored_fraction(own_pos, own_neg),
            "negative_mirrored": mirrored_fraction(own_neg, own_pos),
        }
    return report


def _transitions_to_json(partition: Transitions, dataset: Dataset) -> dict:
    out: dict[str, dict] = {}
    for feature in sorted(partition):
        name = dataset.schema[feature].name
        cells = {}
        for (src, dst), cell in sorted(partition[feature].items(), key=lambda kv: str(kv[0])):
            cells[f"{src}->{dst}"] = {"count": cell.count, "ids": list(cell.explanation_ids)}
        out[name] = cells
    return out


def aggregate_to_json_dict(aggregate: TransitionAggregate, dataset: Dataset) -> dict:
    return {
        "fingerprint": aggregate.fingerprint,
        "positive_origin": _transitions_to_json(aggregate.positive_origin, dataset),
        "negative_origin": _transitions_to_json(aggregate.negative_origin, dataset),
        "failed_ids": list(aggregate.failed_ids),
    }
