"""Filter sets, cohort membership, per-feature summaries, and feature ordering."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .data import Dataset, Instance
from .discretize import ContinuousBinning, DiscretizationScheme, bin_of, histogram
from .predict import CELLS, PredictionCache

SORT_MEDIAN_DIFFERENCE = "median_difference"
SORT_COUNTERFACTUAL_COUNT = "counterfactual_count"
SORT_SCHEMA_ORDER = "schema_order"
SORT_KEYS = (SORT_MEDIAN_DIFFERENCE, SORT_COUNTERFACTUAL_COUNT, SORT_SCHEMA_ORDER)


@dataclass(frozen=True)
class FeatureRange:
    """One range clause: a closed numeric interval or an allowed category set."""

    feature: int
    low: float | None = None
    high: float | None = None
    categories: frozenset[str] | None = None

    def __post_init__(self) -> None:
        numeric = self.low is not None or self.high is not None
        if numeric == (self.categories is not None):
            raise ValueError("a range clause is either numeric or categorical, not both")
        if numeric:
            if self.low is None or self.high is None:
                raise ValueError("numeric range needs both low and high")
            if self.low > self.high:
                raise ValueError("numeric range needs low <= high")
        elif not self.categories:
            raise ValueError("categorical range needs at least one allowed category")

    def to_json_dict(self) -> dict:
        if self.categories is not None:
            return {"feature": self.feature, "categories": sorted(self.categories)}
        return {"feature": self.feature, "low": self.low, "high": self.high}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "FeatureRange":
        if "categories" in doc:
            return cls(feature=int(doc["feature"]), categories=frozenset(doc["categories"]))
        return cls(feature=int(doc["feature"]), low=float(doc["low"]), high=float(doc["high"]))


@dataclass(frozen=True)
class FilterSet:
    """Conjunction of a confidence interval, confusion-cell selection, and
    feature-range clauses. Empty cell set means all cells."""

    confidence_low: float = 0.0
    confidence_high: float = 1.0
    cells: frozenset[str] = frozenset()
    ranges: tuple[FeatureRange, ...] = ()
    hidden: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence_low <= self.confidence_high <= 1.0:
            raise ValueError("confidence interval must satisfy 0 <= low <= high <= 1")
        bad = set(self.cells) - set(CELLS)
        if bad:
            raise ValueError(f"unknown confusion cells {sorted(bad)}")
        object.__setattr__(self, "cells", frozenset(self.cells))
        object.__setattr__(self, "ranges", tuple(self.ranges))

    def to_json_dict(self) -> dict:
        return {
            "confidence": [self.confidence_low, self.confidence_high],
            "cells": sorted(self.cells),
            "ranges": [r.to_json_dict() for r in self.ranges],
            "hidden": self.hidden,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "FilterSet":
        low, high = doc.get("confidence", [0.0, 1.0])
        return cls(
            confidence_low=float(low),
            confidence_high=float(high),
            cells=frozenset(doc.get("cells", [])),
            ranges=tuple(FeatureRange.from_json_dict(r) for r in doc.get("ranges", [])),
            hidden=bool(doc.get("hidden", False)),
        )


def apply_filterset(
    dataset: Dataset, cache: PredictionCache, filterset: FilterSet
) -> list[int]:
    """Row ids satisfying every clause, ascending. Empty result is valid."""
    mask = (cache.probabilities >= filterset.confidence_low) & (
        cache.probabilities <= filterset.confidence_high
    )
    if filterset.cells:
        mask &= np.isin(cache.cells, sorted(filterset.cells))
    for clause in filterset.ranges:
        column = dataset.column_array(clause.feature)
        if clause.categories is not None:
            mask &= np.isin(column, sorted(clause.categories))
        else:
            mask &= (column >= clause.low) & (column <= clause.high)
    return [int(i) for i in np.nonzero(mask)[0]]


@dataclass(frozen=True)
class ContinuousSummary:
    median: float | None
    median_bin: int | None
    histogram: tuple[int, ...] | None  # None when the feature is unbinnable

    def to_json_dict(self) -> dict:
        return {
            "kind": "continuous",
            "median": self.median,
            "median_bin": self.median_bin,
            "histogram": list(self.histogram) if self.histogram is not None else None,
        }


@dataclass(frozen=True)
class CategoricalSummary:
    mode: str | None
    counts: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {"kind": "categorical", "mode": self.mode, "counts": list(self.counts)}


FeatureSummary = Union[ContinuousSummary, CategoricalSummary]


@dataclass(frozen=True)
class CohortSummary:
    size: int
    features: tuple[FeatureSummary, ...]

    def to_json_dict(self) -> dict:
        return {"size": self.size, "features": [f.to_json_dict() for f in self.features]}


def _lower_median(values: np.ndarray) -> float:
    # even-sized cohorts take the lower central value, keeping the median an
    # actual data point so its bin is well defined
    k = len(values)
    idx = (k - 1) // 2
    return float(np.partition(values, idx)[idx])


def summarize_cohort(
    row_ids: Sequence[int], dataset: Dataset, scheme: DiscretizationScheme
) -> CohortSummary:
    """Per-feature medians/modes and scheme-aligned histograms for a cohort.

    An empty cohort is a value, not an error: size 0 with empty statistics.
    """
    ids = np.asarray(row_ids, dtype=np.int64)
    size = len(ids)
    summaries: list[FeatureSummary] = []
    for f, entry in enumerate(scheme.features):
        if isinstance(entry, ContinuousBinning):
            if size == 0:
                hist = tuple([0] * scheme.bin_count) if entry.binnable else None
                summaries.append(ContinuousSummary(None, None, hist))
                continue
            values = dataset.column_array(f)[ids]
            median = _lower_median(values)
            if entry.binnable:
                summaries.append(
                    ContinuousSummary(
                        median=median,
                        median_bin=bin_of(median, f, scheme),
                        histogram=tuple(histogram(values, f, scheme)),
                    )
                )
            else:
                summaries.append(ContinuousSummary(median=median, median_bin=None, histogram=None))
        else:
            counts = [0] * len(entry.categories)
            if size:
                for v in dataset.column_array(f)[ids]:
                    counts[entry.ordinal(v)] += 1
                mode = entry.categories[int(np.argmax(counts))]  # tie: lowest ordinal
            else:
                mode = None
            summaries.append(CategoricalSummary(mode=mode, counts=tuple(counts)))
    return CohortSummary(size=size, features=tuple(summaries))


def sort_features(
    summary_a: CohortSummary,
    summary_b: CohortSummary,
    aggregates: Sequence | None,
    key: str,
    scheme: DiscretizationScheme,
) -> list[int]:
    """Feature ordering for the comparison view.

    median_difference: |median_A - median_B| normalized by the feature's inner
    span (4 * std), descending. counterfactual_count: total transition count
    across the given aggregates, descending. schema_order: as declared.
    Continuous features always precede categorical; remaining ties break by
    schema order.
    """
    if key not in SORT_KEYS:
        raise ValueError(f"unknown sort key {key!r}")
    n_features = len(scheme.features)

    def score(f: int) -> float:
        if key == SORT_SCHEMA_ORDER:
            return 0.0
        if key == SORT_COUNTERFACTUAL_COUNT:
            total = 0
            for agg in aggregates or ():
                total += agg.feature_total(f)
            return float(total)
        entry = scheme.features[f]
        if not isinstance(entry, ContinuousBinning) or not entry.binnable:
            return 0.0
        ma = summary_a.features[f].median
        mb = summary_b.features[f].median
        if ma is None or mb is None:
            return 0.0
        return abs(ma - mb) / (4.0 * entry.std)

    def kind_rank(f: int) -> int:
        return 0 if isinstance(scheme.features[f], ContinuousBinning) else 1

    return sorted(range(n_features), key=lambda f: (kind_rank(f), -score(f), f))


def bin_slice(
    row_ids: Sequence[int],
    dataset: Dataset,
    scheme: DiscretizationScheme,
    feature: int,
    bin_index: int,
) -> list[Instance]:
    """Cohort rows whose feature value falls in the given bin (or category
    ordinal), each with its complete value vector for multi-axis display."""
    entry = scheme.features[feature]
    if isinstance(entry, ContinuousBinning):
        members = [
            i for i in row_ids if bin_of(dataset.rows[i].values[feature], feature, scheme) == bin_index
        ]
    else:
        label = entry.categories[bin_index]
        members = [i for i in row_ids if dataset.rows[i].values[feature] == label]
    return [dataset.rows[i] for i in members]
