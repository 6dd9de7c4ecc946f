"""Shared Gaussian binning: the coordinate system used by both search and histograms.

Each continuous feature gets ``bin_count`` bins: the inner ``bin_count - 2``
bins split [mean - 2*std, mean + 2*std] into equal widths, and the two extreme
bins catch everything beyond. Bin membership is left-closed/right-open, with
``mean + 2*std`` itself belonging to the extreme high bin. Constant columns
(std == 0) are kept in the scheme but flagged unbinnable.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .data import CATEGORICAL, CONTINUOUS, Dataset
from .errors import UnbinnableFeature

DEFAULT_BIN_COUNT = 10


@dataclass(frozen=True)
class ContinuousBinning:
    mean: float
    std: float
    bin_count: int
    inner_edges: tuple[float, ...]  # length bin_count - 1; empty when std == 0

    @property
    def binnable(self) -> bool:
        return self.std > 0.0

    @property
    def inner_width(self) -> float:
        return 4.0 * self.std / (self.bin_count - 2)


@dataclass(frozen=True)
class CategoryCoding:
    categories: tuple[str, ...]

    def ordinal(self, label: str) -> int:
        try:
            return self.categories.index(label)
        except ValueError:
            raise ValueError(f"unknown category {label!r}") from None


FeatureScheme = Union[ContinuousBinning, CategoryCoding]


@dataclass(frozen=True)
class DiscretizationScheme:
    bin_count: int
    features: tuple[FeatureScheme, ...]

    def is_continuous(self, feature: int) -> bool:
        return isinstance(self.features[feature], ContinuousBinning)

    def binning(self, feature: int) -> ContinuousBinning:
        entry = self.features[feature]
        if not isinstance(entry, ContinuousBinning):
            raise ValueError(f"feature {feature} is categorical, not binned")
        return entry

    def coding(self, feature: int) -> CategoryCoding:
        entry = self.features[feature]
        if not isinstance(entry, CategoryCoding):
            raise ValueError(f"feature {feature} is continuous, not categorical")
        return entry

    def to_json_dict(self) -> dict:
        features = []
        for entry in self.features:
            if isinstance(entry, ContinuousBinning):
                features.append(
                    {
                        "kind": CONTINUOUS,
                        "mean": entry.mean,
                        "std": entry.std,
                        "inner_edges": list(entry.inner_edges),
                    }
                )
            else:
                features.append({"kind": CATEGORICAL, "categories": list(entry.categories)})
        return {"bin_count": self.bin_count, "features": features}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "DiscretizationScheme":
        n = int(doc["bin_count"])
        features: list[FeatureScheme] = []
        for entry in doc["features"]:
            if entry["kind"] == CONTINUOUS:
                features.append(
                    ContinuousBinning(
                        mean=float(entry["mean"]),
                        std=float(entry["std"]),
                        bin_count=n,
                        inner_edges=tuple(float(e) for e in entry["inner_edges"]),
                    )
                )
            else:
                features.append(CategoryCoding(categories=tuple(entry["categories"])))
        return cls(bin_count=n, features=tuple(features))


def _edges(mean: float, std: float, bin_count: int) -> tuple[float, ...]:
    width = 4.0 * std / (bin_count - 2)
    edges = [mean - 2.0 * std + i * width for i in range(bin_count - 1)]
    edges[-1] = mean + 2.0 * std  # pin the top edge exactly
    for a, b in zip(edges, edges[1:]):
        if not a < b:
            raise UnbinnableFeature(f"degenerate edges around mean={mean}, std={std}")
    return tuple(edges)


def fit_discretizer(dataset: Dataset, bin_count: int = DEFAULT_BIN_COUNT) -> DiscretizationScheme:
    """Fit per-feature moments on the full dataset and derive bin edges.

    Uses the population standard deviation (divisor N) for determinism.
    """
    if bin_count < 4:
        raise ValueError("bin_count must be at least 4")
    if len(dataset) == 0:
        raise ValueError("cannot fit on an empty dataset")
    features: list[FeatureScheme] = []
    for i, feature in enumerate(dataset.schema):
        if feature.is_continuous:
            column = dataset.column_array(i)
            mean = float(column.mean())
            std = float(column.std())
            if std == 0.0:
                features.append(ContinuousBinning(mean, 0.0, bin_count, ()))
            else:
                features.append(
                    ContinuousBinning(mean, std, bin_count, _edges(mean, std, bin_count))
                )
        else:
            assert feature.categories is not None
            features.append(CategoryCoding(categories=feature.categories))
    return DiscretizationScheme(bin_count=bin_count, features=tuple(features))


def bin_of(value: float, feature: int, scheme: DiscretizationScheme) -> int:
    """Bin index of a continuous value: count of inner edges <= value."""
    binning = scheme.binning(feature)
    if not binning.binnable:
        raise UnbinnableFeature(f"feature {feature} has zero variance")
    return bisect_right(binning.inner_edges, value)


def representative_value(bin_index: int, feature: int, scheme: DiscretizationScheme) -> float:
    """Deterministic numeric stand-in for a bin: inner midpoint, or half a width
    beyond the boundary edge for the two extreme bins."""
    binning = scheme.binning(feature)
    if not binning.binnable:
        raise UnbinnableFeature(f"feature {feature} has zero variance")
    n = binning.bin_count
    if not 0 <= bin_index < n:
        raise ValueError(f"bin index {bin_index} out of range 0..{n - 1}")
    edges = binning.inner_edges
    half = binning.inner_width / 2.0
    if bin_index == 0:
        return edges[0] - half
    if bin_index == n - 1:
        return edges[-1] + half
    return (edges[bin_index - 1] + edges[bin_index]) / 2.0


def histogram(
    values: Sequence, feature: int, scheme: DiscretizationScheme
) -> list[int]:
    """Counts per bin (continuous) or per category ordinal (categorical).

    Bin assignment is identical to bin_of; counts always sum to len(values).
    """
    entry = scheme.features[feature]
    if isinstance(entry, ContinuousBinning):
        if not entry.binnable:
            raise UnbinnableFeature(f"feature {feature} has zero variance")
        arr = np.asarray(values, dtype=np.float64)
        edges = np.asarray(entry.inner_edges, dtype=np.float64)
        idx = np.searchsorted(edges, arr, side="right")
        counts = np.bincount(idx, minlength=entry.bin_count)
        return [int(c) for c in counts]
    counts = [0] * len(entry.categories)
    for v in values:
        counts[entry.ordinal(v)] += 1
    return counts
