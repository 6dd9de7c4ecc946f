"""Dataset schema, CSV ingestion, and row storage for binary-labeled tabular data."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import (
    EmptyDataset,
    InvalidLabel,
    InvalidSchema,
    MissingColumn,
    MissingValue,
    NonNumericContinuous,
    UnknownCategory,
)

CONTINUOUS = "continuous"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class FeatureSchema:
    """One feature: its name, kind, and (categorical only) ordered category labels."""

    name: str
    kind: str
    categories: tuple[str, ...] | None = None
    display_unit: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in (CONTINUOUS, CATEGORICAL):
            raise InvalidSchema(f"feature {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == CONTINUOUS and self.categories is not None:
            raise InvalidSchema(f"continuous feature {self.name!r} must not list categories")
        if self.kind == CATEGORICAL:
            if self.categories is None or len(self.categories) < 2:
                raise InvalidSchema(
                    f"categorical feature {self.name!r} needs at least 2 categories"
                )
            if len(set(self.categories)) != len(self.categories):
                raise InvalidSchema(f"feature {self.name!r} has duplicate categories")

    @property
    def is_continuous(self) -> bool:
        return self.kind == CONTINUOUS


@dataclass(frozen=True)
class Instance:
    """A single row: values in schema order plus a stable 0-based row id."""

    row_id: int
    values: tuple


@dataclass
class Dataset:
    """Immutable after ingestion; column arrays are precomputed for fast filtering."""

    schema: list[FeatureSchema]
    rows: list[Instance]
    labels: list[int]
    positive_label_name: str
    negative_label_name: str
    label_column: str
    source_path: str | None = None
    _columns: dict[int, np.ndarray] = field(default_factory=dict, repr=False)
    _label_array: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        names = [f.name for f in self.schema]
        if len(set(names)) != len(names):
            raise InvalidSchema("duplicate feature names in schema")
        if len(self.rows) != len(self.labels):
            raise InvalidSchema("row/label count mismatch")
        for feature_index, feature in enumerate(self.schema):
            values = [row.values[feature_index] for row in self.rows]
            if feature.is_continuous:
                self._columns[feature_index] = np.asarray(values, dtype=np.float64)
            else:
                self._columns[feature_index] = np.asarray(values, dtype=object)
        self._label_array = np.asarray(self.labels, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.rows)

    def feature_index(self, name: str) -> int:
        for i, feature in enumerate(self.schema):
            if feature.name == name:
                return i
        raise KeyError(name)

    def column(self, feature_index: int) -> list:
        return list(self._columns[feature_index])

    def column_array(self, feature_index: int) -> np.ndarray:
        return self._columns[feature_index]

    @property
    def label_array(self) -> np.ndarray:
        assert self._label_array is not None
        return self._label_array


def parse_schema_spec(spec: dict | str | Path) -> dict:
    """Normalize a schema descriptor (dict or path to its JSON file)."""
    if isinstance(spec, (str, Path)):
        with open(spec, "r", encoding="utf-8") as fh:
            spec = json.load(fh)
    if not isinstance(spec, dict):
        raise InvalidSchema("schema descriptor must be a JSON object")
    for key in ("label_column", "positive_label", "features"):
        if key not in spec:
            raise InvalidSchema(f"schema descriptor missing {key!r}")
    features = spec["features"]
    if not isinstance(features, list) or not features:
        raise InvalidSchema("schema descriptor needs a non-empty feature list")
    seen: set[str] = set()
    for entry in features:
        if not isinstance(entry, dict) or "name" not in entry or "kind" not in entry:
            raise InvalidSchema("each feature entry needs 'name' and 'kind'")
        if entry["name"] in seen:
            raise InvalidSchema(f"duplicate feature name {entry['name']!r}")
        seen.add(entry["name"])
        if entry["kind"] not in (CONTINUOUS, CATEGORICAL):
            raise InvalidSchema(f"feature {entry['name']!r}: unknown kind {entry['kind']!r}")
        if entry["kind"] == CONTINUOUS and entry.get("categories"):
            raise InvalidSchema(
                f"continuous feature {entry['name']!r} must not list categories"
            )
        cats = entry.get("categories")
        if cats is not None and len(cats) < 2:
            raise InvalidSchema(f"feature {entry['name']!r} needs at least 2 categories")
    return spec


def _parse_continuous(cell: str, column: str, line: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise NonNumericContinuous(
            f"column {column!r}, line {line}: cannot parse {cell!r} as a number"
        ) from None
    if not math.isfinite(value):
        raise NonNumericContinuous(f"column {column!r}, line {line}: non-finite value {cell!r}")
    return value


def load_csv(path: str | Path, schema_spec: dict | str | Path) -> Dataset:
    """Load and validate a CSV against a schema descriptor.

    Row ids are assigned in 0-based file order. Categorical category lists are
    taken from the descriptor when given, otherwise inferred as the sorted set
    of observed values. Empty cells are rejected.
    """
    spec = parse_schema_spec(schema_spec)
    label_column = spec["label_column"]
    positive_label = str(spec["positive_label"])
    declared_negative = spec.get("negative_label")

    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataset(f"{path}: file is empty") from None
        positions: dict[str, int] = {}
        for idx, name in enumerate(header):
            positions.setdefault(name, idx)
        if label_column not in positions:
            raise MissingColumn(f"label column {label_column!r} not in header")
        for entry in spec["features"]:
            if entry["name"] not in positions:
                raise MissingColumn(f"feature column {entry['name']!r} not in header")

        feature_entries = spec["features"]
        feature_cols = [positions[e["name"]] for e in feature_entries]
        label_col = positions[label_column]
        declared_cats = [
            tuple(str(c) for c in e["categories"]) if e.get("categories") else None
            for e in feature_entries
        ]

        raw_rows: list[list[Any]] = []
        raw_labels: list[str] = []
        observed: list[set[str]] = [set() for _ in feature_entries]
        for line_no, record in enumerate(reader, start=2):
            values: list[Any] = []
            for j, entry in enumerate(feature_entries):
                cell = record[feature_cols[j]]
                if cell.strip() == "":
                    raise MissingValue(f"column {entry['name']!r}, line {line_no}: empty cell")
                if entry["kind"] == CONTINUOUS:
                    values.append(_parse_continuous(cell, entry["name"], line_no))
                else:
                    if declared_cats[j] is not None and cell not in declared_cats[j]:
                        raise UnknownCategory(
                            f"column {entry['name']!r}, line {line_no}: "
                            f"{cell!r} not in declared categories"
                        )
                    observed[j].add(cell)
                    values.append(cell)
            label_cell = record[label_col]
            if label_cell.strip() == "":
                raise MissingValue(f"column {label_column!r}, line {line_no}: empty cell")
            raw_labels.append(label_cell)
            raw_rows.append(values)

    if not raw_rows:
        raise EmptyDataset(f"{path}: no data rows")

    negative_label = _resolve_negative_label(raw_labels, positive_label, declared_negative)
    labels = [1 if lbl == positive_label else 0 for lbl in raw_labels]

    schema: list[FeatureSchema] = []
    for j, entry in enumerate(feature_entries):
        if entry["kind"] == CONTINUOUS:
            schema.append(
                FeatureSchema(entry["name"], CONTINUOUS, display_unit=entry.get("display_unit"))
            )
        else:
            cats = declared_cats[j] if declared_cats[j] is not None else tuple(sorted(observed[j]))
            if len(cats) < 2:
                raise InvalidSchema(
                    f"categorical feature {entry['name']!r} has fewer than 2 observed categories"
                )
            schema.append(
                FeatureSchema(
                    entry["name"], CATEGORICAL, categories=cats,
                    display_unit=entry.get("display_unit"),
                )
            )

    rows = [Instance(row_id=i, values=tuple(vals)) for i, vals in enumerate(raw_rows)]
    return Dataset(
        schema=schema,
        rows=rows,
        labels=labels,
        positive_label_name=positive_label,
        negative_label_name=negative_label,
        label_column=label_column,
        source_path=str(path),
    )


def _resolve_negative_label(
    raw_labels: Sequence[str], positive: str, declared_negative: str | None
) -> str:
    others = {lbl for lbl in raw_labels if lbl != positive}
    if declared_negative is not None:
        unexpected = others - {str(declared_negative)}
        if unexpected:
            raise InvalidLabel(f"unexpected label values {sorted(unexpected)!r}")
        return str(declared_negative)
    if len(others) != 1:
        raise InvalidLabel(
            f"cannot infer negative label: found {sorted(others)!r} besides {positive!r}"
        )
    return others.pop()


def save_csv(dataset: Dataset, path: str | Path) -> None:
    """Write the dataset back out; reloading with the same descriptor round-trips."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f.name for f in dataset.schema] + [dataset.label_column])
        for row, label in zip(dataset.rows, dataset.labels):
            cells = [repr(v) if isinstance(v, float) else str(v) for v in row.values]
            cells.append(
                dataset.positive_label_name if label == 1 else dataset.negative_label_name
            )
            writer.writerow(cells)


def split_feature_kinds(dataset: Dataset) -> tuple[list[int], list[int]]:
    """Partition feature indices into (continuous, categorical), schema order kept."""
    continuous = [i for i, f in enumerate(dataset.schema) if f.is_continuous]
    categorical = [i for i, f in enumerate(dataset.schema) if not f.is_continuous]
    return continuous, categorical
