"""Acceptance suite: one test per release criterion, each printing a verdict.

Run with `pytest tests/test_acceptance.py -v -s` to see the verdict lines.
Every expected value is either exact by construction, an independent
re-computation (brute force, linear scan, closed form), or a documented
constant; tolerances are stated inline and nowhere loosened.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from contextlib import contextmanager

import numpy as np

from cfscope.aggregate import aggregate_transitions
from cfscope.cohort import (
    SORT_MEDIAN_DIFFERENCE,
    FeatureRange,
    FilterSet,
    apply_filterset,
    sort_features,
)
from cfscope.data import Dataset, FeatureSchema, Instance
from cfscope.discretize import fit_discretizer, histogram
from cfscope.engine import apply_changes, generate_batch, read_jsonl, write_jsonl
from cfscope.predict import confusion_matrix
from cfscope.session import create_session


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


def _check_flip_validity(session):
    checked = 0
    for expl in session.explanations:
        if not expl.success:
            continue
        row = session.dataset.rows[expl.row_id]
        p = session.predictor.predict_proba(apply_changes(row.values, expl.changes))
        assert session.decision.decide(p) != expl.original_decision
        checked += 1
    assert checked > 0
    return checked


def test_flip_validity(credit_session, heart_session):
    with criterion("flip validity: 100% of successful explanations flip on re-scoring"):
        n_credit = _check_flip_validity(credit_session)
        n_heart = _check_flip_validity(heart_session)
        print(f"  re-scored {n_credit} credit + {n_heart} heart explanations")


def test_constraint_compliance(credit_session, heart_session):
    with criterion("constraint compliance: change cap, shift cap, locks"):
        for session in (credit_session, heart_session):
            w = session.algorithm.max_changed_features
            l = session.algorithm.max_bin_shift
            for expl in session.explanations:
                assert len(expl.changes) <= w
                for change in expl.changes:
                    assert change.feature not in session.algorithm.locked_features
                    if not change.is_categorical:
                        assert abs(change.to_bin - change.from_bin) <= l


# -- greedy oracle -----------------------------------------------------------


def _brute_force_best(current, original, session, prob, original_decision):
    """Independent candidate enumeration and scoring, one predictor call per
    candidate. Returns the best improvement, or None when no candidate exists."""
    dataset, scheme, config = session.dataset, session.scheme, session.algorithm
    changed = {f for f in range(len(original)) if current[f] != original[f]}
    may_add = len(changed) < config.max_changed_features
    best = None
    from cfscope.discretize import bin_of, representative_value

    for f, feature in enumerate(dataset.schema):
        if f in config.locked_features:
            continue
        if feature.is_continuous:
            binning = scheme.binning(f)
            if not binning.binnable:
                continue
            if f not in changed and not may_add:
                continue
            cur_bin = bin_of(current[f], f, scheme)
            orig_bin = bin_of(original[f], f, scheme)
            for nb in (cur_bin - 1, cur_bin + 1):
                if not 0 <= nb < scheme.bin_count:
                    continue
                if abs(nb - orig_bin) > config.max_bin_shift:
                    continue
                trial = list(current)
                trial[f] = original[f] if nb == orig_bin else representative_value(nb, f, scheme)
                p = session.predictor.predict_proba(trial)
                gain = prob - p if original_decision == 1 else p - prob
                best = gain if best is None else max(best, gain)
        else:
            if f in changed or not may_add:
                continue
            for category in feature.categories:
                if category == original[f]:
                    continue
                trial = list(current)
                trial[f] = category
                p = session.predictor.predict_proba(trial)
                gain = prob - p if original_decision == 1 else p - prob
                best = gain if best is None else max(best, gain)
    return best


def _replay_against_oracle(expl, session, tol):
    original = list(session.dataset.rows[expl.row_id].values)
    current = list(original)
    prob = expl.original_prob
    for step in expl.trace:
        best = _brute_force_best(current, original, session, prob, expl.original_decision)
        assert best is not None
        assert abs(step.improvement - best) <= tol, (
            f"row {expl.row_id} step {step.step}: recorded {step.improvement}, "
            f"brute-force best {best}"
        )
        change = step.change
        current[change.feature] = (
            change.to_category if change.is_categorical else change.to_value
        )
        prob = step.prob_after


def test_greedy_oracle_equivalence(credit_session, heart_session):
    with criterion(
        "greedy oracle: 200 sampled instances, every step matches brute force (1e-9, <30s)"
    ):
        rng = np.random.default_rng(20240601)
        credit_ids = rng.choice(len(credit_session.dataset), size=160, replace=False)
        heart_ids = rng.choice(len(heart_session.dataset), size=40, replace=False)
        start = time.monotonic()
        steps = 0
        for i in credit_ids:
            expl = credit_session.explanations[int(i)]
            _replay_against_oracle(expl, credit_session, tol=1e-9)
            steps += len(expl.trace)
        for i in heart_ids:
            expl = heart_session.explanations[int(i)]
            _replay_against_oracle(expl, heart_session, tol=1e-9)
            steps += len(expl.trace)
        elapsed = time.monotonic() - start
        print(f"  verified {steps} accepted steps in {elapsed:.1f}s")
        assert elapsed < 30.0


# -- discretizer --------------------------------------------------------------


def test_discretizer_mass_and_edges():
    with criterion(
        "discretizer: middle 8 bins hold 95.45% +/- 1.0pt of 10k normal samples; "
        "edges exactly on formula"
    ):
        rng = np.random.default_rng(90125)
        samples = rng.standard_normal(10_000)
        schema = [FeatureSchema("x", "continuous")]
        rows = [Instance(i, (float(v),)) for i, v in enumerate(samples)]
        ds = Dataset(schema, rows, [i % 2 for i in range(len(rows))], "y", "n", "label")
        scheme = fit_discretizer(ds, bin_count=10)
        counts = histogram(samples, 0, scheme)
        inner_fraction = sum(counts[1:9]) / 10_000
        expected = math.erf(2.0 / math.sqrt(2.0))  # 0.9544997...
        print(f"  inner mass {inner_fraction:.4f} vs {expected:.4f}")
        assert abs(inner_fraction - expected) <= 0.01

        binning = scheme.binning(0)
        width = 4.0 * binning.std / 8.0
        for i in range(8):
            assert binning.inner_edges[i] == binning.mean - 2.0 * binning.std + i * width
        assert binning.inner_edges[8] == binning.mean + 2.0 * binning.std


# -- aggregation --------------------------------------------------------------


def test_aggregation_conservation(tmp_path, credit_session):
    with criterion(
        "aggregation: transition totals equal JSONL recount; confusion cells sum to size"
    ):
        path = tmp_path / "credit.jsonl"
        write_jsonl(credit_session.explanations, path)
        aggregate = aggregate_transitions(read_jsonl(path))

        recount: dict[int, int] = {}
        with open(path) as fh:
            for line in fh:
                doc = json.loads(line)
                if not doc["success"]:
                    continue
                for change in doc["changes"]:
                    recount[change["feature"]] = recount.get(change["feature"], 0) + 1
        for f in range(len(credit_session.dataset.schema)):
            assert aggregate.feature_total(f) == recount.get(f, 0)

        cm = confusion_matrix(credit_session.cache)
        assert sum(cm.values()) == len(credit_session.dataset)


# -- cohort algebra -----------------------------------------------------------


def _random_filterset(rng, session) -> FilterSet:
    low = float(rng.uniform(0.0, 0.8))
    high = float(rng.uniform(low, 1.0))
    cells = frozenset(
        c for c in ("TP", "FP", "TN", "FN") if rng.random() < 0.5
    )
    ranges = []
    for _ in range(int(rng.integers(0, 3))):
        f = int(rng.integers(0, len(session.dataset.schema)))
        column = session.dataset.column_array(f)
        a, b = sorted(rng.choice(column, size=2, replace=True))
        ranges.append(FeatureRange(feature=f, low=float(a), high=float(b)))
    return FilterSet(
        confidence_low=low, confidence_high=high, cells=cells, ranges=tuple(ranges)
    )


def _decompose(rng, fs: FilterSet) -> tuple[FilterSet, FilterSet]:
    """Split the clause set of fs across two vacuous-by-default filter sets."""
    parts = [
        {"confidence": (fs.confidence_low, fs.confidence_high)},
        {"cells": fs.cells},
        *({"range": r} for r in fs.ranges),
    ]
    first: dict = {"ranges": []}
    second: dict = {"ranges": []}
    for part in parts:
        target = first if rng.random() < 0.5 else second
        if "confidence" in part:
            target["confidence"] = part["confidence"]
        elif "cells" in part:
            target["cells"] = part["cells"]
        else:
            target["ranges"].append(part["range"])

    def build(doc: dict) -> FilterSet:
        low, high = doc.get("confidence", (0.0, 1.0))
        return FilterSet(
            confidence_low=low,
            confidence_high=high,
            cells=doc.get("cells", frozenset()),
            ranges=tuple(doc["ranges"]),
        )

    return build(first), build(second)


def test_cohort_algebra(credit_session):
    with criterion(
        "cohort algebra: 100 random filter pairs, conjunction == intersection, "
        "clauses never grow cohorts"
    ):
        s = credit_session
        rng = np.random.default_rng(777)
        for _ in range(100):
            fs = _random_filterset(rng, s)
            part_a, part_b = _decompose(rng, fs)
            full = apply_filterset(s.dataset, s.cache, fs)
            inter = set(apply_filterset(s.dataset, s.cache, part_a)) & set(
                apply_filterset(s.dataset, s.cache, part_b)
            )
            assert full == sorted(inter)

            without_cells = FilterSet(
                confidence_low=fs.confidence_low,
                confidence_high=fs.confidence_high,
                ranges=fs.ranges,
            )
            assert set(full) <= set(apply_filterset(s.dataset, s.cache, without_cells))


# -- qualitative reproduction -------------------------------------------------


def test_qualitative_reproduction(credit_session):
    with criterion(
        "qualitative: top-2 arrow features intersect top-3 by |weight x std|; "
        "risk estimate high in median sort (soft)"
    ):
        s = credit_session
        aggregate = aggregate_transitions(s.explanations)
        totals = {
            f: aggregate.feature_total(f) for f in range(len(s.dataset.schema))
        }
        top2_arrows = sorted(totals, key=lambda f: -totals[f])[:2]

        weight_sigma = {
            f: abs(float(s.predictor.weights[f])) * s.scheme.binning(f).std
            for f in range(len(s.dataset.schema))
        }
        top3_ws = sorted(weight_sigma, key=lambda f: -weight_sigma[f])[:3]

        names = [f.name for f in s.dataset.schema]
        print(f"  top-2 by arrows: {[names[f] for f in top2_arrows]}")
        print(f"  top-3 by |w*sigma|: {[names[f] for f in top3_ws]}")
        assert set(top2_arrows) & set(top3_ws)

        order = sort_features(
            s.summary("A"), s.summary("B"), None, SORT_MEDIAN_DIFFERENCE, s.scheme
        )
        rank = order.index(s.dataset.feature_index("External Risk Estimate")) + 1
        print(f"  'External Risk Estimate' median-difference rank: {rank}")
        if rank > 5:  # soft check: logged, not failed
            warnings.warn(
                f"'External Risk Estimate' ranked {rank} by median difference (> 5)"
            )


# -- determinism ---------------------------------------------------------------


def test_determinism_full_rebuild(credit_csv, credit_spec, credit_session):
    with criterion("determinism: two full session builds export identical bytes"):
        rebuilt = create_session(credit_csv, credit_spec, {"kind": "logistic"})
        first = "".join(
            json.dumps(e.to_json_dict()) + "\n" for e in credit_session.explanations
        )
        second = "".join(
            json.dumps(e.to_json_dict()) + "\n" for e in rebuilt.explanations
        )
        assert first == second
        assert rebuilt.fingerprint == credit_session.fingerprint


# -- performance ----------------------------------------------------------------


def test_performance_budget(credit_session):
    with criterion("performance: full credit batch (10459 x 23) in under 60s"):
        s = credit_session
        start = time.monotonic()
        explanations = generate_batch(
            s.dataset, s.predictor, s.scheme, s.algorithm, s.decision
        )
        elapsed = time.monotonic() - start
        print(f"  generated {len(explanations)} explanations in {elapsed:.1f}s")
        assert len(explanations) == len(s.dataset)
        assert elapsed < 60.0
