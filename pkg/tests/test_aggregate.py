"""Transition aggregation, whole-explanation lookup, and symmetry reporting."""

from __future__ import annotations

import json

import pytest

from cfscope.aggregate import (
    TransitionCell,
    aggregate_to_json_dict,
    aggregate_transitions,
    explanation_detail,
    opposition_report,
)
from cfscope.engine import (
    CounterfactualExplanation,
    FeatureChange,
    read_jsonl,
    write_jsonl,
)
from cfscope.errors import MixedScheme, UnknownRow


def make_expl(row_id, decision, changes, success=True, fingerprint="fp"):
    return CounterfactualExplanation(
        row_id=row_id,
        original_prob=0.8 if decision == 1 else 0.2,
        original_decision=decision,
        success=success,
        stop_reason=None if success else "no_improvement",
        changes=changes,
        trace=[],
        final_prob=0.5,
        fingerprint=fingerprint,
    )


def cont_change(feature, from_bin, to_bin):
    return FeatureChange(
        feature=feature,
        from_bin=from_bin,
        to_bin=to_bin,
        from_value=float(from_bin),
        to_value=float(to_bin),
    )


def test_empty_aggregate():
    agg = aggregate_transitions([])
    assert agg.positive_origin == {} and agg.negative_origin == {}
    assert agg.failed_ids == []


def test_failures_only_counts_nothing():
    agg = aggregate_transitions([make_expl(3, 1, [], success=False)])
    assert agg.positive_origin == {}
    assert agg.failed_ids == [3]


def test_counting_two_identical_transitions():
    expls = [
        make_expl(1, 0, [cont_change(2, 3, 4)]),
        make_expl(7, 0, [cont_change(2, 3, 4)]),
    ]
    agg = aggregate_transitions(expls)
    cell = agg.negative_origin[2][(3, 4)]
    assert cell.count == 2
    assert cell.explanation_ids == [1, 7]
    assert agg.positive_origin == {}


def test_partition_by_original_decision():
    expls = [
        make_expl(1, 1, [cont_change(0, 5, 4)]),
        make_expl(2, 0, [cont_change(0, 4, 5)]),
    ]
    agg = aggregate_transitions(expls)
    assert (5, 4) in agg.positive_origin[0]
    assert (4, 5) in agg.negative_origin[0]


def test_mixed_fingerprints_rejected():
    expls = [
        make_expl(1, 0, [cont_change(0, 3, 4)], fingerprint="aa"),
        make_expl(2, 0, [cont_change(0, 3, 4)], fingerprint="bb"),
    ]
    with pytest.raises(MixedScheme):
        aggregate_transitions(expls)


def test_categorical_transitions_keyed_by_label():
    change = FeatureChange(feature=1, from_category="red", to_category="blue")
    agg = aggregate_transitions([make_expl(4, 1, [change])])
    assert agg.positive_origin[1][("red", "blue")].count == 1


def test_conservation_against_jsonl_recount(tmp_path, heart_session):
    """Per-feature totals equal a flat recount over the serialized export."""
    s = heart_session
    path = tmp_path / "expl.jsonl"
    write_jsonl(s.explanations, path)
    agg = aggregate_transitions(read_jsonl(path))

    recount: dict[int, int] = {}
    with open(path) as fh:
        for line in fh:
            doc = json.loads(line)
            if not doc["success"]:
                continue
            for change in doc["changes"]:
                recount[change["feature"]] = recount.get(change["feature"], 0) + 1
    for f in range(len(s.dataset.schema)):
        assert agg.feature_total(f) == recount.get(f, 0)


def test_partition_ids_disjoint_and_complete(heart_session):
    s = heart_session
    agg = aggregate_transitions(s.explanations)
    pos_ids = {
        i for cells in agg.positive_origin.values() for c in cells.values() for i in c.explanation_ids
    }
    neg_ids = {
        i for cells in agg.negative_origin.values() for c in cells.values() for i in c.explanation_ids
    }
    assert not pos_ids & neg_ids
    success_with_changes = {
        e.row_id for e in s.explanations if e.success and e.changes
    }
    assert pos_ids | neg_ids == success_with_changes
    assert set(agg.failed_ids) == {e.row_id for e in s.explanations if not e.success}


def test_concatenation_equals_cellwise_sum(heart_session):
    s = heart_session
    first, second = s.explanations[:100], s.explanations[100:]
    whole = aggregate_transitions(s.explanations)
    part_a = aggregate_transitions(first)
    part_b = aggregate_transitions(second)
    for partition in ("positive_origin", "negative_origin"):
        merged: dict = {}
        for part in (getattr(part_a, partition), getattr(part_b, partition)):
            for f, cells in part.items():
                for key, cell in cells.items():
                    slot = merged.setdefault(f, {}).setdefault(key, TransitionCell())
                    slot.count += cell.count
                    slot.explanation_ids.extend(cell.explanation_ids)
        got = getattr(whole, partition)
        assert {f: {k: (c.count, c.explanation_ids) for k, c in cells.items()} for f, cells in got.items()} == {
            f: {k: (c.count, c.explanation_ids) for k, c in cells.items()} for f, cells in merged.items()
        }


def test_explanation_detail_roundtrip(heart_session):
    s = heart_session
    some_success = next(e for e in s.explanations if e.success and len(e.changes) == 1)
    detail = explanation_detail(some_success.row_id, s.explanations)
    assert detail is some_success
    assert len(detail.changes) == 1


def test_explanation_detail_failed_row(heart_session):
    s = heart_session
    failed = [e for e in s.explanations if not e.success]
    if not failed:
        pytest.skip("no failed explanations in this dataset")
    detail = explanation_detail(failed[0].row_id, s.explanations)
    assert detail.changes == []
    assert detail.stop_reason is not None
    assert detail.final_prob == detail.original_prob


def test_explanation_detail_unknown_row(heart_session):
    with pytest.raises(UnknownRow):
        explanation_detail(10**9, heart_session.explanations)


def test_detail_matches_trace_replay(heart_session):
    """The engine's accepted trace, replayed, lands exactly on the net changes."""
    s = heart_session
    expl = next(e for e in s.explanations if e.success and len(e.changes) >= 2)
    original = list(s.dataset.rows[expl.row_id].values)
    replayed = list(original)
    for step in expl.trace:
        c = step.change
        replayed[c.feature] = c.to_category if c.is_categorical else c.to_value
    expected = list(original)
    for c in expl.changes:
        expected[c.feature] = c.to_category if c.is_categorical else c.to_value
    assert replayed == expected


def test_opposition_mirrored_is_one():
    pos = {0: {(3, 4): TransitionCell(2, [1, 2]), (5, 4): TransitionCell(1, [3])}}
    neg = {0: {(4, 3): TransitionCell(5, [4, 5, 6, 7, 8]), (4, 5): TransitionCell(1, [9])}}
    report = opposition_report(pos, neg)
    assert report[0] == {"positive_mirrored": 1.0, "negative_mirrored": 1.0}


def test_opposition_disjoint_is_zero():
    pos = {0: {(3, 4): TransitionCell(2, [1, 2])}}
    neg = {0: {(5, 6): TransitionCell(1, [3])}}
    report = opposition_report(pos, neg)
    assert report[0] == {"positive_mirrored": 0.0, "negative_mirrored": 0.0}


def test_opposition_empty_side_is_none():
    pos = {0: {(3, 4): TransitionCell(2, [1, 2])}}
    report = opposition_report(pos, {})
    assert report[0]["negative_mirrored"] is None
    assert report[0]["positive_mirrored"] == 0.0


def test_opposition_matches_brute_force(credit_session):
    s = credit_session
    agg = aggregate_transitions(s.explanations)
    report = opposition_report(agg.positive_origin, agg.negative_origin)
    for f, entry in report.items():
        own = agg.positive_origin.get(f, {})
        other = agg.negative_origin.get(f, {})
        mass = sum(c.count for c in own.values())
        if mass == 0:
            assert entry["positive_mirrored"] is None
        else:
            mirrored = sum(
                c.count for (a, b), c in own.items() if (b, a) in other
            )
            assert entry["positive_mirrored"] == mirrored / mass


def test_aggregate_json_shape(heart_session):
    s = heart_session
    agg = aggregate_transitions(s.explanations)
    doc = aggregate_to_json_dict(agg, s.dataset)
    assert doc["fingerprint"] == s.fingerprint
    for partition in ("positive_origin", "negative_origin"):
        for name, cells in doc[partition].items():
            assert any(f.name == name for f in s.dataset.schema)
            for key, cell in cells.items():
                assert "->" in key
                assert cell["count"] == len(cell["ids"])
