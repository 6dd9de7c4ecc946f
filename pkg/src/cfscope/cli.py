"""Batch command-line interface.

Exit codes: 0 success, 1 validation error (bad inputs, schema violations),
2 unexpected runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import engine
from .cohort import FilterSet, apply_filterset, summarize_cohort
from .data import load_csv, parse_schema_spec, split_feature_kinds
from .discretize import DEFAULT_BIN_COUNT, fit_discretizer
from .engine import AlgorithmConfig, generate_batch
from .errors import WorkbenchError
from .predict import (
    DecisionConfig,
    build_prediction_cache,
    confusion_matrix,
    load_linear,
    save_linear,
    train_logistic,
)


def _add_dataset_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("dataset", help="CSV file with a header row")
    parser.add_argument("schema", help="JSON schema descriptor")


def _add_model_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--model", help="coefficient file (JSON intercept/weights)")
    group.add_argument("--train", action="store_true", help="train the logistic baseline")
    parser.add_argument("--epochs", type=int, default=500)
    parser.add_argument("--learning-rate", type=float, default=0.1)
    parser.add_argument("--threshold", type=float, default=0.5)


def _build_predictor(args, dataset):
    if args.model:
        return load_linear(args.model, dataset.schema)
    return train_logistic(dataset, epochs=args.epochs, learning_rate=args.learning_rate)


def cmd_ingest(args) -> int:
    dataset = load_csv(args.dataset, parse_schema_spec(args.schema))
    continuous, categorical = split_feature_kinds(dataset)
    print(
        f"rows={len(dataset)} features={len(dataset.schema)} "
        f"continuous={len(continuous)} categorical={len(categorical)} "
        f"positive={dataset.positive_label_name!r} negative={dataset.negative_label_name!r}"
    )
    return 0


def cmd_train(args) -> int:
    dataset = load_csv(args.dataset, parse_schema_spec(args.schema))
    predictor = train_logistic(dataset, epochs=args.epochs, learning_rate=args.learning_rate)
    save_linear(predictor, args.output)
    cache = build_prediction_cache(dataset, predictor, DecisionConfig(args.threshold))
    accuracy = float((cache.decisions == dataset.label_array).mean())
    cm = confusion_matrix(cache)
    print(f"saved {args.output}  accuracy={accuracy:.4f}  {cm}")
    return 0


def cmd_explain(args) -> int:
    dataset = load_csv(args.dataset, parse_schema_spec(args.schema))
    predictor = _build_predictor(args, dataset)
    decision = DecisionConfig(args.threshold)
    scheme = fit_discretizer(dataset, args.bins)
    locked = frozenset(
        dataset.feature_index(name) for name in (args.lock or [])
    )
    config = AlgorithmConfig(
        max_changed_features=args.max_changed_features,
        max_bin_shift=args.max_bin_shift,
        locked_features=locked,
        max_steps=args.max_steps,
    )
    explanations = generate_batch(dataset, predictor, scheme, config, decision)
    if args.output:
        engine.write_jsonl(explanations, args.output)
    else:
        engine.write_jsonl(explanations, sys.stdout)
    flips = sum(e.success for e in explanations)
    print(
        f"explained {len(explanations)} rows: {flips} flipped "
        f"({flips / len(explanations):.1%})",
        file=sys.stderr,
    )
    return 0


def cmd_summarize(args) -> int:
    dataset = load_csv(args.dataset, parse_schema_spec(args.schema))
    predictor = _build_predictor(args, dataset)
    cache = build_prediction_cache(dataset, predictor, DecisionConfig(args.threshold))
    scheme = fit_discretizer(dataset, args.bins)
    if args.filter:
        with open(args.filter, "r", encoding="utf-8") as fh:
            filterset = FilterSet.from_json_dict(json.load(fh))
    else:
        filterset = FilterSet()
    row_ids = apply_filterset(dataset, cache, filterset)
    summary = summarize_cohort(row_ids, dataset, scheme)
    print(f"cohort size: {summary.size}")
    for feature, stats in zip(dataset.schema, summary.features):
        doc = stats.to_json_dict()
        if doc["kind"] == "continuous":
            print(f"  {feature.name}: median={doc['median']} bin={doc['median_bin']}")
        else:
            print(f"  {feature.name}: mode={doc['mode']}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(session_dir=args.session_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfscope",
        description="Counterfactual debugging workbench for binary tabular classifiers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="validate a CSV against a schema descriptor")
    _add_dataset_args(p_ingest)
    p_ingest.set_defaults(func=cmd_ingest)

    p_train = sub.add_parser("train", help="train the logistic baseline")
    _add_dataset_args(p_train)
    p_train.add_argument("-o", "--output", required=True, help="coefficient file to write")
    p_train.add_argument("--epochs", type=int, default=500)
    p_train.add_argument("--learning-rate", type=float, default=0.1)
    p_train.add_argument("--threshold", type=float, default=0.5)
    p_train.set_defaults(func=cmd_train)

    p_explain = sub.add_parser("explain", help="batch counterfactual generation (JSON lines)")
    _add_dataset_args(p_explain)
    _add_model_args(p_explain)
    p_explain.add_argument("--bins", type=int, default=DEFAULT_BIN_COUNT)
    p_explain.add_argument("--max-changed-features", type=int, default=5)
    p_explain.add_argument("--max-bin-shift", type=int, default=4)
    p_explain.add_argument("--max-steps", type=int, default=None)
    p_explain.add_argument("--lock", action="append", help="feature name to lock (repeatable)")
    p_explain.add_argument("-o", "--output", help="JSONL output path (default stdout)")
    p_explain.set_defaults(func=cmd_explain)

    p_summarize = sub.add_parser("summarize", help="cohort statistics to stdout")
    _add_dataset_args(p_summarize)
    _add_model_args(p_summarize)
    p_summarize.add_argument("--bins", type=int, default=DEFAULT_BIN_COUNT)
    p_summarize.add_argument("--filter", help="FilterSet JSON file")
    p_summarize.set_defaults(func=cmd_summarize)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--session-dir", default=None)
    p_serve.add_argument("--ui-dir", default=None, help="static UI directory to mount at /ui")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (WorkbenchError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:  # pragma: no cover
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"unexpected failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
