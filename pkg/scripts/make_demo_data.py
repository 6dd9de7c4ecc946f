#!/usr/bin/env python3
"""Materialize the synthetic demo datasets and their schema descriptors."""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from cfscope.synth import (
    credit_schema_spec,
    heart_schema_spec,
    write_credit_csv,
    write_heart_csv,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", nargs="?", default="demo-data", help="output directory")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    write_credit_csv(out / "credit.csv")
    (out / "credit_schema.json").write_text(json.dumps(credit_schema_spec(), indent=2))
    write_heart_csv(out / "heart.csv")
    (out / "heart_schema.json").write_text(json.dumps(heart_schema_spec(), indent=2))
    for name in ("credit.csv", "credit_schema.json", "heart.csv", "heart_schema.json"):
        print(out / name)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
