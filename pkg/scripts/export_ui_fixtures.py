#!/usr/bin/env python3
"""Capture real HTTP payloads from a scripted session into frontend fixtures.

The frontend unit tests run against these files, so tooltip counts, hover
behavior, and fingerprint handling are checked against byte-real server
output rather than hand-written approximations.
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from cfscope.server import create_app
from cfscope.synth import heart_schema_spec, write_heart_csv

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def dump(name: str, payload) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / name).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    print(f"wrote {name}")


def main() -> int:
    workdir = Path(tempfile.mkdtemp(prefix="fixture-session-"))
    csv_path = write_heart_csv(workdir / "heart.csv")
    app = create_app(session_dir=None)
    client = TestClient(app)

    created = client.post(
        "/sessions",
        json={
            "dataset_path": str(csv_path),
            "schema_spec": heart_schema_spec(),
            "model_spec": {"kind": "logistic", "epochs": 200},
        },
    )
    created.raise_for_status()
    sid = created.json()["session_id"]

    dump("schema.json", client.get(f"/sessions/{sid}/schema").json())
    dump("filter_a.json", client.get(f"/sessions/{sid}/filters/A").json())
    dump("filter_b.json", client.get(f"/sessions/{sid}/filters/B").json())
    dump(
        "compare.json",
        client.get(f"/sessions/{sid}/compare?sort=median_difference").json(),
    )
    aggregate_a = client.get(f"/sessions/{sid}/aggregate/A").json()
    aggregate_b = client.get(f"/sessions/{sid}/aggregate/B").json()
    dump("aggregate_a.json", aggregate_a)
    dump("aggregate_b.json", aggregate_b)

    # find an explanation with exactly 3 changes for the hover test
    session = app.state.registry.get(sid)
    three = next(e for e in session.explanations if e.success and len(e.changes) == 3)
    dump(
        "explanation_3change.json",
        client.get(f"/sessions/{sid}/explanations/{three.row_id}").json(),
    )

    feature = session.dataset.feature_index("age")
    dump(
        "slice.json",
        client.get(
            f"/sessions/{sid}/slice",
            params={"cohort": "A", "feature": feature, "bin": 5},
        ).json(),
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
