"""Shared fixtures: synthetic datasets on disk plus fully built sessions.

The credit session is expensive (full training + batch generation over 10k
rows), so it is built once per test session and shared.
"""

from __future__ import annotations

import json

import pytest

from cfscope.data import load_csv
from cfscope.session import Session, create_session
from cfscope.synth import (
    credit_schema_spec,
    heart_schema_spec,
    write_credit_csv,
    write_heart_csv,
)


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("data")


@pytest.fixture(scope="session")
def credit_csv(data_dir):
    return write_credit_csv(data_dir / "credit.csv")


@pytest.fixture(scope="session")
def credit_spec():
    return credit_schema_spec()


@pytest.fixture(scope="session")
def credit_spec_path(data_dir, credit_spec):
    path = data_dir / "credit_schema.json"
    path.write_text(json.dumps(credit_spec))
    return path


@pytest.fixture(scope="session")
def credit_dataset(credit_csv, credit_spec):
    return load_csv(credit_csv, credit_spec)


@pytest.fixture(scope="session")
def heart_csv(data_dir):
    return write_heart_csv(data_dir / "heart.csv")


@pytest.fixture(scope="session")
def heart_spec():
    return heart_schema_spec()


@pytest.fixture(scope="session")
def heart_dataset(heart_csv, heart_spec):
    return load_csv(heart_csv, heart_spec)


@pytest.fixture(scope="session")
def credit_session(credit_csv, credit_spec) -> Session:
    return create_session(credit_csv, credit_spec, {"kind": "logistic"})


@pytest.fixture(scope="session")
def heart_session(heart_csv, heart_spec) -> Session:
    return create_session(heart_csv, heart_spec, {"kind": "logistic"})


@pytest.fixture()
def toy_csv(tmp_path):
    """3 rows, one continuous feature, labels 0/1/1."""
    path = tmp_path / "toy.csv"
    path.write_text("x,outcome\n1.0,no\n2.0,yes\n3.0,yes\n")
    return path


@pytest.fixture()
def toy_spec():
    return {
        "label_column": "outcome",
        "positive_label": "yes",
        "features": [{"name": "x", "kind": "continuous"}],
    }
