"""Prediction boundary: linear models, the remote adapter, and the cache."""

from __future__ import annotations

import json
import math
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from cfscope.data import Dataset, FeatureSchema, Instance
from cfscope.errors import (
    ArityMismatch,
    InvalidModel,
    MalformedResponse,
    OutOfRangeProbability,
    SingleClassDataset,
    TransportFailure,
)
from cfscope.predict import (
    DecisionConfig,
    LinearPredictor,
    build_prediction_cache,
    cache_from_probabilities,
    confusion_matrix,
    encode_rows,
    encoded_width,
    load_linear,
    remote_predict,
    save_linear,
    train_logistic,
)

# frozen on the first verified run of the synthetic credit set (10459 rows,
# 500 epochs, lr 0.1); training is deterministic, so equality is exact
CREDIT_CORRECT_PREDICTIONS = 8869


def one_feature_dataset(values, labels):
    schema = [FeatureSchema("x", "continuous")]
    rows = [Instance(i, (v,)) for i, v in enumerate(values)]
    return Dataset(schema, rows, labels, "yes", "no", "outcome")


def logistic(z: float) -> float:
    return 1.0 / (1.0 + math.exp(-z))


def test_decision_config_validation():
    with pytest.raises(ValueError):
        DecisionConfig(threshold=0.0)
    with pytest.raises(ValueError):
        DecisionConfig(threshold=1.0)
    assert DecisionConfig(0.5).decide(0.5) == 1
    assert DecisionConfig(0.5).decide(0.4999) == 0


def test_encoding_order_and_width():
    schema = [
        FeatureSchema("x", "continuous"),
        FeatureSchema("c", "categorical", categories=("a", "b", "c")),
    ]
    assert encoded_width(schema) == 4
    X = encode_rows(schema, [(2.5, "b"), (1.0, "a")])
    assert X.tolist() == [[2.5, 0.0, 1.0, 0.0], [1.0, 1.0, 0.0, 0.0]]


def test_train_separable_sign():
    ds = one_feature_dataset([-1.0, 1.0], [0, 1])
    predictor = train_logistic(ds)
    assert predictor.weights[0] > 0
    assert predictor.predict_proba((1.0,)) > 0.5 > predictor.predict_proba((-1.0,))


def test_train_single_class_rejected():
    ds = one_feature_dataset([1.0, 2.0], [1, 1])
    with pytest.raises(SingleClassDataset):
        train_logistic(ds)


def test_zero_weights_give_half(tmp_path):
    schema = [FeatureSchema("x", "continuous")]
    path = tmp_path / "zero.json"
    path.write_text(json.dumps({"intercept": 0.0, "weights": [0.0]}))
    predictor = load_linear(path, schema)
    for v in (-10.0, 0.0, 3.25):
        assert predictor.predict_proba((v,)) == 0.5


def test_linear_closed_form(tmp_path):
    schema = [FeatureSchema("x", "continuous")]
    path = tmp_path / "w2.json"
    path.write_text(json.dumps({"intercept": 0.0, "weights": [2.0]}))
    predictor = load_linear(path, schema)
    assert predictor.predict_proba((0.25,)) == pytest.approx(logistic(0.5), abs=1e-15)


def test_arity_mismatch(tmp_path):
    schema = [FeatureSchema("x", "continuous"), FeatureSchema("y", "continuous")]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"intercept": 0.0, "weights": [1.0]}))
    with pytest.raises(ArityMismatch):
        load_linear(path, schema)


def test_malformed_model_file(tmp_path):
    schema = [FeatureSchema("x", "continuous")]
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(InvalidModel):
        load_linear(path, schema)
    path.write_text(json.dumps({"weights": [1.0]}))
    with pytest.raises(InvalidModel):
        load_linear(path, schema)


def test_save_load_round_trip(tmp_path):
    schema = [FeatureSchema("x", "continuous")]
    predictor = LinearPredictor(schema, -0.75, [1.25])
    path = tmp_path / "coeffs.json"
    save_linear(predictor, path)
    again = load_linear(path, schema)
    assert again.intercept == predictor.intercept
    assert again.weights.tolist() == predictor.weights.tolist()


def test_confusion_four_rows():
    ds = one_feature_dataset([0.0, 0.0, 0.0, 0.0], [1, 0, 1, 0])
    cache = cache_from_probabilities(
        ds, np.array([0.9, 0.8, 0.2, 0.1]), DecisionConfig(0.5)
    )
    assert confusion_matrix(cache) == {"TP": 1, "FP": 1, "TN": 1, "FN": 1}


def test_confusion_perfect_predictor():
    ds = one_feature_dataset([0.0] * 4, [1, 0, 1, 0])
    cache = cache_from_probabilities(
        ds, np.array([0.9, 0.1, 0.8, 0.2]), DecisionConfig(0.5)
    )
    cm = confusion_matrix(cache)
    assert cm["FP"] == 0 and cm["FN"] == 0
    assert cm["TP"] + cm["TN"] == 4


def test_confusion_cells_sum_to_size(credit_session):
    cm = confusion_matrix(credit_session.cache)
    assert sum(cm.values()) == len(credit_session.dataset)


def test_credit_confusion_matches_brute_recount(credit_session):
    cache = credit_session.cache
    labels = credit_session.dataset.labels
    tally = {"TP": 0, "FP": 0, "TN": 0, "FN": 0}
    for p, y in zip(cache.probabilities, labels):
        d = 1 if p >= cache.threshold else 0
        if d == 1:
            tally["TP" if y == 1 else "FP"] += 1
        else:
            tally["FN" if y == 1 else "TN"] += 1
    assert confusion_matrix(cache) == tally


def test_decision_monotone_in_probability():
    ds = one_feature_dataset([0.0] * 5, [0, 1, 0, 1, 0])
    probs = np.array([0.1, 0.3, 0.5, 0.7, 0.9])
    cache = cache_from_probabilities(ds, probs, DecisionConfig(0.5))
    decisions = list(cache.decisions)
    assert decisions == sorted(decisions)


def test_credit_training_accuracy_regression(credit_session):
    correct = int(
        (credit_session.cache.decisions == credit_session.dataset.label_array).sum()
    )
    assert correct == CREDIT_CORRECT_PREDICTIONS


# -- remote adapter ------------------------------------------------------


class _StubHandler(BaseHTTPRequestHandler):
    behavior = "echo"
    predictor: LinearPredictor | None = None

    def do_POST(self):  # noqa: N802 - http.server API
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length)) if length else {}
        instances = body.get("instances", [])
        if self.behavior == "echo":
            payload = {"probabilities": [0.5 for _ in instances]}
        elif self.behavior == "out_of_range":
            payload = {"probabilities": [1.3 for _ in instances]}
        elif self.behavior == "missing_key":
            payload = {"scores": [0.5]}
        elif self.behavior == "wrong_count":
            payload = {"probabilities": [0.5] * (len(instances) + 1)}
        elif self.behavior == "not_json":
            self.send_response(200)
            self.end_headers()
            self.wfile.write(b"plainly not json")
            return
        else:  # wrap a real in-process model
            probs = self.predictor.predict_proba_batch(instances)
            payload = {"probabilities": [float(p) for p in probs]}
        data = json.dumps(payload).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):  # quiet
        pass


@pytest.fixture()
def stub_server():
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/predict"
    server.shutdown()


def test_remote_echo(stub_server):
    _StubHandler.behavior = "echo"
    assert remote_predict(stub_server, [[1.0], [2.0]]) == [0.5, 0.5]


def test_remote_out_of_range(stub_server):
    _StubHandler.behavior = "out_of_range"
    with pytest.raises(OutOfRangeProbability):
        remote_predict(stub_server, [[1.0]])


def test_remote_malformed(stub_server):
    for behavior in ("missing_key", "wrong_count", "not_json"):
        _StubHandler.behavior = behavior
        with pytest.raises(MalformedResponse):
            remote_predict(stub_server, [[1.0]])


def test_remote_transport_failure():
    with pytest.raises(TransportFailure):
        remote_predict("http://127.0.0.1:9/predict", [[1.0]])


def test_remote_empty_batch_rejected(stub_server):
    with pytest.raises(ValueError):
        remote_predict(stub_server, [])


def test_remote_stub_matches_in_process(stub_server, heart_session):
    # JSON float encoding is shortest round-trip, so equality is exact
    _StubHandler.behavior = "wrap"
    _StubHandler.predictor = heart_session.predictor
    rows = [list(r.values) for r in heart_session.dataset.rows[:25]]
    remote = remote_predict(stub_server, rows)
    local = heart_session.predictor.predict_proba_batch(rows)
    for r, l in zip(remote, local):
        assert r == float(l)


def test_build_cache_matches_predictor(heart_session):
    ds = heart_session.dataset
    cache = build_prediction_cache(ds, heart_session.predictor, heart_session.decision)
    assert np.array_equal(cache.probabilities, heart_session.cache.probabilities)
    assert np.array_equal(cache.decisions, heart_session.cache.decisions)
