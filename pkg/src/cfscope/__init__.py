"""Counterfactual debugging workbench for binary tabular classifiers."""

from .data import Dataset, FeatureSchema, Instance, load_csv, save_csv, split_feature_kinds
from .discretize import (
    DiscretizationScheme,
    bin_of,
    fit_discretizer,
    histogram,
    representative_value,
)
from .engine import (
    AlgorithmConfig,
    CounterfactualExplanation,
    FeatureChange,
    enumerate_candidates,
    generate_batch,
    generate_counterfactual,
)
from .predict import (
    DecisionConfig,
    LinearPredictor,
    Predictor,
    RemotePredictor,
    build_prediction_cache,
    confusion_matrix,
    load_linear,
    remote_predict,
    train_logistic,
)

__version__ = "0.1.0"

__all__ = [
    "AlgorithmConfig",
    "CounterfactualExplanation",
    "Dataset",
    "DecisionConfig",
    "DiscretizationScheme",
    "FeatureChange",
    "FeatureSchema",
    "Instance",
    "LinearPredictor",
    "Predictor",
    "RemotePredictor",
    "bin_of",
    "build_prediction_cache",
    "confusion_matrix",
    "enumerate_candidates",
    "fit_discretizer",
    "generate_batch",
    "generate_counterfactual",
    "histogram",
    "load_csv",
    "load_linear",
    "remote_predict",
    "representative_value",
    "save_csv",
    "split_feature_kinds",
    "train_logistic",
]
