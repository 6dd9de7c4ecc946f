"""Deterministic synthetic demo datasets.

Two generators shaped like well-known public benchmarks: a credit-risk table
(all-numeric, ~23 features, negative sentinel codes in a few columns) and a
smaller heart-disease table mixing continuous and categorical features. Both
draw every feature from a shared latent score plus feature-specific noise, so
a linear model trained on them has a few clearly dominant features — which is
what the workbench's comparison views are built to surface.

Generation is fully seeded; the same (rows, seed) always writes byte-identical
CSV files.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

CREDIT_ROWS = 10459
CREDIT_SEED = 20240817
HEART_ROWS = 303
HEART_SEED = 7041776

# name, base, latent loading, noise scale, low, high
_CREDIT_COLUMNS = [
    ("External Risk Estimate", 64.0, 11.0, 1.5, 33, 94),
    ("Months Since Oldest Trade Open", 190.0, 40.0, 70.0, 2, 800),
    ("Months Since Most Recent Trade Open", 9.0, 2.0, 7.0, 0, 380),
    ("Average Months in File", 78.0, 20.0, 14.0, 4, 380),
    ("Number of Satisfactory Trades", 20.0, 5.0, 7.0, 0, 90),
    ("Number of Trades 60+ Ever", 0.6, -0.6, 1.1, 0, 19),
    ("Number of Trades 90+ Ever", 0.4, -0.5, 1.0, 0, 19),
    ("Percent Trades Never Delinquent", 92.0, 5.0, 7.0, 20, 100),
    ("Months Since Last Delinquency", 28.0, 10.0, 16.0, 0, 85),
    ("Max Delinquency Last 12 Months", 6.0, 1.4, 1.8, 0, 9),
    ("Max Delinquency Ever", 5.5, 1.5, 1.9, 0, 8),
    ("Number of Total Trades", 21.0, 6.0, 10.0, 1, 110),
    ("Number of Trades Open in Last 12 Months", 1.9, -0.5, 1.6, 0, 19),
    ("Percent Installment Trades", 33.0, -4.0, 15.0, 0, 100),
    ("Months Since Most Recent Inquiry", 1.6, 1.0, 3.2, 0, 24),
    ("Net Fraction Revolving Burden", 34.0, -21.0, 16.0, 0, 230),
    ("Net Fraction Installment Burden", 42.0, -8.0, 26.0, 0, 470),
    ("Number of Revolving Trades With Balance", 4.0, -0.9, 2.4, 0, 32),
    ("Number of Installment Trades With Balance", 2.1, -0.3, 1.5, 0, 23),
    ("Number of Bank Trades With High Utilization", 1.0, -0.9, 1.1, 0, 18),
    ("Percent Trades With Balance", 66.0, -9.0, 14.0, 0, 100),
    ("Number of Inquiries Last 6 Months", 0.0, 0.0, 0.0, 0, 66),  # derived below
    ("Number of Inquiries Last 6 Months Excluding Last 7 Days", 1.1, -0.7, 1.3, 0, 60),
]

_CREDIT_LABEL_COLUMN = "Risk Performance"

# columns carrying a negative sentinel code, with its value and base rate
_CREDIT_SENTINELS = {
    "Months Since Last Delinquency": (-7, 0.45),
    "Months Since Most Recent Inquiry": (-8, 0.12),
    "Net Fraction Installment Burden": (-8, 0.30),
}


def credit_schema_spec() -> dict:
    return {
        "label_column": _CREDIT_LABEL_COLUMN,
        "positive_label": "good",
        "negative_label": "bad",
        "features": [{"name": name, "kind": "continuous"} for name, *_ in _CREDIT_COLUMNS],
    }


def write_credit_csv(path: str | Path, rows: int = CREDIT_ROWS, seed: int = CREDIT_SEED) -> Path:
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(rows)

    columns: dict[str, np.ndarray] = {}
    for name, base, loading, noise, low, high in _CREDIT_COLUMNS:
        if name == "Number of Inquiries Last 6 Months":
            continue
        values = base + loading * z + noise * rng.standard_normal(rows)
        columns[name] = np.clip(np.rint(values), low, high)

    excl = columns["Number of Inquiries Last 6 Months Excluding Last 7 Days"]
    recent_extra = (rng.random(rows) < 0.25).astype(np.float64)
    columns["Number of Inquiries Last 6 Months"] = np.clip(excl + recent_extra, 0, 66)

    for name, (code, base_rate) in _CREDIT_SENTINELS.items():
        gate = 1.0 / (1.0 + np.exp(-z))  # sentinel leans toward the clean end
        hit = rng.random(rows) < base_rate * 2.0 * gate
        columns[name] = np.where(hit, float(code), columns[name])

    label_logit = 1.9 * z + 0.9 * rng.standard_normal(rows)
    labels = np.where(label_logit > 0.0, "good", "bad")

    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        names = [name for name, *_ in _CREDIT_COLUMNS]
        writer.writerow(names + [_CREDIT_LABEL_COLUMN])
        for i in range(rows):
            writer.writerow([str(int(columns[name][i])) for name in names] + [labels[i]])
    return path


_HEART_CATEGORIES = {
    "sex": ("female", "male"),
    "chest pain type": ("typical angina", "atypical angina", "non-anginal pain", "asymptomatic"),
    "fasting blood sugar over 120": ("no", "yes"),
    "resting ecg": ("normal", "st-t abnormality", "lv hypertrophy"),
    "exercise induced angina": ("no", "yes"),
    "st slope": ("upsloping", "flat", "downsloping"),
    "thalassemia": ("normal", "fixed defect", "reversible defect"),
}

_HEART_FEATURES = [
    ("age", "continuous"),
    ("sex", "categorical"),
    ("chest pain type", "categorical"),
    ("resting blood pressure", "continuous"),
    ("serum cholesterol", "continuous"),
    ("fasting blood sugar over 120", "categorical"),
    ("resting ecg", "categorical"),
    ("max heart rate", "continuous"),
    ("exercise induced angina", "categorical"),
    ("st depression", "continuous"),
    ("st slope", "categorical"),
    ("major vessels", "continuous"),
    ("thalassemia", "categorical"),
]


def heart_schema_spec() -> dict:
    features = []
    for name, kind in _HEART_FEATURES:
        entry: dict = {"name": name, "kind": kind}
        if kind == "categorical":
            entry["categories"] = list(_HEART_CATEGORIES[name])
        features.append(entry)
    return {
        "label_column": "diagnosis",
        "positive_label": "disease",
        "negative_label": "healthy",
        "features": features,
    }


def write_heart_csv(path: str | Path, rows: int = HEART_ROWS, seed: int = HEART_SEED) -> Path:
    rng = np.random.default_rng(seed)
    s = rng.standard_normal(rows)

    def noisy(base, loading, noise, low, high, digits=0):
        v = base + loading * s + noise * rng.standard_normal(rows)
        v = np.clip(v, low, high)
        return np.round(v, digits)

    age = noisy(54.0, 5.5, 7.2, 29, 77)
    rest_bp = noisy(131.0, 5.0, 16.0, 94, 200)
    chol = noisy(246.0, 12.0, 48.0, 126, 500)
    max_hr = noisy(149.0, -16.0, 16.0, 71, 202)
    st_dep = noisy(0.8, 1.0, 0.9, 0.0, 6.2, digits=1)
    vessels = noisy(0.6, 0.9, 0.8, 0, 3)

    def banded(loading, cuts, labels):
        t = loading * s + rng.standard_normal(rows)
        idx = np.digitize(t, cuts)
        return np.asarray(labels, dtype=object)[idx]

    cp = banded(0.35, [-1.2, -0.3, 0.5],
                ["typical angina", "atypical angina", "non-anginal pain", "asymptomatic"])
    slope = banded(0.3, [-0.4, 0.8], ["upsloping", "flat", "downsloping"])
    thal = banded(0.3, [-1.4, 0.5], ["fixed defect", "normal", "reversible defect"])
    restecg = banded(0.15, [-0.8, 0.9], ["normal", "st-t abnormality", "lv hypertrophy"])
    exang = np.where(0.4 * s + rng.standard_normal(rows) > 0.6, "yes", "no")
    sex = np.where(rng.random(rows) < 0.68, "male", "female")
    fbs = np.where(rng.random(rows) < 0.15, "yes", "no")

    logit = (
        1.8 * s
        + 0.45 * (cp == "asymptomatic")
        - 0.25 * (cp == "typical angina")
        + 0.4 * (thal == "reversible defect")
        + 0.3 * (exang == "yes")
        + 0.25 * (sex == "male")
        + 0.8 * rng.standard_normal(rows)
    )
    labels = np.where(logit > 0.35, "disease", "healthy")

    values = {
        "age": age, "sex": sex, "chest pain type": cp, "resting blood pressure": rest_bp,
        "serum cholesterol": chol, "fasting blood sugar over 120": fbs,
        "resting ecg": restecg, "max heart rate": max_hr,
        "exercise induced angina": exang, "st depression": st_dep,
        "st slope": slope, "major vessels": vessels, "thalassemia": thal,
    }

    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        names = [name for name, _ in _HEART_FEATURES]
        writer.writerow(names + ["diagnosis"])
        for i in range(rows):
            cells = []
            for name, kind in _HEART_FEATURES:
                if kind == "categorical":
                    cells.append(str(values[name][i]))
                elif name == "st depression":
                    cells.append(f"{values[name][i]:.1f}")
                else:
                    cells.append(str(int(values[name][i])))
            cells.append(labels[i])
            writer.writerow(cells)
    return path
