"""The five survival classifiers behind one fit/predict surface.

Models serialise to JSON::

    {"format": "radsurv-model", "version": 1, "kind": "RF",
     "params": {...}, "n_features": 91,
     "standardizer": {"mean": [...], "scale": [...]},
     "state": {...kind-specific arrays...}}

Floats are written with ``repr`` precision, so a save/load round trip
reproduces predictions bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..dataset import SurvivalClass
from ..errors import DimensionMismatch, NonFiniteFeature, SingleClass
from .base import N_CLASSES, Classifier, Standardizer
from .knn import KNNClassifier
from .lda import LDAClassifier
from .svm import SVMClassifier, smo
from .tree import DecisionTreeClassifier, RandomForestClassifier, Tree, grow_tree, rf_oob_importance

MODEL_FORMAT = "radsurv-model"
MODEL_VERSION = 1

KINDS = {
    "KNN": KNNClassifier,
    "DA": LDAClassifier,
    "DT": DecisionTreeClassifier,
    "SVM": SVMClassifier,
    "RF": RandomForestClassifier,
}


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    hyperparams: dict = field(default_factory=dict)

    def __post_init__(self):
        kind = str(self.kind).upper()
        if kind == "LDA":
            kind = "DA"
        if kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; choose from {sorted(KINDS)}")
        object.__setattr__(self, "kind", kind)
        self.build()  # validates hyperparameters

    def build(self) -> Classifier:
        return KINDS[self.kind](**self.hyperparams)


def _check_xy(X, y):
    X = np.asarray(X, dtype=np.float64)
    bad = np.argwhere(~np.isfinite(X))
    if len(bad):
        raise NonFiniteFeature(int(bad[0, 0]), int(bad[0, 1]))
    if len(np.unique(y)) < 2:
        raise SingleClass("training data contains a single class")
    return X


def fit(spec: ModelSpec, data=None, X=None, y=None) -> Classifier:
    """Train the model described by ``spec`` on a Dataset (or explicit X, y)."""
    if data is not None:
        X, y = data.X, data.y
    y = np.asarray(y, dtype=np.intp)
    X = _check_xy(X, y)
    return spec.build().fit(X, y)


def predict(model: Classifier, x):
    """Class for one feature vector, or an array of classes for a 2-D batch."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.shape[1] != model.n_features:
        raise DimensionMismatch(f"model expects {model.n_features} features, got {X.shape[1]}")
    out = model.predict(X)
    return SurvivalClass(int(out[0])) if single else out


def model_to_dict(model: Classifier):
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": model.kind,
        "params": model.params,
        "n_features": model.n_features,
        "standardizer": model.standardizer.to_dict(),
        "state": model.get_state(),
    }


def model_from_dict(d) -> Classifier:
    if d.get("format") != MODEL_FORMAT:
        raise ValueError("not a radsurv model file")
    if d.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {d.get('version')}")
    model = KINDS[d["kind"]](**d["params"])
    model.n_features = d["n_features"]
    model.standardizer = Standardizer.from_dict(d["standardizer"])
    model.set_state(d["state"])
    return model


def save_model(model, path):
    Path(path).write_text(json.dumps(model_to_dict(model)))


def load_model(path) -> Classifier:
    return model_from_dict(json.loads(Path(path).read_text()))


__all__ = [
    "N_CLASSES",
    "KINDS",
    "ModelSpec",
    "Classifier",
    "KNNClassifier",
    "LDAClassifier",
    "DecisionTreeClassifier",
    "SVMClassifier",
    "RandomForestClassifier",
    "Tree",
    "grow_tree",
    "smo",
    "fit",
    "predict",
    "rf_oob_importance",
    "save_model",
    "load_model",
    "model_to_dict",
    "model_from_dict",
]
