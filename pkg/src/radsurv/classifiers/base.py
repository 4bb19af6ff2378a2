from __future__ import annotations

import numpy as np

from ..dataset import SurvivalClass

N_CLASSES = len(SurvivalClass)


class Standardizer:
    """Per-feature z-scoring with training statistics; zero-variance columns get scale 1."""

    def __init__(self, mean=None, scale=None):
        self.mean = None if mean is None else np.asarray(mean, dtype=np.float64)
        self.scale = None if scale is None else np.asarray(scale, dtype=np.float64)

    def fit(self, X):
        self.mean = X.mean(axis=0)
        sd = X.std(axis=0)
        self.scale = np.where(sd > 0, sd, 1.0)
        return self

    def transform(self, X):
        return (X - self.mean) / self.scale

    def to_dict(self):
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["mean"], d["scale"])


def plurality(counts):
    """Row-wise argmax of vote counts; ties go to the lowest class (worst prognosis)."""
    return np.argmax(np.asarray(counts), axis=-1)


class Classifier:
    """Common surface of the five models.

    Subclasses implement ``_fit``/``_predict`` on standardised features and
    ``get_state``/``set_state`` with JSON-compatible values.
    """

    kind = None

    def __init__(self, **params):
        self.params = params
        self.standardizer = None
        self.n_features = None

    def fit(self, X, y):
        self.n_features = X.shape[1]
        self.standardizer = Standardizer().fit(X)
        self._fit(self.standardizer.transform(X), np.asarray(y, dtype=np.intp))
        return self

    def predict(self, X):
        return self._predict(self.standardizer.transform(X))

    def _fit(self, Xs, y):
        raise NotImplementedError

    def _predict(self, Xs):
        raise NotImplementedError

    def get_state(self):
        raise NotImplementedError

    def set_state(self, state):
        raise NotImplementedError
