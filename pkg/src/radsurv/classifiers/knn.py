import numpy as np

from .base import N_CLASSES, Classifier, plurality


class KNNClassifier(Classifier):
    """k nearest neighbours on standardised features.

    Equal distances resolve to the lower training index; vote ties to the
    worst prognosis.
    """

    kind = "KNN"

    def __init__(self, k=3, metric="euclidean"):
        if k < 1:
            raise ValueError("k must be >= 1")
        if metric not in ("euclidean", "manhattan"):
            raise ValueError(f"unsupported metric {metric!r}")
        super().__init__(k=k, metric=metric)
        self.k = k
        self.metric = metric

    def _fit(self, Xs, y):
        self.X_ = Xs
        self.y_ = y

    def _distances(self, Xs):
        diff = Xs[:, None, :] - self.X_[None, :, :]
        if self.metric == "manhattan":
            return np.abs(diff).sum(axis=-1)
        return np.sqrt((diff * diff).sum(axis=-1))

    def _predict(self, Xs):
        k = min(self.k, len(self.y_))
        out = np.empty(len(Xs), dtype=np.intp)
        # chunked to bound the (n_query, n_train, F) temporary
        for start in range(0, len(Xs), 256):
            d = self._distances(Xs[start : start + 256])
            nearest = np.argsort(d, axis=1, kind="stable")[:, :k]
            votes = np.zeros((len(d), N_CLASSES), dtype=np.int64)
            for c in range(N_CLASSES):
                votes[:, c] = (self.y_[nearest] == c).sum(axis=1)
            out[start : start + 256] = plurality(votes)
        return out

    def get_state(self):
        return {"X": self.X_.tolist(), "y": self.y_.tolist()}

    def set_state(self, state):
        self.X_ = np.asarray(state["X"], dtype=np.float64).reshape(len(state["y"]), self.n_features)
        self.y_ = np.asarray(state["y"], dtype=np.intp)
