import numpy as np

from .base import N_CLASSES, Classifier, plurality


class LDAClassifier(Classifier):
    """Linear discriminant analysis with a pooled, shrunk covariance.

    The pooled covariance S is replaced by (1 - shrinkage) S + shrinkage
    * (trace(S) / p) I, which keeps it invertible with many correlated
    features.
    """

    kind = "DA"

    def __init__(self, shrinkage=1e-3):
        if not 0 <= shrinkage < 1:
            raise ValueError("shrinkage must be in [0, 1)")
        super().__init__(shrinkage=shrinkage)
        self.shrinkage = shrinkage

    def _fit(self, Xs, y):
        n, p = Xs.shape
        present = [c for c in range(N_CLASSES) if np.any(y == c)]
        means = np.zeros((N_CLASSES, p))
        scatter = np.zeros((p, p))
        for c in present:
            Xc = Xs[y == c]
            means[c] = Xc.mean(axis=0)
            d = Xc - means[c]
            scatter += d.T @ d
        cov = scatter / max(n - len(present), 1)
        target = np.trace(cov) / p
        if target <= 0:
            target = 1.0
        cov = (1 - self.shrinkage) * cov + self.shrinkage * target * np.eye(p)
        W = np.linalg.solve(cov, means.T)  # (p, classes)
        self.coef_ = W.T
        self.intercept_ = np.full(N_CLASSES, -np.inf)
        for c in present:
            prior = np.mean(y == c)
            self.intercept_[c] = -0.5 * means[c] @ W[:, c] + np.log(prior)

    def decision_function(self, X):
        Xs = self.standardizer.transform(X)
        return Xs @ self.coef_.T + self.intercept_

    def _predict(self, Xs):
        return plurality(Xs @ self.coef_.T + self.intercept_)

    def get_state(self):
        return {
            "coef": self.coef_.tolist(),
            "intercept": [None if not np.isfinite(v) else float(v) for v in self.intercept_],
        }

    def set_state(self, state):
        self.coef_ = np.asarray(state["coef"], dtype=np.float64)
        self.intercept_ = np.array([-np.inf if v is None else v for v in state["intercept"]], dtype=np.float64)
