import numpy as np

from .base import N_CLASSES, Classifier, plurality


def rbf_kernel(A, B, gamma):
    sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * A @ B.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


def smo(K, y, C=1.0, tol=1e-3, max_passes=10, max_iter=500, rng=None):
    """Simplified sequential minimal optimisation for a binary soft-margin SVM.

    ``K`` is the training Gram matrix and ``y`` holds labels in {-1, +1}. The
    second multiplier is picked at random, and training stops after
    ``max_passes`` consecutive sweeps without an update (or ``max_iter``
    sweeps in total). Returns (alpha, b).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    alpha = np.zeros(n)
    b = 0.0
    f = np.zeros(n)  # K @ (alpha * y), kept incrementally
    passes = sweeps = 0
    while passes < max_passes and sweeps < max_iter:
        changed = 0
        for i in range(n):
            Ei = f[i] + b - y[i]
            ri = y[i] * Ei
            if not ((ri < -tol and alpha[i] < C) or (ri > tol and alpha[i] > 0)):
                continue
            j = int(rng.integers(n - 1))
            if j >= i:
                j += 1
            Ej = f[j] + b - y[j]
            ai, aj = alpha[i], alpha[j]
            if y[i] != y[j]:
                L, H = max(0.0, aj - ai), min(C, C + aj - ai)
            else:
                L, H = max(0.0, ai + aj - C), min(C, ai + aj)
            if L == H:
                continue
            eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
            if eta >= 0:
                continue
            aj_new = min(H, max(L, aj - y[j] * (Ei - Ej) / eta))
            if abs(aj_new - aj) < 1e-5:
                continue
            ai_new = ai + y[i] * y[j] * (aj - aj_new)
            dai, daj = ai_new - ai, aj_new - aj
            b1 = b - Ei - y[i] * dai * K[i, i] - y[j] * daj * K[i, j]
            b2 = b - Ej - y[i] * dai * K[i, j] - y[j] * daj * K[j, j]
            if 0 < ai_new < C:
                b = b1
            elif 0 < aj_new < C:
                b = b2
            else:
                b = (b1 + b2) / 2.0
            alpha[i], alpha[j] = ai_new, aj_new
            f += (y[i] * dai) * K[:, i] + (y[j] * daj) * K[:, j]
            changed += 1
        sweeps += 1
        passes = passes + 1 if changed == 0 else 0
    return alpha, b


class SVMClassifier(Classifier):
    """One-vs-rest RBF support vector machines trained with simplified SMO."""

    kind = "SVM"

    def __init__(self, C=1.0, gamma=None, tol=1e-3, max_passes=10, max_iter=500, seed=0):
        if C <= 0:
            raise ValueError("C must be > 0")
        if gamma is not None and gamma <= 0:
            raise ValueError("gamma must be > 0")
        super().__init__(C=C, gamma=gamma, tol=tol, max_passes=max_passes, max_iter=max_iter, seed=seed)
        self.C, self.gamma, self.tol = C, gamma, tol
        self.max_passes, self.max_iter, self.seed = max_passes, max_iter, seed

    def _fit(self, Xs, y):
        self.gamma_ = self.gamma if self.gamma is not None else 1.0 / Xs.shape[1]
        K = rbf_kernel(Xs, Xs, self.gamma_)
        self.machines_ = []
        for c in range(N_CLASSES):
            if not np.any(y == c):
                self.machines_.append(None)
                continue
            yc = np.where(y == c, 1.0, -1.0)
            rng = np.random.default_rng([self.seed, c])
            alpha, b = smo(K, yc, self.C, self.tol, self.max_passes, self.max_iter, rng)
            sv = alpha > 0
            self.machines_.append({"X": Xs[sv], "coef": alpha[sv] * yc[sv], "b": b})

    def _decision(self, Xs):
        out = np.full((len(Xs), N_CLASSES), -np.inf)
        for c, m in enumerate(self.machines_):
            if m is None:
                continue
            if len(m["coef"]) == 0:
                out[:, c] = m["b"]
            else:
                out[:, c] = rbf_kernel(Xs, m["X"], self.gamma_) @ m["coef"] + m["b"]
        return out

    def decision_function(self, X):
        return self._decision(self.standardizer.transform(X))

    def _predict(self, Xs):
        return plurality(self._decision(Xs))

    def get_state(self):
        return {
            "gamma": self.gamma_,
            "machines": [
                None if m is None else {"X": m["X"].tolist(), "coef": m["coef"].tolist(), "b": m["b"]}
                for m in self.machines_
            ],
        }

    def set_state(self, state):
        self.gamma_ = state["gamma"]
        self.machines_ = []
        for m in state["machines"]:
            if m is None:
                self.machines_.append(None)
                continue
            coef = np.asarray(m["coef"], dtype=np.float64)
            X = np.asarray(m["X"], dtype=np.float64).reshape(len(coef), self.n_features)
            self.machines_.append({"X": X, "coef": coef, "b": float(m["b"])})
