"""CART decision trees (Gini) and a bagged random forest."""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from .. import kernels
from ..errors import DimensionMismatch, NotAForest
from .base import N_CLASSES, Classifier, plurality

_PERM_STREAM = 7919


class Tree:
    """Flat array representation; ``feature == -1`` marks a leaf."""

    def __init__(self, feature, threshold, left, right, counts):
        self.feature = np.asarray(feature, dtype=np.intp)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.intp)
        self.right = np.asarray(right, dtype=np.intp)
        self.counts = np.asarray(counts, dtype=np.int64).reshape(len(self.feature), N_CLASSES)
        self.leaf_class = plurality(self.counts)

    @property
    def n_nodes(self):
        return len(self.feature)

    @property
    def n_splits(self):
        return int(np.count_nonzero(self.feature >= 0))

    def used_features(self):
        return set(self.feature[self.feature >= 0].tolist())

    def apply(self, X):
        node = np.zeros(len(X), dtype=np.intp)
        rows = np.arange(len(X))
        while True:
            f = self.feature[node]
            inner = f >= 0
            if not inner.any():
                return node
            r, n, fi = rows[inner], node[inner], f[inner]
            go_left = X[r, fi] <= self.threshold[n]
            node[inner] = np.where(go_left, self.left[n], self.right[n])

    def predict(self, X):
        return self.leaf_class[self.apply(X)]

    def to_dict(self):
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "counts": self.counts.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["feature"], d["threshold"], d["left"], d["right"], d["counts"])


def grow_tree(X, y, rows, max_splits=None, features_per_node=None, rng=None):
    """Grow a Gini CART tree breadth-first.

    Nodes are split in FIFO order until ``max_splits`` internal nodes exist
    (``None`` grows until every leaf is pure or unsplittable). With
    ``features_per_node`` set, each node draws a random feature order and
    evaluates at least that many features, continuing down the order only
    while no valid split has been found.
    """
    n_feat = X.shape[1]
    feature, threshold, left, right, counts = [], [], [], [], []

    def new_node(node_rows):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        counts.append(np.bincount(y[node_rows], minlength=N_CLASSES))
        return len(feature) - 1

    queue = deque([(new_node(rows), np.asarray(rows, dtype=np.intp))])
    splits = 0
    while queue and (max_splits is None or splits < max_splits):
        node, node_rows = queue.popleft()
        if len(node_rows) < 2 or np.count_nonzero(counts[node]) < 2:
            continue
        if features_per_node is None:
            order, need = range(n_feat), n_feat
        else:
            order, need = rng.permutation(n_feat).tolist(), features_per_node
        f, t, _ = kernels.best_split(X, y, node_rows, order, N_CLASSES, need)
        if f < 0:
            continue
        go_left = X[node_rows, f] <= t
        lrows, rrows = node_rows[go_left], node_rows[~go_left]
        feature[node], threshold[node] = f, t
        left[node] = new_node(lrows)
        right[node] = new_node(rrows)
        queue.append((left[node], lrows))
        queue.append((right[node], rrows))
        splits += 1
    return Tree(feature, threshold, left, right, np.array(counts))


class DecisionTreeClassifier(Classifier):
    kind = "DT"

    def __init__(self, max_splits=10, criterion="gini"):
        if max_splits is not None and max_splits < 1:
            raise ValueError("max_splits must be >= 1")
        if criterion != "gini":
            raise ValueError("only the Gini criterion is implemented")
        super().__init__(max_splits=max_splits, criterion=criterion)
        self.max_splits = max_splits

    def _fit(self, Xs, y):
        self.tree_ = grow_tree(np.ascontiguousarray(Xs), y, np.arange(len(y)), self.max_splits)

    def _predict(self, Xs):
        return self.tree_.predict(Xs)

    def get_state(self):
        return {"tree": self.tree_.to_dict()}

    def set_state(self, state):
        self.tree_ = Tree.from_dict(state["tree"])


class RandomForestClassifier(Classifier):
    """Bootstrap-aggregated, fully grown CART trees.

    Tree ``t`` draws its bootstrap sample and per-node feature orders from
    ``numpy.random.default_rng([seed, t])``, so the forest is reproducible
    regardless of training order.
    """

    kind = "RF"

    def __init__(self, n_trees=30, features_per_node=None, seed=0):
        if n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        super().__init__(n_trees=n_trees, features_per_node=features_per_node, seed=seed)
        self.n_trees = n_trees
        self.features_per_node = features_per_node
        self.seed = seed

    def _fit(self, Xs, y):
        Xs = np.ascontiguousarray(Xs)
        n, p = Xs.shape
        m = self.features_per_node or math.ceil(math.sqrt(p))
        self.m_ = min(m, p)
        self.n_train_ = n
        self.trees_, self.oob_ = [], []
        for t in range(self.n_trees):
            rng = np.random.default_rng([self.seed, t])
            boot = rng.integers(0, n, n)
            inbag = np.zeros(n, dtype=bool)
            inbag[boot] = True
            self.oob_.append(np.flatnonzero(~inbag))
            self.trees_.append(grow_tree(Xs, y, np.sort(boot), None, self.m_, rng))

    def votes(self, Xs):
        v = np.zeros((len(Xs), N_CLASSES), dtype=np.int64)
        rows = np.arange(len(Xs))
        for tree in self.trees_:
            np.add.at(v, (rows, tree.predict(Xs)), 1)
        return v

    def _predict(self, Xs):
        return plurality(self.votes(Xs))

    def get_state(self):
        return {
            "m": self.m_,
            "n_train": self.n_train_,
            "trees": [t.to_dict() for t in self.trees_],
            "oob": [o.tolist() for o in self.oob_],
        }

    def set_state(self, state):
        self.m_ = state["m"]
        self.n_train_ = state["n_train"]
        self.trees_ = [Tree.from_dict(d) for d in state["trees"]]
        self.oob_ = [np.asarray(o, dtype=np.intp) for o in state["oob"]]


def oob_permutation_deltas(forest, X, y):
    """(n_trees, n_features) increase in each tree's OOB error after permuting a feature.

    Features a tree never splits on get 0 without evaluation, since
    permuting them cannot change that tree's predictions.
    """
    Xs = forest.standardizer.transform(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.intp)
    deltas = np.zeros((len(forest.trees_), Xs.shape[1]))
    for t, (tree, oob) in enumerate(zip(forest.trees_, forest.oob_)):
        if len(oob) == 0:
            continue
        Xo, yo = Xs[oob], y[oob]
        base = np.mean(tree.predict(Xo) != yo)
        rng = np.random.default_rng([forest.seed, t, _PERM_STREAM])
        for j in sorted(tree.used_features()):
            Xp = Xo.copy()
            Xp[:, j] = Xo[rng.permutation(len(oob)), j]
            deltas[t, j] = np.mean(tree.predict(Xp) != yo) - base
    return deltas[[len(o) > 0 for o in forest.oob_]]


def rf_oob_importance(model, data=None, X=None, y=None):
    """Out-of-bag permutation importance of every feature.

    Score = mean over trees of the OOB error increase, divided by its
    (population) standard deviation over trees; 0 when that deviation is
    below 1e-12. ``data`` must be the dataset the forest was trained on.
    """
    if not isinstance(model, RandomForestClassifier):
        raise NotAForest(f"importance needs a random forest, got {getattr(model, 'kind', type(model).__name__)}")
    if data is not None:
        X, y = data.X, data.y
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] != model.n_train_:
        raise DimensionMismatch(f"forest was trained on {model.n_train_} rows, got {X.shape[0]}")
    if X.shape[1] != model.n_features:
        raise DimensionMismatch(f"forest expects {model.n_features} features, got {X.shape[1]}")
    deltas = oob_permutation_deltas(model, X, y)
    if len(deltas) == 0:
        return np.zeros(X.shape[1])
    mean = deltas.mean(axis=0)
    sd = deltas.std(axis=0)
    safe = np.where(sd < 1e-12, 1.0, sd)
    return np.where(sd < 1e-12, 0.0, mean / safe)
