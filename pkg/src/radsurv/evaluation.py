"""Cross-validation, metrics, confusion matrices and subject-level voting.

Confusion matrices are indexed ``[predicted, actual]`` (rows = predicted
class). Precision and recall are macro-averaged over the three classes,
with 0/0 counted as 0.
"""

from __future__ import annotations

import csv
import enum
import json
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import classifiers
from .dataset import SurvivalClass
from .errors import EmptyRow, EmptySubject, FoldError, RadsurvError, TooFewPerClass
from .features import feature_group

N_CLASSES = len(SurvivalClass)


class CVMode(str, enum.Enum):
    SLICE = "slice"
    SUBJECT = "subject"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower()
        aliases = {"slicelevel": "slice", "subjectgrouped": "subject", "grouped": "subject"}
        return cls(aliases.get(key.replace("_", "").replace("-", ""), key))


@dataclass(frozen=True)
class FoldPlan:
    n_folds: int
    assignment: np.ndarray
    mode: CVMode
    seed: int | None = None

    def train_test(self, k):
        test = self.assignment == k
        return np.flatnonzero(~test), np.flatnonzero(test)


def _round_robin(groups, labels, n, rng):
    """Stratified assignment: shuffle each class, then deal folds in turn."""
    fold = {}
    counter = 0
    for c in range(N_CLASSES):
        members = [g for g, lab in zip(groups, labels) if lab == c]
        for g in rng.permutation(len(members)):
            fold[members[g]] = counter % n
            counter += 1
    return fold


def make_folds(data, n=10, mode=CVMode.SLICE, seed=0) -> FoldPlan:
    mode = CVMode.parse(mode)
    if n < 2:
        raise ValueError("need at least 2 folds")
    rng = np.random.default_rng(seed)
    if mode is CVMode.SLICE:
        units = list(range(len(data)))
        labels = data.y.tolist()
    else:
        units = data.subjects()
        first = {}
        for sid, lab in zip(data.subject_ids, data.y):
            first.setdefault(sid, int(lab))
        labels = [first[s] for s in units]
    counts = Counter(labels)
    for c, k in sorted(counts.items()):
        if k < n:
            what = "rows" if mode is CVMode.SLICE else "subjects"
            raise TooFewPerClass(f"class {SurvivalClass(c).label} has {k} {what}, fewer than {n} folds")
    fold = _round_robin(units, labels, n, rng)
    if mode is CVMode.SLICE:
        assignment = np.array([fold[i] for i in units], dtype=np.intp)
    else:
        assignment = np.array([fold[s] for s in data.subject_ids], dtype=np.intp)
    return FoldPlan(n, assignment, mode, seed)


def confusion_matrix(predicted, actual):
    cm = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(cm, (np.asarray(predicted, dtype=np.intp), np.asarray(actual, dtype=np.intp)), 1)
    return cm


def _safe_div(a, b):
    return np.divide(a, b, out=np.zeros(len(a)), where=b > 0)


def metrics(cm):
    """(accuracy, macro precision, macro recall) of a [predicted, actual] confusion matrix."""
    cm = np.asarray(cm, dtype=np.float64)
    total = cm.sum()
    diag = np.diag(cm)
    acc = float(diag.sum() / total) if total else 0.0
    precision = float(_safe_div(diag, cm.sum(axis=1)).mean())
    recall = float(_safe_div(diag, cm.sum(axis=0)).mean())
    return acc, precision, recall


def confusion_pct(confusion, allow_empty=False):
    """Row-normalise to percentages (rows are predicted classes).

    An all-zero row raises :class:`EmptyRow`, or becomes NaN with
    ``allow_empty``.
    """
    cm = np.asarray(confusion, dtype=np.float64)
    totals = cm.sum(axis=1, keepdims=True)
    if np.any(totals == 0) and not allow_empty:
        raise EmptyRow(f"row {int(np.flatnonzero(totals.ravel() == 0)[0])} has no entries")
    with np.errstate(invalid="ignore", divide="ignore"):
        return 100.0 * cm / totals


def majority_vote(slice_predictions):
    """Plurality class per subject; ties go to the worst prognosis."""
    out = {}
    for sid, preds in slice_predictions.items():
        preds = list(preds)
        if not preds:
            raise EmptySubject(f"subject {sid!r} has no predicted slices")
        counts = np.bincount(np.asarray([int(p) for p in preds]), minlength=N_CLASSES)
        out[sid] = SurvivalClass(int(np.argmax(counts)))
    return out


@dataclass
class EvalReport:
    model: dict
    mode: str
    n_folds: int
    seed: int
    confusion: np.ndarray
    accuracy: float
    precision: float
    recall: float
    per_fold: list
    subject_votes: dict
    subject_accuracy: float
    predictions: np.ndarray = field(repr=False, default=None)

    @property
    def confusion_pct(self):
        return confusion_pct(self.confusion, allow_empty=True)

    def to_dict(self):
        pct = self.confusion_pct
        return {
            "model": self.model,
            "cv_mode": self.mode,
            "n_folds": self.n_folds,
            "seed": self.seed,
            "n_rows": int(self.confusion.sum()),
            "averaging": "macro",
            "confusion_orientation": "rows=predicted, columns=actual",
            "classes": [c.label for c in SurvivalClass],
            "confusion": self.confusion.tolist(),
            "confusion_pct": [[None if np.isnan(v) else round(float(v), 2) for v in row] for row in pct],
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "per_fold": self.per_fold,
            "subject_votes": {k: v.label for k, v in sorted(self.subject_votes.items())},
            "subject_accuracy": self.subject_accuracy,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self):
        labels = [c.label for c in SurvivalClass]
        lines = [
            f"model: {self.model['kind']} {json.dumps(self.model['hyperparams'], sort_keys=True)}",
            f"cross-validation: {self.n_folds}-fold, {self.mode}-level, seed {self.seed}",
            f"rows evaluated: {int(self.confusion.sum())}",
            "",
            f"accuracy   {self.accuracy:.3f}",
            f"precision  {self.precision:.3f}  (macro)",
            f"recall     {self.recall:.3f}  (macro)",
            f"subject-wise accuracy (majority vote)  {self.subject_accuracy:.3f}",
            "",
            "confusion (%), rows = predicted, columns = actual",
            f"{'':>8}" + "".join(f"{lab:>9}" for lab in labels),
        ]
        for lab, row in zip(labels, self.confusion_pct):
            cells = "".join(f"{'-':>9}" if np.isnan(v) else f"{v:9.2f}" for v in row)
            lines.append(f"{lab:>8}{cells}")
        return "\n".join(lines) + "\n"


def cross_validate(spec, data, plan: FoldPlan) -> EvalReport:
    predictions = np.full(len(data), -1, dtype=np.intp)
    per_fold = []
    for k in range(plan.n_folds):
        train, test = plan.train_test(k)
        if plan.mode is CVMode.SUBJECT:
            overlap = set(data.subject_ids[train]) & set(data.subject_ids[test])
            if overlap:
                raise FoldError(k, f"subject leakage between train and test: {sorted(overlap)[:5]}")
        if len(test) == 0:
            continue
        try:
            model = classifiers.fit(spec, X=data.X[train], y=data.y[train])
            predictions[test] = classifiers.predict(model, data.X[test])
        except RadsurvError as exc:
            raise FoldError(k, exc) from exc
        acc, prec, rec = metrics(confusion_matrix(predictions[test], data.y[test]))
        per_fold.append({"fold": k, "n_test": int(len(test)), "accuracy": acc, "precision": prec, "recall": rec})

    cm = confusion_matrix(predictions, data.y)
    acc, prec, rec = metrics(cm)
    by_subject = {}
    truth = {}
    for sid, p, lab in zip(data.subject_ids, predictions, data.y):
        by_subject.setdefault(sid, []).append(int(p))
        truth.setdefault(sid, int(lab))
    votes = majority_vote(by_subject)
    subj_acc = float(np.mean([int(votes[s]) == truth[s] for s in votes])) if votes else 0.0
    return EvalReport(
        model={"kind": spec.kind, "hyperparams": dict(spec.hyperparams)},
        mode=plan.mode.value,
        n_folds=plan.n_folds,
        seed=plan.seed,
        confusion=cm,
        accuracy=acc,
        precision=prec,
        recall=rec,
        per_fold=per_fold,
        subject_votes=votes,
        subject_accuracy=subj_acc,
        predictions=predictions,
    )


def write_importance_csv(names, scores, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature_name", "group", "score"])
        for name, s in zip(names, scores):
            w.writerow([name, feature_group(name), repr(float(s))])
