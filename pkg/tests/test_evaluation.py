import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radsurv.classifiers import ModelSpec
from radsurv.dataset import Dataset, SurvivalClass
from radsurv.errors import EmptyRow, EmptySubject, FoldError, TooFewPerClass
from radsurv.evaluation import (
    CVMode,
    FoldPlan,
    confusion_matrix,
    confusion_pct,
    cross_validate,
    make_folds,
    majority_vote,
    metrics,
    write_importance_csv,
)
from radsurv.synthetic import make_blobs

S, M, L = SurvivalClass


def _subjects(n_subjects, rows_per=3, seed=0):
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 3, n_subjects)
    labels[:3] = [0, 1, 2]
    sids = np.repeat([f"P{i:03d}" for i in range(n_subjects)], rows_per)
    return Dataset(sids, np.tile(np.arange(rows_per), n_subjects), rng.normal(size=(len(sids), 2)),
                   np.repeat(labels, rows_per), ["a", "b"])


def test_subject_fold_sizes_166():
    plan = make_folds(_subjects(166, seed=4), 10, CVMode.SUBJECT, seed=0)
    data = _subjects(166, seed=4)
    sizes = sorted(len(set(data.subject_ids[plan.train_test(k)[1]])) for k in range(10))
    assert sizes == [16] * 4 + [17] * 6


def test_too_few_per_class():
    data = Dataset(["a"] * 25, range(25), np.zeros((25, 1)), [0] * 10 + [1] * 10 + [2] * 5, ["x"])
    with pytest.raises(TooFewPerClass):
        make_folds(data, 10, CVMode.SLICE)


def test_same_seed_same_assignment():
    data = make_blobs(seed=3)
    a, b = make_folds(data, 10, "slice", seed=9), make_folds(data, 10, "slice", seed=9)
    np.testing.assert_array_equal(a.assignment, b.assignment)
    assert not np.array_equal(a.assignment, make_folds(data, 10, "slice", seed=10).assignment)


@settings(max_examples=30, deadline=None)
@given(st.integers(30, 80), st.integers(2, 10), st.integers(0, 1000), st.sampled_from(list(CVMode)))
def test_partitions(n_subjects, n_folds, seed, mode):
    data = _subjects(n_subjects, seed=seed)
    try:
        plan = make_folds(data, n_folds, mode, seed)
    except TooFewPerClass:
        return
    assert plan.assignment.min() >= 0 and plan.assignment.max() < n_folds
    tests = np.concatenate([plan.train_test(k)[1] for k in range(n_folds)])
    assert sorted(tests.tolist()) == list(range(len(data)))
    for k in range(n_folds):
        train, test = plan.train_test(k)
        assert len(np.intersect1d(train, test)) == 0
        if mode is CVMode.SUBJECT:
            assert not set(data.subject_ids[train]) & set(data.subject_ids[test])
    # stratification: per-class fold counts differ by at most one
    units = data.y if mode is CVMode.SLICE else np.array([data.y[data.subject_ids == s][0] for s in data.subjects()])
    folds = plan.assignment if mode is CVMode.SLICE else np.array(
        [plan.assignment[data.subject_ids == s][0] for s in data.subjects()])
    for c in range(3):
        counts = np.bincount(folds[units == c], minlength=n_folds)
        assert counts.max() - counts.min() <= 1


def test_identity_confusion_metrics():
    cm = confusion_matrix([0, 1, 2, 2], [0, 1, 2, 2])
    assert metrics(cm) == (1.0, 1.0, 1.0)


def test_confusion_orientation_and_macro():
    cm = confusion_matrix(predicted=[0, 0, 1, 2], actual=[0, 1, 1, 2])
    assert cm.tolist() == [[1, 1, 0], [0, 1, 0], [0, 0, 1]]
    acc, prec, rec = metrics(cm)
    assert acc == 0.75
    assert prec == pytest.approx((0.5 + 1 + 1) / 3)
    assert rec == pytest.approx((1 + 0.5 + 1) / 3)


def test_confusion_pct():
    np.testing.assert_array_equal(confusion_pct(np.diag([10, 10, 10])), np.diag([100.0] * 3))
    row = confusion_pct([[7652, 904, 1444], [1, 0, 0], [0, 0, 1]])[0]
    assert abs(row.sum() - 100) < 0.01 and [round(v, 2) for v in row] == [76.52, 9.04, 14.44]
    with pytest.raises(EmptyRow):
        confusion_pct([[1, 0, 0], [0, 0, 0], [0, 0, 1]])
    assert np.isnan(confusion_pct([[1, 0, 0], [0, 0, 0], [0, 0, 1]], allow_empty=True)[1]).all()


def test_majority_vote():
    votes = majority_vote({"a": [S, S, L], "b": [S, L], "c": [M] * 7, "d": [M, L]})
    assert votes == {"a": S, "b": S, "c": M, "d": M}
    with pytest.raises(EmptySubject):
        majority_vote({"e": []})


def test_cross_validate_blobs():
    data = make_blobs(seed=0)
    report = cross_validate(ModelSpec("RF"), data, make_folds(data, 10, "subject", seed=0))
    assert report.accuracy >= 0.95
    assert report.confusion.sum() == len(data)
    assert len(report.per_fold) == 10
    assert set(report.subject_votes) == set(data.subjects())
    d = json.loads(report.to_json())
    assert d["cv_mode"] == "subject" and d["averaging"] == "macro"
    assert "rows = predicted" in report.to_text()


def test_shuffled_labels_near_chance():
    data = make_blobs(seed=0)
    accs = []
    for seed in range(3):
        shuffled = data.subset(np.arange(len(data)))
        shuffled.y[:] = np.random.default_rng(seed).permutation(data.y)
        accs.append(cross_validate(ModelSpec("DT"), shuffled, make_folds(shuffled, 10, "slice", seed)).accuracy)
    assert all(0.20 <= a <= 0.47 for a in accs)


def test_fold_error_wraps_cause():
    # fold 0 trains on row 3 alone, a single class
    data = Dataset(["a", "b", "c", "d"], range(4), np.arange(4.0)[:, None], [0, 0, 0, 1], ["x"])
    plan = FoldPlan(2, np.array([0, 0, 0, 1]), CVMode.SLICE, 0)
    with pytest.raises(FoldError) as err:
        cross_validate(ModelSpec("KNN"), data, plan)
    assert err.value.fold == 0


def test_leakage_detected():
    data = Dataset(["a", "a", "b", "b"], range(4), np.arange(4.0)[:, None], [0, 0, 1, 1], ["x"])
    with pytest.raises(FoldError):
        cross_validate(ModelSpec("KNN"), data, FoldPlan(2, np.array([0, 1, 0, 1]), CVMode.SUBJECT, 0))


def test_importance_csv(tmp_path):
    write_importance_csv(["fo_mean", "har_entropy", "lbp_03", "shape_area", "age"], [0.5, 1, 2, 3, 4], tmp_path / "i.csv")
    rows = list(csv.reader(open(tmp_path / "i.csv")))
    assert rows[0] == ["feature_name", "group", "score"]
    assert [r[1] for r in rows[1:]] == ["firstorder", "haralick", "lbp", "shape", "clinical"]
