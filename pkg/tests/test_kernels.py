"""The compiled and numpy kernels must agree bit for bit."""

import os
import subprocess
import sys

import numpy as np
import pytest

from radsurv import _kernels_py, kernels
from radsurv.texture import DEFAULT_OFFSETS

BACKENDS = kernels.backends()
needs_cython = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")


def test_fallback_always_available():
    assert BACKENDS["python"] is _kernels_py
    assert kernels.BACKEND in BACKENDS


def test_env_var_forces_fallback():
    out = subprocess.run(
        [sys.executable, "-c", "from radsurv import kernels; print(kernels.BACKEND)"],
        env={**os.environ, "RADSURV_PURE_PYTHON": "1"}, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


@needs_cython
def test_glcm_counts_agree():
    rng = np.random.default_rng(0)
    cy = BACKENDS["cython"]
    for _ in range(50):
        h, w = rng.integers(1, 20, 2)
        G = int(rng.choice([2, 8, 32]))
        codes = rng.integers(0, G, (h, w)).astype(np.int32)
        codes[rng.random((h, w)) < 0.3] = -1
        offsets = np.asarray(DEFAULT_OFFSETS, dtype=np.int64)
        np.testing.assert_array_equal(cy.glcm_counts(codes, offsets, G), _kernels_py.glcm_counts(codes, offsets, G))


@needs_cython
def test_lbp_codes_agree():
    rng = np.random.default_rng(1)
    cy = BACKENDS["cython"]
    for _ in range(50):
        h, w = rng.integers(1, 20, 2)
        img = rng.integers(0, 4, (h, w)).astype(np.float64)  # many ties exercise the >= rule
        mask = rng.random((h, w)) < 0.7
        np.testing.assert_array_equal(cy.lbp_codes(img, mask), _kernels_py.lbp_codes(img, mask))


@needs_cython
def test_best_split_agrees():
    rng = np.random.default_rng(2)
    cy = BACKENDS["cython"]
    for _ in range(100):
        n, F = int(rng.integers(2, 60)), int(rng.integers(1, 8))
        X = np.round(rng.normal(size=(n, F)), int(rng.integers(0, 3)))  # rounding creates ties
        y = rng.integers(0, 3, n).astype(np.intp)
        rows = np.sort(rng.choice(n, size=int(rng.integers(2, n + 1)), replace=True)).astype(np.intp)
        feats = rng.permutation(F).astype(np.intp)
        m = int(rng.integers(1, F + 1))
        a = cy.best_split(X, y, rows, feats, 3, m)
        b = _kernels_py.best_split(X, y, rows, feats, 3, m)
        assert a == b


def test_best_split_none_when_constant():
    X = np.ones((5, 2))
    y = np.array([0, 1, 0, 1, 2], dtype=np.intp)
    for mod in BACKENDS.values():
        assert mod.best_split(X, y, np.arange(5, dtype=np.intp), np.arange(2, dtype=np.intp), 3, 2)[0] == -1


def test_best_split_perfect_threshold():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 0, 1, 1], dtype=np.intp)
    for mod in BACKENDS.values():
        f, thr, _ = mod.best_split(X, y, np.arange(4, dtype=np.intp), np.array([0], dtype=np.intp), 3, 1)
        assert (f, thr) == (0, 1.5)


def test_read_only_inputs_accepted():
    def frozen(a):
        a = np.array(a)
        a.setflags(write=False)
        return a

    codes = frozen(np.arange(16, dtype=np.int32).reshape(4, 4) % 4)
    offsets = frozen(np.asarray(DEFAULT_OFFSETS, dtype=np.int64))
    img, mask = frozen(np.arange(25.0).reshape(5, 5)), frozen(np.ones((5, 5), bool))
    X, y = frozen([[0.0], [1.0], [2.0], [3.0]]), frozen(np.array([0, 0, 1, 1], dtype=np.intp))
    for mod in BACKENDS.values():
        assert mod.glcm_counts(codes, offsets, 4).sum() > 0
        assert len(mod.lbp_codes(img, mask)) == 9  # interior pixels only
        assert mod.best_split(X, y, frozen(np.arange(4, dtype=np.intp)), frozen(np.array([0], dtype=np.intp)), 3, 1)[0] == 0
