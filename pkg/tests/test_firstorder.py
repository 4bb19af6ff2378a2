import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from radsurv.errors import EmptyROI
from radsurv.firstorder import FirstOrderFeatures, first_order

finite = st.floats(-1e3, 1e3, allow_nan=False)
# multiples of 1/8 keep the oracle's bin arithmetic exact, so values on a bin
# edge land in the same bin in both implementations
dyadic = st.integers(-8000, 8000).map(lambda k: k / 8)


def test_hand_example():
    f = first_order(np.array([1.0, 2.0, 3.0, 4.0]))
    assert (f.mean, f.median, f.variance, f.energy, f.skewness) == (2.5, 2.5, 1.25, 30.0, 0.0)
    assert (f.minimum, f.maximum) == (1.0, 4.0)
    assert f.std_dev == math.sqrt(1.25)


def test_constant_conventions():
    f = first_order(np.full(3, 7.3))
    assert (f.variance, f.skewness, f.kurtosis, f.entropy) == (0.0, 0.0, 0.0, 0.0)
    assert f.mean == 7.3


def test_uniform_entropy_near_five_bits():
    x = np.random.default_rng(0).uniform(0, 1, 10_000)
    assert abs(first_order(x).entropy - 5.0) <= 0.1


def test_kurtosis_is_pearson():
    x = np.random.default_rng(1).normal(size=200_000)
    assert abs(first_order(x).kurtosis - 3.0) < 0.05


def test_empty():
    with pytest.raises(EmptyROI):
        first_order(np.array([]))


def test_names_order():
    assert FirstOrderFeatures.names() == [
        "mean", "median", "variance", "std_dev", "skewness", "kurtosis", "entropy", "energy", "minimum", "maximum"]


@settings(max_examples=150, deadline=None)
@given(arrays(np.float64, st.integers(1, 200), elements=dyadic))
def test_matches_oracle(x):
    got = first_order(x).as_array()
    want = np.array(oracles.first_order(x))
    np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-9)


@settings(max_examples=150, deadline=None)
@given(arrays(np.float64, st.integers(1, 200), elements=finite))
def test_invariants(x):
    f = first_order(x)
    assert f.variance >= 0
    assert f.std_dev == math.sqrt(f.variance)
    assert f.minimum <= f.median <= f.maximum
    assert 0.0 <= f.entropy <= math.log2(32) + 1e-12


@settings(max_examples=150, deadline=None)
@given(arrays(np.float64, st.integers(2, 200), elements=st.floats(-100, 100)), st.floats(-100, 100))
def test_shift_invariance(x, c):
    a, b = first_order(x), first_order(x + c)
    if a.std_dev < 1e-3:
        return  # relative moments are ill-conditioned near constant input
    assert abs(a.variance - b.variance) <= 1e-9 * max(1.0, a.variance)
    assert abs(a.std_dev - b.std_dev) <= 1e-9 * max(1.0, a.std_dev)
    assert abs(a.skewness - b.skewness) <= 1e-6
    assert abs(a.kurtosis - b.kurtosis) <= 1e-6
    assert abs(b.mean - (a.mean + c)) <= 1e-9 * max(1.0, abs(a.mean) + abs(c))
    expected_energy = a.energy + 2 * c * x.sum() + len(x) * c * c
    assert abs(b.energy - expected_energy) <= 1e-9 * max(1.0, abs(expected_energy), a.energy)
