import numpy as np

from radsurv.features import FeatureConfig, feature_group, feature_names, roi_features
from radsurv.io import Modality, Slice2D
from radsurv.preprocess import extract_roi, zscore_slice


def _roi(seed=0):
    rng = np.random.default_rng(seed)
    img = rng.normal(100, 20, (40, 40))
    yy, xx = np.mgrid[:40, :40]
    mask = ((xx - 20) ** 2 + (yy - 18) ** 2 <= 100).astype(np.uint8)
    s = zscore_slice(Slice2D(40, 40, img, 7))
    return extract_roi(s, mask, "S", Modality.FLAIR)


def test_default_layout_is_90():
    names = feature_names()
    groups = [feature_group(n) for n in names]
    assert len(names) == 90
    assert [groups.count(g) for g in ("firstorder", "shape", "haralick", "lbp")] == [10, 11, 14, 55]
    assert names[:2] == ["fo_mean", "fo_median"] and names[-1] == "lbp_54"
    assert len(set(names)) == 90


def test_fourier_block_optional():
    names = feature_names(FeatureConfig(fourier=True))
    assert len(names) == 100 and names[-1] == "fd_10"
    assert feature_group("fd_03") == "fourier" and feature_group("age") == "clinical"


def test_roi_vector():
    roi = _roi()
    v = roi_features(roi)
    assert v.shape == (90,) and np.isfinite(v).all()
    assert abs(v[-55:].sum() - 1.0) < 1e-12
    vf = roi_features(roi, FeatureConfig(fourier=True))
    np.testing.assert_array_equal(vf[:90], v)
    assert vf[90] == 1.0
