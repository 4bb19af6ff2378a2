"""First-order intensity statistics of a tumour ROI."""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np

from .errors import EmptyROI

HIST_BINS = 32
_SIGMA_FLOOR = 1e-12


@dataclass(frozen=True)
class FirstOrderFeatures:
    mean: float
    median: float
    variance: float
    std_dev: float
    skewness: float
    kurtosis: float
    entropy: float
    energy: float
    minimum: float
    maximum: float

    @classmethod
    def names(cls):
        return [f.name for f in fields(cls)]

    def as_array(self):
        return np.array(astuple(self), dtype=np.float64)


def histogram_entropy(x, bins=HIST_BINS):
    """Shannon entropy (bits) of a ``bins``-bin histogram spanning [min, max]."""
    lo, hi = x.min(), x.max()
    if hi <= lo:
        return 0.0
    # direct binning; np.histogram refuses ranges narrower than 32 ulps
    idx = np.minimum(np.floor((x - lo) / (hi - lo) * bins).astype(np.int64), bins - 1)
    counts = np.bincount(idx, minlength=bins)
    p = counts[counts > 0] / x.size
    return float(-(p * np.log2(p)).sum())


def first_order(roi) -> FirstOrderFeatures:
    """Ten first-order statistics over ``roi.pixels`` (or any 1-D array).

    Variance is the population variance; kurtosis is Pearson's (not excess).
    Skewness and kurtosis are 0 for a constant ROI.
    """
    x = np.asarray(getattr(roi, "pixels", roi), dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptyROI("ROI has no pixels")
    if x.min() == x.max():
        mu = x[0]
    else:
        mu = x.mean()
    d = x - mu
    var = float(np.mean(d * d))
    sd = float(np.sqrt(var))
    if sd < _SIGMA_FLOOR:
        skew = kurt = 0.0
    else:
        skew = float(np.mean(d**3) / sd**3)
        kurt = float(np.mean(d**4) / var**2)
    return FirstOrderFeatures(
        mean=float(mu),
        median=float(np.median(x)),
        variance=var,
        std_dev=sd,
        skewness=skew,
        kurtosis=kurt,
        entropy=histogram_entropy(x),
        energy=float(np.dot(x, x)),
        minimum=float(x.min()),
        maximum=float(x.max()),
    )
