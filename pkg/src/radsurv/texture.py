"""Gray-level quantisation, GLCM/Haralick features and LBP histograms.

Haralick output order (14 values)::

    variance, std_dev_x, std_dev_y, homogeneity, contrast, correlation,
    inverse_difference_moment, entropy, sum_average, difference_entropy,
    sum_entropy, inertia, energy, max_probability

``homogeneity`` is sum(P**2), i.e. the angular second moment, and is
therefore numerically identical to ``energy``; ``inertia`` equals
``contrast``. Both pairs are kept so the vector has a fixed 14 slots.
Logs are base 2 and 0 * log 0 is taken as 0.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np

from . import kernels
from .errors import NoInteriorPixels, NoValidPairs

LEVELS = 32
LBP_BINS = 55
# 0, 45, 90 and 135 degrees at distance 1, as (dx, dy) with y pointing down
DEFAULT_OFFSETS = ((1, 0), (1, -1), (0, -1), (-1, -1))
_SIGMA_FLOOR = 1e-12


@dataclass(frozen=True)
class QuantizedROI:
    levels: int
    codes: np.ndarray


@dataclass(frozen=True)
class GLCM:
    levels: int
    counts: np.ndarray
    P: np.ndarray
    px: np.ndarray
    py: np.ndarray
    mu_x: float
    mu_y: float
    sigma_x: float
    sigma_y: float


@dataclass(frozen=True)
class HaralickFeatures:
    variance: float
    std_dev_x: float
    std_dev_y: float
    homogeneity: float
    contrast: float
    correlation: float
    inverse_difference_moment: float
    entropy: float
    sum_average: float
    difference_entropy: float
    sum_entropy: float
    inertia: float
    energy: float
    max_probability: float

    @classmethod
    def names(cls):
        return [f.name for f in fields(cls)]

    def as_array(self):
        return np.array(astuple(self), dtype=np.float64)


@dataclass(frozen=True)
class LBPHistogram:
    bins: np.ndarray


def quantize(roi, levels=LEVELS) -> QuantizedROI:
    """Min-max binning of the ROI's own intensity range into ``levels`` codes."""
    if levels < 2:
        raise ValueError("levels must be >= 2")
    x = np.asarray(getattr(roi, "pixels", roi), dtype=np.float64).ravel()
    lo, hi = x.min(), x.max()
    if hi <= lo:
        return QuantizedROI(levels, np.zeros(x.shape, dtype=np.int32))
    codes = np.floor(levels * (x - lo) / (hi - lo)).astype(np.int64)
    return QuantizedROI(levels, np.minimum(codes, levels - 1).astype(np.int32))


def code_image(q: QuantizedROI, mask2d):
    """Scatter ROI codes back onto the slice grid, -1 outside the mask."""
    mask2d = np.asarray(mask2d, dtype=bool)
    img = np.full(mask2d.shape, -1, dtype=np.int32)
    img[mask2d] = q.codes
    return img


def _entropy(p):
    p = p[p > 0]
    return float(0.0 - (p * np.log2(p)).sum())


def glcm_from_counts(counts) -> GLCM:
    counts = np.asarray(counts, dtype=np.int64)
    total = counts.sum()
    if total == 0:
        raise NoValidPairs("no pixel pair has both members inside the ROI")
    G = counts.shape[0]
    P = counts / total
    px = P.sum(axis=1)
    py = P.sum(axis=0)
    g = np.arange(G, dtype=np.float64)
    mu_x = float(g @ px)
    mu_y = float(g @ py)
    sigma_x = float(np.sqrt(((g - mu_x) ** 2) @ px))
    sigma_y = float(np.sqrt(((g - mu_y) ** 2) @ py))
    return GLCM(G, counts, P, px, py, mu_x, mu_y, sigma_x, sigma_y)


def glcm(q: QuantizedROI, mask2d, offsets=DEFAULT_OFFSETS) -> GLCM:
    """Symmetric co-occurrence matrix pooled over ``offsets``; pairs must lie in the mask."""
    offsets = np.asarray(offsets, dtype=np.int64).reshape(-1, 2)
    if len(offsets) == 0:
        raise ValueError("at least one offset is required")
    counts = kernels.glcm_counts(code_image(q, mask2d), offsets, q.levels)
    return glcm_from_counts(counts)


def haralick(g: GLCM) -> HaralickFeatures:
    P, G = g.P, g.levels
    i, j = np.indices((G, G), dtype=np.float64)
    absdiff = np.abs(i - j).astype(np.intp)
    p_sum = np.bincount((i + j).astype(np.intp).ravel(), weights=P.ravel(), minlength=2 * G - 1)
    p_diff = np.bincount(absdiff.ravel(), weights=P.ravel(), minlength=G)
    k_sum = np.arange(2 * G - 1, dtype=np.float64)
    k_diff = np.arange(G, dtype=np.float64)

    sxy = g.sigma_x * g.sigma_y
    corr = 0.0 if sxy < _SIGMA_FLOOR else float(((i * j * P).sum() - g.mu_x * g.mu_y) / sxy)
    asm = float((P * P).sum())
    contrast = float((k_diff**2) @ p_diff)
    return HaralickFeatures(
        variance=float((((i - g.mu_x) ** 2) * P).sum()),
        std_dev_x=g.sigma_x,
        std_dev_y=g.sigma_y,
        homogeneity=asm,
        contrast=contrast,
        correlation=corr,
        inverse_difference_moment=float((P / (1.0 + (i - j) ** 2)).sum()),
        entropy=_entropy(P.ravel()),
        sum_average=float(k_sum @ p_sum),
        difference_entropy=_entropy(p_diff),
        sum_entropy=_entropy(p_sum),
        inertia=float((((i - j) ** 2) * P).sum()),
        energy=asm,
        max_probability=float(P.max()),
    )


def lbp_histogram(s, mask2d, bins=LBP_BINS) -> LBPHistogram:
    """Normalised histogram of 8-neighbour LBP codes pooled into ``bins`` equal-width bins.

    ``s`` is a :class:`~radsurv.io.Slice2D` or a bare 2-D array. A neighbour
    at least as bright as the centre sets its bit; the top-left neighbour is
    the most significant bit and the rest follow clockwise.
    """
    image = np.asarray(getattr(s, "pixels", s), dtype=np.float64)
    codes = kernels.lbp_codes(image, np.asarray(mask2d, dtype=bool))
    if codes.size == 0:
        raise NoInteriorPixels("no ROI pixel has a full 8-neighbourhood inside the slice")
    pooled = codes * bins // 256
    hist = np.bincount(pooled, minlength=bins).astype(np.float64)
    return LBPHistogram(hist / hist.sum())
