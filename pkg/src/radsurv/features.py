"""Assemble the per-slice radiomic vector.

Default layout (90 values): 10 first-order, 11 shape, 14 Haralick and 55 LBP
features, in that order. Fourier descriptors are an optional trailing block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .firstorder import FirstOrderFeatures, first_order
from .shape import FOURIER_K, ShapeFeatures, fourier_descriptor, largest_component, shape_features, trace_boundary
from .texture import DEFAULT_OFFSETS, LBP_BINS, LEVELS, HaralickFeatures, glcm, haralick, lbp_histogram, quantize

GROUPS = ("firstorder", "shape", "haralick", "lbp", "fourier", "clinical")


@dataclass(frozen=True)
class FeatureConfig:
    levels: int = LEVELS
    offsets: tuple = DEFAULT_OFFSETS
    lbp_bins: int = LBP_BINS
    fourier: bool = False
    fourier_k: int = FOURIER_K


def feature_names(config=FeatureConfig()):
    names = ["fo_" + n for n in FirstOrderFeatures.names()]
    names += ["shape_" + n for n in ShapeFeatures.names()]
    names += ["har_" + n for n in HaralickFeatures.names()]
    names += [f"lbp_{b:02d}" for b in range(config.lbp_bins)]
    if config.fourier:
        names += [f"fd_{k:02d}" for k in range(1, config.fourier_k + 1)]
    return names


def feature_group(name):
    prefix = name.split("_", 1)[0]
    return {
        "fo": "firstorder",
        "shape": "shape",
        "har": "haralick",
        "lbp": "lbp",
        "fd": "fourier",
    }.get(prefix, "clinical")


def roi_features(roi, config=FeatureConfig()):
    """Radiomic vector of one :class:`~radsurv.preprocess.SliceROI`.

    Raises the texture/shape errors (``NoValidPairs``, ``NoInteriorPixels``,
    ``ContourTooShort``) so the caller can skip the slice.
    """
    parts = [first_order(roi).as_array(), shape_features(roi.mask2d).as_array()]
    q = quantize(roi, config.levels)
    parts.append(haralick(glcm(q, roi.mask2d, config.offsets)).as_array())
    parts.append(lbp_histogram(roi.image, roi.mask2d, config.lbp_bins).bins)
    if config.fourier:
        contour = trace_boundary(largest_component(roi.mask2d))
        parts.append(fourier_descriptor(contour, config.fourier_k).magnitudes)
    return np.concatenate(parts)


@dataclass(frozen=True)
class SliceFeatures:
    subject_id: str
    z_index: int
    modality: str
    values: np.ndarray = field(repr=False)
