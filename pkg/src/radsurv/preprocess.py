"""Intensity normalisation and per-slice tumour ROI extraction.

Bias field correction happens upstream (BraTS ships corrected volumes).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateSlice, DimMismatch
from .io import Modality, Slice2D, Volume3D

MIN_ROI_PIXELS = 50
_STD_FLOOR = 1e-12


@dataclass(frozen=True)
class SliceROI:
    """Tumour pixels of one axial slice of one modality.

    ``pixels`` are the masked intensities in scan order; ``image`` keeps the
    full normalised slice because LBP codes look at neighbours outside the
    tumour.
    """

    pixels: np.ndarray
    mask2d: np.ndarray
    image: np.ndarray
    modality: Modality | None
    subject_id: str
    z_index: int


def zscore_slice(s: Slice2D) -> Slice2D:
    """Subtract the slice mean and divide by its population std."""
    px = np.asarray(s.pixels, dtype=np.float64)
    mu = px.mean()
    sd = px.std()
    if sd < _STD_FLOOR:
        raise DegenerateSlice(f"slice z={s.z_index} is constant")
    return replace(s, pixels=(px - mu) / sd)


def zscore_volume(vol: Volume3D) -> Volume3D:
    """Per-volume variant of :func:`zscore_slice` (one mean/std for all voxels)."""
    mu = vol.data.mean()
    sd = vol.data.std()
    if sd < _STD_FLOOR:
        raise DegenerateSlice("volume is constant")
    return Volume3D(vol.dims, vol.spacing, (vol.data - mu) / sd, vol.modality)


def extract_roi(s, mask_slice, subject, modality=None, min_roi_pixels=MIN_ROI_PIXELS):
    """Apply the complete-tumour mask (any nonzero label) to a slice.

    Returns ``None`` when the slice holds fewer than ``min_roi_pixels``
    tumour pixels so the caller can skip it.
    """
    mask_slice = np.asarray(mask_slice)
    if mask_slice.shape != s.pixels.shape:
        raise DimMismatch(f"slice shape {s.pixels.shape} != mask shape {mask_slice.shape}")
    mask2d = mask_slice != 0
    n = int(np.count_nonzero(mask2d))
    if n == 0 or n < min_roi_pixels:
        return None
    image = np.asarray(s.pixels, dtype=np.float64)
    return SliceROI(
        pixels=image[mask2d],
        mask2d=mask2d,
        image=image,
        modality=modality,
        subject_id=str(subject),
        z_index=s.z_index,
    )
