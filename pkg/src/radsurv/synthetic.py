"""Synthetic data: Gaussian blob datasets and BraTS-layout MR phantoms."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from scipy import ndimage

from .dataset import Dataset
from .io import Modality, save_nifti

# one survival-class-indicative day count per class
_CLASS_DAYS = {0: (60, 590), 1: (600, 1290), 2: (1300, 1767)}
MODALITY_SUFFIX = {Modality.T1: "t1", Modality.T1CE: "t1ce", Modality.T2: "t2", Modality.FLAIR: "flair"}
MASK_SUFFIX = "seg"


def make_blobs(n_rows=300, n_features=91, n_informative=5, sigma=0.1, seed=0, rows_per_subject=10):
    """Three balanced classes separated only in the first ``n_informative`` columns.

    Class means sit on an equilateral triangle whose plane is spread evenly
    over the informative columns (column d of class c is
    cos(2 pi c / 3 - pi d / n_informative)), so every column has the same
    between-class spread and every class pair is equally far apart after
    per-feature standardisation. Informative columns get N(0, sigma) jitter;
    the remaining columns are N(0, 1) noise. Rows are grouped into
    pseudo-subjects of ``rows_per_subject`` consecutive same-class rows.
    """
    rng = np.random.default_rng(seed)
    y = np.repeat(np.arange(3), -(-n_rows // 3))[:n_rows]
    c = np.arange(3)[:, None]
    d = np.arange(n_informative)[None, :]
    signature = np.cos(2 * np.pi * c / 3 - np.pi * d / n_informative)
    X = rng.normal(size=(n_rows, n_features))
    X[:, :n_informative] = signature[y] + sigma * rng.normal(size=(n_rows, n_informative))
    subject = np.arange(n_rows) // rows_per_subject
    names = [f"inf_{i}" for i in range(n_informative)] + [f"noise_{i}" for i in range(n_features - n_informative)]
    return Dataset(
        subject_ids=[f"S{s:03d}" for s in subject],
        z_index=np.arange(n_rows) % rows_per_subject,
        X=X,
        y=y,
        feature_names=names,
    )


def _tumour_labels(shape, rng, scale):
    """Nested BraTS-style labels: 2 (oedema) around 4 (enhancing) around 1 (necrosis)."""
    nz, ny, nx = shape
    z, yy, xx = np.mgrid[0:nz, 0:ny, 0:nx].astype(np.float64)
    cz, cy, cx = nz / 2, ny / 2 + rng.uniform(-3, 3), nx / 2 + rng.uniform(-3, 3)
    ry, rx = scale * rng.uniform(0.8, 1.2), scale * rng.uniform(0.8, 1.2)
    rz = nz * 0.38
    bump = ndimage.gaussian_filter(rng.normal(size=shape), 2.0)
    bump /= np.abs(bump).max() + 1e-12
    r = np.sqrt(((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 + ((z - cz) / rz) ** 2) + 0.25 * bump
    labels = np.zeros(shape, dtype=np.uint8)
    labels[r <= 1.0] = 2
    labels[r <= 0.7] = 4
    labels[r <= 0.35] = 1
    return labels


def phantom_subject(rng, cls, shape=(16, 64, 64)):
    """Four modality volumes plus a label volume for one synthetic subject.

    Tumour size and texture roughness depend on the survival class so the
    downstream classifiers have something to learn.
    """
    labels = _tumour_labels(shape, rng, scale=(14.0, 11.0, 8.0)[cls])
    brain = ndimage.gaussian_filter(rng.normal(size=shape), 3.0)
    vols = {}
    base = {Modality.T1: 600.0, Modality.T1CE: 700.0, Modality.T2: 900.0, Modality.FLAIR: 800.0}
    gain = {Modality.T1: (-80, -40, -60), Modality.T1CE: (-50, 300, 40),
            Modality.T2: (400, 100, 250), Modality.FLAIR: (150, 120, 350)}
    roughness = (60.0, 35.0, 15.0)[cls]
    for m in Modality:
        v = base[m] + 120.0 * brain
        necro, enh, oed = gain[m]
        v = v + np.select([labels == 1, labels == 4, labels == 2], [necro, enh, oed], 0.0)
        v = v + roughness * rng.normal(size=shape) * (labels > 0)
        v = v + 10.0 * rng.normal(size=shape)
        vols[m] = np.clip(v, 0, None).astype(np.float32)
    return vols, labels


def generate_phantoms(out_dir, n_subjects=4, seed=0, shape=(16, 64, 64)):
    """Write ``n_subjects`` BraTS-layout subjects and ``survival_data.csv`` to ``out_dir``.

    Subject ``i`` gets survival class ``i % 3``. Returns the subject IDs.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    rows = []
    ids = []
    for i in range(n_subjects):
        sid = f"Phantom_{i:03d}"
        cls = i % 3
        vols, labels = phantom_subject(rng, cls, shape)
        sdir = out / sid
        sdir.mkdir(exist_ok=True)
        for m, v in vols.items():
            save_nifti(sdir / f"{sid}_{MODALITY_SUFFIX[m]}.nii.gz", v)
        save_nifti(sdir / f"{sid}_{MASK_SUFFIX}.nii.gz", labels)
        lo, hi = _CLASS_DAYS[cls]
        rows.append([sid, f"{rng.uniform(19, 86):.3f}", str(int(rng.integers(lo, hi + 1))), "GTR"])
        ids.append(sid)
    with open(out / "survival_data.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["BraTS19ID", "Age", "Survival", "ResectionStatus"])
        w.writerows(rows)
    return ids


