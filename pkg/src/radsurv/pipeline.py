"""Run configuration and the volume -> per-slice feature pipeline."""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .dataset import DEFAULT_THRESHOLDS
from .errors import ContourTooShort, DegenerateSlice, DimMismatch, NoInteriorPixels, NoValidPairs, RadsurvError
from .features import FeatureConfig, SliceFeatures, feature_names, roi_features
from .io import Modality, axial_slice, load_mask, load_volume
from .preprocess import MIN_ROI_PIXELS, extract_roi, zscore_slice, zscore_volume
from .synthetic import MASK_SUFFIX, MODALITY_SUFFIX
from .texture import DEFAULT_OFFSETS, LBP_BINS, LEVELS

log = logging.getLogger(__name__)

_SKIPPABLE = (DegenerateSlice, NoValidPairs, NoInteriorPixels, ContourTooShort)
_EXTENSIONS = (".nii.gz", ".nii", ".raw")


class ConfigError(RadsurvError):
    pass


@dataclass
class RunConfig:
    data_root: str | None = None
    clinical_csv: str | None = None
    modalities: list = field(default_factory=lambda: [m.value for m in Modality])
    levels: int = LEVELS
    offsets: list = field(default_factory=lambda: [list(o) for o in DEFAULT_OFFSETS])
    lbp_bins: int = LBP_BINS
    fourier: bool = False
    min_roi_pixels: int = MIN_ROI_PIXELS
    normalization: str = "slice"
    thresholds: list = field(default_factory=lambda: list(DEFAULT_THRESHOLDS))
    model: dict = field(default_factory=lambda: {"kind": "RF", "hyperparams": {}})
    cv: dict = field(default_factory=lambda: {"mode": "slice", "folds": 10, "seed": 0})
    output_dir: str = "out"
    threads: int = 1

    @classmethod
    def load(cls, path):
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw):
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**raw)
        cfg.validate(check_paths=False)
        return cfg

    def merged(self, **overrides):
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def validate(self, check_paths=True):
        try:
            for m in self.modalities:
                Modality.parse(m)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.modalities:
            raise ConfigError("modalities must not be empty")
        if self.levels < 2 or self.lbp_bins < 1 or self.min_roi_pixels < 1 or self.threads < 1:
            raise ConfigError("levels >= 2, lbp_bins >= 1, min_roi_pixels >= 1 and threads >= 1 are required")
        if len(self.thresholds) != 2 or not 0 < self.thresholds[0] < self.thresholds[1]:
            raise ConfigError(f"thresholds must be two strictly increasing positive values, got {self.thresholds}")
        if self.normalization not in ("slice", "volume"):
            raise ConfigError("normalization must be 'slice' or 'volume'")
        if not self.offsets or any(len(o) != 2 for o in self.offsets):
            raise ConfigError("offsets must be a non-empty list of [dx, dy] pairs")
        if check_paths:
            if self.data_root is None or not Path(self.data_root).is_dir():
                raise ConfigError(f"data_root {self.data_root!r} is not a directory")
            if not Path(self.clinical_path()).is_file():
                raise ConfigError(f"clinical CSV {self.clinical_path()} not found")
        return self

    def clinical_path(self):
        if self.clinical_csv is not None:
            return Path(self.clinical_csv)
        return Path(self.data_root) / "survival_data.csv"

    def feature_config(self):
        return FeatureConfig(
            levels=self.levels,
            offsets=tuple(tuple(o) for o in self.offsets),
            lbp_bins=self.lbp_bins,
            fourier=self.fourier,
        )

    def to_dict(self):
        return asdict(self)

    def digest(self):
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()


def find_file(subject_dir, subject_id, suffix):
    subject_dir = Path(subject_dir)
    for ext in _EXTENSIONS:
        p = subject_dir / f"{subject_id}_{suffix}{ext}"
        if p.exists():
            return p
    raise FileNotFoundError(f"subject {subject_id}: no {suffix} file in {subject_dir}")


def list_subjects(data_root):
    return sorted(p.name for p in Path(data_root).iterdir() if p.is_dir())


def subject_features(subject_dir, subject_id, config: RunConfig):
    """Per-slice feature vectors for every modality of one subject.

    Slices whose ROI is too small, or for which a texture/shape feature is
    undefined, are skipped.
    """
    fcfg = config.feature_config()
    mask = load_mask(find_file(subject_dir, subject_id, MASK_SUFFIX))
    out = []
    for name in config.modalities:
        modality = Modality.parse(name)
        vol = load_volume(find_file(subject_dir, subject_id, MODALITY_SUFFIX[modality]), modality)
        if vol.dims != mask.dims:
            raise DimMismatch(f"subject {subject_id}: {modality.value} dims {vol.dims} != mask dims {mask.dims}")
        if config.normalization == "volume":
            vol = zscore_volume(vol)
        for z in range(vol.dims[2]):
            labels = mask.axial(z)
            if not labels.any():
                continue
            s = axial_slice(vol, z)
            try:
                if config.normalization == "slice":
                    s = zscore_slice(s)
                roi = extract_roi(s, labels, subject_id, modality, config.min_roi_pixels)
                if roi is None:
                    continue
                values = roi_features(roi, fcfg)
            except _SKIPPABLE as exc:
                log.info("skip %s z=%d %s: %s", subject_id, z, modality.value, exc)
                continue
            out.append(SliceFeatures(subject_id, z, modality.value, values))
    return out


def extract_all(config: RunConfig, subjects=None):
    """Features for every subject directory under ``config.data_root``.

    Subjects are processed on up to ``config.threads`` worker threads;
    results are returned in subject order regardless.
    """
    root = Path(config.data_root)
    subjects = list_subjects(root) if subjects is None else list(subjects)

    def work(sid):
        return sid, subject_features(root / sid, sid, config)

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(work, subjects))
    else:
        results = [work(s) for s in subjects]
    return dict(results)


def radiomic_names(config: RunConfig):
    return feature_names(config.feature_config())
