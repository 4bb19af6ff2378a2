"""Clinical records, survival classes and the per-slice feature table."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import MalformedRow, MissingColumn, UnknownSubject
from .io import Modality

DEFAULT_THRESHOLDS = (600, 1300)
_ID_COLUMNS = ("brats19id", "brats20id", "brats18id", "subject_id", "subjectid", "id")
_MODALITY_ORDER = {m.value: i for i, m in enumerate(Modality)}


class SurvivalClass(enum.IntEnum):
    SHORT = 0
    MID = 1
    LONG = 2

    @property
    def label(self):
        return self.name.capitalize()

    @classmethod
    def parse(cls, text):
        key = str(text).strip().upper()
        try:
            return cls(int(key)) if key.isdigit() else cls[{"MEDIUM": "MID"}.get(key, key)]
        except (KeyError, ValueError):
            raise ValueError(f"unknown survival class {text!r}") from None


@dataclass(frozen=True)
class ClinicalRecord:
    subject_id: str
    age: float
    survival_days: int | None = None


def _find_column(header, candidates, what):
    lowered = [h.strip().lower() for h in header]
    for cand in candidates:
        if cand in lowered:
            return lowered.index(cand)
    raise MissingColumn(f"clinical CSV has no {what} column (header: {header})")


def read_clinical_csv(path):
    """Parse a BraTS-style survival CSV (ID, Age, Survival; extra columns ignored).

    Survival values that are blank or non-numeric (e.g. "ALIVE (361 days
    later)") are recorded as missing.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingColumn(f"{path}: empty file") from None
        id_col = _find_column(header, _ID_COLUMNS, "subject ID")
        age_col = _find_column(header, ("age",), "Age")
        surv_col = _find_column(header, ("survival", "survival_days"), "Survival")
        needed = max(id_col, age_col, surv_col)
        records = []
        for line_no, row in enumerate(reader, 2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) <= needed:
                # trailing empty survival may be dropped by some writers
                if len(row) == surv_col and surv_col == needed:
                    row = row + [""]
                else:
                    raise MalformedRow(line_no, f"expected at least {needed + 1} fields, got {len(row)}")
            sid = row[id_col].strip()
            if not sid:
                raise MalformedRow(line_no, "empty subject ID")
            try:
                age = float(row[age_col])
            except ValueError:
                raise MalformedRow(line_no, f"non-numeric age {row[age_col]!r}") from None
            if not 0 < age < 130:
                raise MalformedRow(line_no, f"age {age} outside (0, 130)")
            days = _parse_days(row[surv_col])
            if days is not None and not 0 <= days <= 40000:
                raise MalformedRow(line_no, f"survival {days} outside [0, 40000]")
            records.append(ClinicalRecord(sid, age, days))
    return records


def _parse_days(text):
    text = text.strip()
    try:
        value = float(text)
    except ValueError:
        return None
    if not math.isfinite(value):
        return None
    return int(round(value))


def bin_survival(record, thresholds=DEFAULT_THRESHOLDS) -> SurvivalClass:
    """Half-open bins [0, t1) Short, [t1, t2) Mid, [t2, inf) Long; missing days count as Short."""
    days = record.survival_days if isinstance(record, ClinicalRecord) else record
    t1, t2 = thresholds
    if days is None or days < t1:
        return SurvivalClass.SHORT
    if days < t2:
        return SurvivalClass.MID
    return SurvivalClass.LONG


@dataclass
class Dataset:
    """Feature matrix with one row per (subject, slice, modality).

    ``modalities`` is kept in memory for bookkeeping but is not part of the
    CSV schema ``subject_id,z_index,label,<feature names...>``.
    """

    subject_ids: np.ndarray
    z_index: np.ndarray
    X: np.ndarray
    y: np.ndarray
    feature_names: list
    modalities: np.ndarray | None = None

    def __post_init__(self):
        self.subject_ids = np.asarray(self.subject_ids, dtype=object)
        self.z_index = np.asarray(self.z_index, dtype=np.int64)
        self.X = np.asarray(self.X, dtype=np.float64).reshape(len(self.subject_ids), -1)
        self.y = np.asarray(self.y, dtype=np.intp)
        self.feature_names = list(self.feature_names)
        if self.X.shape[1] != len(self.feature_names):
            raise ValueError(f"{self.X.shape[1]} feature columns but {len(self.feature_names)} names")
        if not (len(self.z_index) == len(self.y) == len(self.X)):
            raise ValueError("row-aligned arrays differ in length")

    def __len__(self):
        return len(self.y)

    @property
    def n_features(self):
        return self.X.shape[1]

    def subset(self, rows):
        rows = np.asarray(rows, dtype=np.intp)
        mods = None if self.modalities is None else self.modalities[rows]
        return Dataset(self.subject_ids[rows], self.z_index[rows], self.X[rows], self.y[rows], self.feature_names, mods)

    def subjects(self):
        return sorted(set(self.subject_ids.tolist()))


def assemble(features, clinical, feature_names, thresholds=DEFAULT_THRESHOLDS) -> Dataset:
    """Append age to every slice vector and label it with the subject's survival class.

    Rows come out sorted by (subject_id, z_index, modality), so the result
    does not depend on input order.
    """
    by_id = {r.subject_id: r for r in clinical}
    items = list(features)
    for it in items:
        if it.subject_id not in by_id:
            raise UnknownSubject(it.subject_id)
    items.sort(key=lambda it: (it.subject_id, it.z_index, _MODALITY_ORDER.get(it.modality, 99), it.modality))
    n_feat = len(feature_names)
    X = np.empty((len(items), n_feat + 1))
    for r, it in enumerate(items):
        if len(it.values) != n_feat:
            raise ValueError(f"slice {it.subject_id}/{it.z_index} has {len(it.values)} features, expected {n_feat}")
        X[r, :n_feat] = it.values
        X[r, n_feat] = by_id[it.subject_id].age
    return Dataset(
        subject_ids=[it.subject_id for it in items],
        z_index=[it.z_index for it in items],
        X=X,
        y=[int(bin_survival(by_id[it.subject_id], thresholds)) for it in items],
        feature_names=list(feature_names) + ["age"],
        modalities=np.array([it.modality for it in items], dtype=object),
    )


def write_dataset_csv(data: Dataset, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["subject_id", "z_index", "label"] + data.feature_names)
        for sid, z, lab, row in zip(data.subject_ids, data.z_index, data.y, data.X):
            w.writerow([sid, int(z), SurvivalClass(int(lab)).label] + [repr(float(v)) for v in row])


def read_dataset_csv(path) -> Dataset:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingColumn(f"{path}: empty file") from None
        if header[:3] != ["subject_id", "z_index", "label"]:
            raise MissingColumn(f"{path}: header must start with subject_id,z_index,label")
        names = header[3:]
        sids, zs, ys, rows = [], [], [], []
        for line_no, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != len(header):
                raise MalformedRow(line_no, f"expected {len(header)} fields, got {len(row)}")
            try:
                zs.append(int(row[1]))
                ys.append(int(SurvivalClass.parse(row[2])))
                rows.append([float(v) for v in row[3:]])
            except ValueError as exc:
                raise MalformedRow(line_no, str(exc)) from None
            sids.append(row[0])
    X = np.array(rows, dtype=np.float64).reshape(len(rows), len(names))
    return Dataset(sids, zs, X, ys, names)
