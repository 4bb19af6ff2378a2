"""Volume and mask loading.

Two on-disk formats are understood:

* NIfTI-1 single-file images (``.nii`` / ``.nii.gz``), datatypes uint8,
  int16, int32, float32 and float64. No affine reorientation is applied;
  volumes are assumed co-registered.
* A raw payload with a text sidecar. ``scan.raw`` holds little-endian
  voxels with x varying fastest, ``scan.rvh`` describes them::

      # comment lines and blank lines are ignored
      dims = 240 240 155
      spacing = 1.0 1.0 1.0
      dtype = float32

  ``dtype`` is one of uint8, int16, int32, float32, float64. Either file of
  the pair may be passed to the loaders.

Voxel arrays are stored with shape ``(nz, ny, nx)`` so that ``data.ravel()``
is the on-disk order and ``data[z]`` is an axial plane.
"""

from __future__ import annotations

import enum
import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CorruptHeader, DimMismatch, IndexOutOfRange, InvalidLabel, UnsupportedFormat

MASK_LABELS = (0, 1, 2, 4)

_NIFTI_DTYPES = {
    2: np.dtype(np.uint8),
    4: np.dtype(np.int16),
    8: np.dtype(np.int32),
    16: np.dtype(np.float32),
    64: np.dtype(np.float64),
}
_NIFTI_CODES = {v: k for k, v in _NIFTI_DTYPES.items()}
_RAW_DTYPES = {name: np.dtype(name).newbyteorder("<") for name in ("uint8", "int16", "int32", "float32", "float64")}


class Modality(str, enum.Enum):
    T1 = "T1"
    T1CE = "T1CE"
    T2 = "T2"
    FLAIR = "FLAIR"

    @classmethod
    def parse(cls, text):
        key = str(text).strip().upper().replace("-", "").replace("_", "")
        if key == "T1GD":
            key = "T1CE"
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown modality {text!r}") from None


@dataclass(frozen=True)
class Volume3D:
    dims: tuple
    spacing: tuple
    data: np.ndarray
    modality: Modality | None = None

    def __post_init__(self):
        nx, ny, nz = self.dims
        if min(self.dims) < 1:
            raise DimMismatch(f"dims must be >= 1, got {self.dims}")
        if any(not s > 0 for s in self.spacing):
            raise CorruptHeader(f"spacing must be > 0, got {self.spacing}")
        if self.data.shape != (nz, ny, nx):
            raise DimMismatch(f"data shape {self.data.shape} does not match dims {self.dims}")
        self.data.setflags(write=False)

    @property
    def flat(self):
        return self.data.ravel()


@dataclass(frozen=True)
class MaskVolume:
    dims: tuple
    labels: np.ndarray

    def __post_init__(self):
        nx, ny, nz = self.dims
        if self.labels.shape != (nz, ny, nx):
            raise DimMismatch(f"label shape {self.labels.shape} does not match dims {self.dims}")
        self.labels.setflags(write=False)

    def axial(self, z):
        if not 0 <= z < self.dims[2]:
            raise IndexOutOfRange(f"z={z} outside [0, {self.dims[2]})")
        return self.labels[z]


@dataclass(frozen=True)
class Slice2D:
    """One axial plane; ``pixels`` has shape (height, width)."""

    width: int
    height: int
    pixels: np.ndarray
    z_index: int

    def __post_init__(self):
        if self.pixels.shape != (self.height, self.width):
            raise DimMismatch(f"pixel shape {self.pixels.shape} != ({self.height}, {self.width})")


def _read_bytes(path):
    raw = Path(path).read_bytes()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    return raw


def _is_nifti(path):
    name = Path(path).name.lower()
    return name.endswith(".nii") or name.endswith(".nii.gz")


def _raw_pair(path):
    path = Path(path)
    if path.suffix == ".rvh":
        return path.with_suffix(".raw"), path
    if path.suffix == ".raw":
        return path, path.with_suffix(".rvh")
    return None


def _read_nifti(path):
    raw = _read_bytes(path)
    if len(raw) < 348:
        raise CorruptHeader(f"{path}: file shorter than a NIfTI-1 header")
    for endian in "<>":
        if struct.unpack(endian + "i", raw[:4])[0] == 348:
            break
    else:
        raise CorruptHeader(f"{path}: sizeof_hdr is not 348")
    magic = raw[344:348]
    if magic == b"ni1\x00":
        raise UnsupportedFormat(f"{path}: two-file NIfTI (.hdr/.img) is not supported")
    if magic != b"n+1\x00":
        raise CorruptHeader(f"{path}: bad magic {magic!r}")

    dim = struct.unpack(endian + "8h", raw[40:56])
    ndim = dim[0]
    if not 1 <= ndim <= 7:
        raise CorruptHeader(f"{path}: dim[0]={ndim}")
    shape = [dim[i] if i <= ndim else 1 for i in range(1, 4)]
    if any(d > 1 for d in dim[4 : ndim + 1]):
        raise UnsupportedFormat(f"{path}: only 3-D volumes are supported, dim={dim[: ndim + 1]}")
    if min(shape) < 1:
        raise CorruptHeader(f"{path}: non-positive dims {shape}")
    code = struct.unpack(endian + "h", raw[70:72])[0]
    if code not in _NIFTI_DTYPES:
        raise UnsupportedFormat(f"{path}: NIfTI datatype {code} is not supported")
    dtype = _NIFTI_DTYPES[code].newbyteorder(endian)
    pixdim = struct.unpack(endian + "8f", raw[76:108])
    spacing = tuple(abs(float(p)) if i <= ndim else 1.0 for i, p in zip(range(1, 4), pixdim[1:4]))
    if any(s == 0 or not np.isfinite(s) for s in spacing):
        raise CorruptHeader(f"{path}: invalid pixdim {pixdim[1:4]}")
    vox_offset = int(struct.unpack(endian + "f", raw[108:112])[0])
    slope, inter = struct.unpack(endian + "2f", raw[112:120])

    nx, ny, nz = shape
    payload = raw[vox_offset:]
    expected = nx * ny * nz * dtype.itemsize
    if vox_offset < 348 or len(payload) != expected:
        raise DimMismatch(f"{path}: header expects {expected} payload bytes, found {len(payload)}")
    data = np.frombuffer(payload, dtype=dtype).reshape(nz, ny, nx)
    return (nx, ny, nz), spacing, data, (float(slope), float(inter))


def _read_raw(path):
    payload_path, header_path = _raw_pair(path)
    if not header_path.exists():
        raise UnsupportedFormat(f"{path}: missing sidecar {header_path.name}")
    fields = {}
    for line_no, line in enumerate(header_path.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CorruptHeader(f"{header_path}:{line_no}: expected 'key = value'")
        fields[key.strip()] = value.split()
    try:
        dims = tuple(int(v) for v in fields["dims"])
        spacing = tuple(float(v) for v in fields["spacing"])
        dtype = _RAW_DTYPES[fields["dtype"][0]]
    except KeyError as exc:
        raise CorruptHeader(f"{header_path}: missing or unknown field {exc}") from None
    except ValueError as exc:
        raise CorruptHeader(f"{header_path}: {exc}") from None
    if len(dims) != 3 or len(spacing) != 3:
        raise CorruptHeader(f"{header_path}: dims and spacing need three values each")
    if min(dims) < 1 or min(spacing) <= 0:
        raise CorruptHeader(f"{header_path}: dims must be >= 1 and spacing > 0")
    payload = payload_path.read_bytes()
    nx, ny, nz = dims
    expected = nx * ny * nz * dtype.itemsize
    if len(payload) != expected:
        raise DimMismatch(f"{payload_path}: header expects {expected} bytes, found {len(payload)}")
    data = np.frombuffer(payload, dtype=dtype).reshape(nz, ny, nx)
    return dims, spacing, data, (0.0, 0.0)


def _read_any(path):
    path = Path(path)
    if _is_nifti(path):
        return _read_nifti(path)
    if _raw_pair(path) is not None:
        return _read_raw(path)
    raise UnsupportedFormat(f"{path}: unrecognised extension (expected .nii, .nii.gz, .raw or .rvh)")


def load_volume(path, modality=None):
    """Load one MR modality as a :class:`Volume3D` with float64 intensities."""
    dims, spacing, data, (slope, inter) = _read_any(path)
    data = data.astype(np.float64)
    if slope != 0 and np.isfinite(slope):
        data = data * slope + inter
    if modality is not None:
        modality = Modality.parse(modality) if not isinstance(modality, Modality) else modality
    return Volume3D(tuple(dims), tuple(spacing), np.ascontiguousarray(data), modality)


def load_mask(path):
    """Load a segmentation and check every voxel is one of the BraTS labels."""
    dims, _, data, (slope, inter) = _read_any(path)
    values = data.astype(np.float64)
    if slope != 0 and np.isfinite(slope):
        values = values * slope + inter
    present = np.unique(values)
    for v in present:
        if v not in MASK_LABELS:
            raise InvalidLabel(int(v) if float(v).is_integer() else float(v))
    return MaskVolume(tuple(dims), values.astype(np.uint8))


def axial_slice(vol, z):
    nx, ny, nz = vol.dims
    if not 0 <= z < nz:
        raise IndexOutOfRange(f"z={z} outside [0, {nz})")
    return Slice2D(width=nx, height=ny, pixels=vol.data[z], z_index=int(z))


def save_raw(path, data, spacing=(1.0, 1.0, 1.0), dtype="float32"):
    """Write ``data`` (shape (nz, ny, nx)) as a raw payload plus sidecar."""
    payload_path, header_path = _raw_pair(Path(path)) or (Path(path), Path(path).with_suffix(".rvh"))
    data = np.asarray(data)
    nz, ny, nx = data.shape
    header_path.write_text(
        f"dims = {nx} {ny} {nz}\n"
        f"spacing = {' '.join(repr(float(s)) for s in spacing)}\n"
        f"dtype = {dtype}\n"
    )
    payload_path.write_bytes(np.ascontiguousarray(data, dtype=_RAW_DTYPES[dtype]).tobytes())
    return payload_path


def save_nifti(path, data, spacing=(1.0, 1.0, 1.0)):
    """Minimal NIfTI-1 single-file writer (little-endian, identity scaling).

    Gzip-compresses when the name ends in ``.gz``. Used by the phantom
    generator; it writes only the header fields the loader reads.
    """
    data = np.asarray(data)
    if data.dtype not in _NIFTI_CODES:
        data = data.astype(np.float32)
    dtype = data.dtype.newbyteorder("<")
    nz, ny, nx = data.shape
    hdr = bytearray(352)
    struct.pack_into("<i", hdr, 0, 348)
    struct.pack_into("<8h", hdr, 40, 3, nx, ny, nz, 1, 1, 1, 1)
    struct.pack_into("<hh", hdr, 70, _NIFTI_CODES[data.dtype], dtype.itemsize * 8)
    struct.pack_into("<8f", hdr, 76, 1.0, *spacing, 1.0, 1.0, 1.0, 1.0)
    struct.pack_into("<f", hdr, 108, 352.0)
    struct.pack_into("<2f", hdr, 112, 1.0, 0.0)
    hdr[344:348] = b"n+1\x00"
    blob = bytes(hdr) + np.ascontiguousarray(data, dtype=dtype).tobytes()
    path = Path(path)
    if path.name.endswith(".gz"):
        blob = gzip.compress(blob, mtime=0)
    path.write_bytes(blob)
    return path
