import gzip
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from radsurv.errors import CorruptHeader, DimMismatch, IndexOutOfRange, InvalidLabel, UnsupportedFormat
from radsurv.io import Modality, Volume3D, axial_slice, load_mask, load_volume, save_nifti, save_raw

nib = pytest.importorskip("nibabel")


def _nib_write(path, data_zyx, dtype, spacing=(1.0, 1.0, 1.0)):
    # nibabel arrays are indexed (x, y, z); ours are (z, y, x)
    img = nib.Nifti1Image(np.transpose(data_zyx, (2, 1, 0)).astype(dtype), np.diag([*spacing, 1.0]))
    img.header.set_data_dtype(dtype)
    nib.save(img, str(path))


def test_raw_smallest_volume(tmp_path):
    save_raw(tmp_path / "v.raw", np.arange(4, dtype=np.float32).reshape(1, 2, 2), (1, 1, 1))
    vol = load_volume(tmp_path / "v.raw")
    assert vol.dims == (2, 2, 1)
    assert vol.flat.tolist() == [0.0, 1.0, 2.0, 3.0]


def test_raw_sidecar_grammar(tmp_path):
    (tmp_path / "v.rvh").write_text("# comment\ndims = 2 1 1\n\nspacing = 0.5 1 2  # mm\ndtype = int16\n")
    (tmp_path / "v.raw").write_bytes(np.array([-3, 7], dtype="<i2").tobytes())
    vol = load_volume(tmp_path / "v.rvh", "flair")
    assert vol.spacing == (0.5, 1.0, 2.0)
    assert vol.modality is Modality.FLAIR
    assert vol.flat.tolist() == [-3.0, 7.0]


@pytest.mark.parametrize(
    "header",
    ["dims = 2 2\nspacing = 1 1 1\ndtype = uint8\n", "dims = 2 2 1\nspacing = 1 1 1\n", "dims 2 2 1\n",
     "dims = 2 2 1\nspacing = 1 0 1\ndtype = uint8\n", "dims = 2 2 1\nspacing = 1 1 1\ndtype = complex64\n"],
)
def test_raw_bad_sidecar(tmp_path, header):
    (tmp_path / "v.rvh").write_text(header)
    (tmp_path / "v.raw").write_bytes(bytes(4))
    with pytest.raises(CorruptHeader):
        load_volume(tmp_path / "v.raw")


def test_raw_missing_sidecar(tmp_path):
    (tmp_path / "v.raw").write_bytes(bytes(4))
    with pytest.raises(UnsupportedFormat):
        load_volume(tmp_path / "v.raw")


def test_unknown_extension(tmp_path):
    (tmp_path / "v.mha").write_bytes(bytes(10))
    with pytest.raises(UnsupportedFormat):
        load_volume(tmp_path / "v.mha")


def test_nifti_brats_grid_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    data = rng.normal(size=(155, 240, 240)).astype(np.float32)
    path = tmp_path / "t1.nii.gz"
    _nib_write(path, data, np.float32)
    vol = load_volume(path, Modality.T1)
    assert vol.dims == (240, 240, 155)
    assert vol.spacing == (1.0, 1.0, 1.0)
    np.testing.assert_array_equal(vol.data, data.astype(np.float64))


@pytest.mark.parametrize("dtype", [np.uint8, np.int16, np.int32, np.float32, np.float64])
def test_nifti_dtypes_match_reference_reader(tmp_path, dtype):
    data = (np.arange(60).reshape(3, 4, 5) * 3 - 20).clip(0 if dtype == np.uint8 else None).astype(dtype)
    path = tmp_path / "v.nii"
    _nib_write(path, data, dtype, spacing=(0.5, 0.75, 2.0))
    vol = load_volume(path)
    ref = np.asarray(nib.load(str(path)).get_fdata())
    np.testing.assert_array_equal(vol.data, np.transpose(ref, (2, 1, 0)))
    assert vol.spacing == (0.5, 0.75, 2.0)


def test_own_writer_read_by_nibabel(tmp_path):
    data = np.arange(24, dtype=np.int16).reshape(2, 3, 4)
    save_nifti(tmp_path / "w.nii.gz", data, spacing=(1.0, 2.0, 3.0))
    img = nib.load(str(tmp_path / "w.nii.gz"))
    assert img.shape == (4, 3, 2)
    np.testing.assert_array_equal(np.transpose(np.asarray(img.dataobj), (2, 1, 0)), data)
    assert tuple(float(v) for v in img.header.get_zooms()) == (1.0, 2.0, 3.0)


def test_nifti_scaling_applied(tmp_path):
    data = np.arange(8, dtype=np.int16).reshape(2, 2, 2)
    img = nib.Nifti1Image(np.transpose(data, (2, 1, 0)), np.eye(4))
    img.header.set_slope_inter(2.0, 10.0)
    nib.save(img, str(tmp_path / "s.nii"))
    assert load_volume(tmp_path / "s.nii").flat.tolist() == [10.0 + 2.0 * v for v in range(8)]


def test_nifti_big_endian(tmp_path):
    data = np.arange(8, dtype=np.float32).reshape(2, 2, 2)
    hdr = nib.Nifti1Header(endianness=">")
    img = nib.Nifti1Image(np.transpose(data, (2, 1, 0)).astype(">f4"), np.eye(4), hdr)
    nib.save(img, str(tmp_path / "be.nii"))
    assert (tmp_path / "be.nii").read_bytes()[:4] == struct.pack(">i", 348)
    np.testing.assert_array_equal(load_volume(tmp_path / "be.nii").data, data)


def test_truncated_payload(tmp_path):
    save_nifti(tmp_path / "v.nii", np.zeros((2, 2, 2), dtype=np.float32))
    blob = (tmp_path / "v.nii").read_bytes()
    (tmp_path / "v.nii").write_bytes(blob[: 352 + 4 * 4])
    with pytest.raises(DimMismatch):
        load_volume(tmp_path / "v.nii")
    save_raw(tmp_path / "r.raw", np.zeros((2, 2, 2)), dtype="float32")
    (tmp_path / "r.raw").write_bytes(bytes(16))
    with pytest.raises(DimMismatch):
        load_volume(tmp_path / "r.raw")


def test_corrupt_and_unsupported_headers(tmp_path):
    (tmp_path / "short.nii").write_bytes(bytes(100))
    with pytest.raises(CorruptHeader):
        load_volume(tmp_path / "short.nii")
    save_nifti(tmp_path / "v.nii", np.zeros((1, 1, 2), dtype=np.float32))
    blob = bytearray((tmp_path / "v.nii").read_bytes())
    blob[344:348] = b"ni1\x00"
    (tmp_path / "pair.nii").write_bytes(bytes(blob))
    with pytest.raises(UnsupportedFormat):
        load_volume(tmp_path / "pair.nii")
    blob[344:348] = b"n+1\x00"
    struct.pack_into("<h", blob, 70, 128)  # RGB
    (tmp_path / "rgb.nii").write_bytes(bytes(blob))
    with pytest.raises(UnsupportedFormat):
        load_volume(tmp_path / "rgb.nii")


def test_gzip_detected_by_content(tmp_path):
    save_nifti(tmp_path / "v.nii", np.ones((1, 2, 2), dtype=np.uint8))
    (tmp_path / "g.nii").write_bytes(gzip.compress((tmp_path / "v.nii").read_bytes()))
    assert load_volume(tmp_path / "g.nii").flat.tolist() == [1.0] * 4


def test_mask_all_zero(tmp_path):
    save_nifti(tmp_path / "m.nii.gz", np.zeros((2, 3, 3), dtype=np.uint8))
    m = load_mask(tmp_path / "m.nii.gz")
    assert m.dims == (3, 3, 2)
    assert not m.labels.any()


def test_mask_invalid_label(tmp_path):
    save_nifti(tmp_path / "m.nii", np.array([[[0, 3]]], dtype=np.uint8))
    with pytest.raises(InvalidLabel) as err:
        load_mask(tmp_path / "m.nii")
    assert err.value.value == 3


def test_mask_brats_labels_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    labels = rng.choice([0, 1, 2, 4], size=(4, 5, 6)).astype(np.int16)
    _nib_write(tmp_path / "seg.nii.gz", labels, np.int16)
    np.testing.assert_array_equal(load_mask(tmp_path / "seg.nii.gz").labels, labels)


def test_axial_slice_layout():
    vol = Volume3D((2, 2, 2), (1.0, 1.0, 1.0), np.arange(8, dtype=np.float64).reshape(2, 2, 2))
    s = axial_slice(vol, 1)
    assert s.pixels.ravel().tolist() == [4, 5, 6, 7]
    assert (s.width, s.height, s.z_index) == (2, 2, 1)
    with pytest.raises(IndexOutOfRange):
        axial_slice(vol, 2)
    with pytest.raises(IndexError):
        axial_slice(vol, -1)


def test_single_voxel_slice():
    vol = Volume3D((1, 1, 1), (1.0, 1.0, 1.0), np.array([[[9.0]]]))
    assert axial_slice(vol, 0).pixels.tolist() == [[9.0]]


@settings(max_examples=40, deadline=None)
@given(
    arrays(np.float32, st.tuples(st.integers(1, 4), st.integers(1, 5), st.integers(1, 5)),
           elements=st.floats(-1e6, 1e6, width=32)),
    st.tuples(*[st.floats(0.1, 5.0)] * 3),
)
def test_raw_roundtrip_and_slices_reconstruct(tmp_path_factory, data, spacing):
    path = tmp_path_factory.mktemp("raw") / "v.raw"
    save_raw(path, data, spacing, dtype="float32")
    vol = load_volume(path)
    nz, ny, nx = data.shape
    assert vol.dims == (nx, ny, nz)
    assert vol.spacing == tuple(float(s) for s in spacing)
    np.testing.assert_array_equal(vol.data, data.astype(np.float64))
    stacked = np.stack([axial_slice(vol, z).pixels for z in range(nz)])
    np.testing.assert_array_equal(stacked, vol.data)
