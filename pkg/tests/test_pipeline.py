import numpy as np
import pytest

from radsurv.dataset import read_clinical_csv
from radsurv.io import load_mask, load_volume, save_nifti, save_raw
from radsurv.pipeline import ConfigError, RunConfig, extract_all, find_file, list_subjects, subject_features
from radsurv.synthetic import generate_phantoms, make_blobs


@pytest.fixture(scope="module")
def root(tmp_path_factory):
    r = tmp_path_factory.mktemp("data")
    generate_phantoms(r, n_subjects=3, seed=5, shape=(10, 40, 40))
    return r


def test_phantoms_layout(root):
    assert list_subjects(root) == ["Phantom_000", "Phantom_001", "Phantom_002"]
    recs = read_clinical_csv(root / "survival_data.csv")
    assert [r.subject_id for r in recs] == list_subjects(root)
    assert [r.survival_days < 600 for r in recs] == [True, False, False]
    mask = load_mask(root / "Phantom_000" / "Phantom_000_seg.nii.gz")
    assert set(np.unique(mask.labels)) <= {0, 1, 2, 4}
    assert load_volume(root / "Phantom_000" / "Phantom_000_flair.nii.gz").dims == mask.dims == (40, 40, 10)


def test_phantoms_deterministic(tmp_path):
    generate_phantoms(tmp_path / "a", 2, seed=3, shape=(6, 24, 24))
    generate_phantoms(tmp_path / "b", 2, seed=3, shape=(6, 24, 24))
    for f in sorted((tmp_path / "a").rglob("*.*")):
        assert f.read_bytes() == (tmp_path / "b" / f.relative_to(tmp_path / "a")).read_bytes()


def test_subject_features_rows(root):
    cfg = RunConfig(data_root=str(root))
    rows = subject_features(root / "Phantom_001", "Phantom_001", cfg)
    assert rows and {r.modality for r in rows} == {"T1", "T1CE", "T2", "FLAIR"}
    assert all(r.values.shape == (90,) and np.isfinite(r.values).all() for r in rows)
    t1 = subject_features(root / "Phantom_001", "Phantom_001", cfg.merged(modalities=["t1"]))
    assert len(t1) * 4 == len(rows)


def test_volume_normalisation_and_fourier(root):
    cfg = RunConfig(data_root=str(root), normalization="volume", fourier=True, modalities=["FLAIR"])
    rows = subject_features(root / "Phantom_000", "Phantom_000", cfg)
    assert rows and rows[0].values.shape == (100,)


def test_extract_all_threads(root):
    cfg = RunConfig(data_root=str(root), modalities=["T2"])
    serial = extract_all(cfg)
    threaded = extract_all(cfg.merged(threads=3))
    assert list(serial) == list(threaded)
    for sid in serial:
        np.testing.assert_array_equal(np.array([r.values for r in serial[sid]]),
                                      np.array([r.values for r in threaded[sid]]))


def test_raw_inputs_accepted(tmp_path):
    sdir = tmp_path / "R1"
    sdir.mkdir()
    vol = np.random.default_rng(0).normal(100, 10, (3, 20, 20))
    seg = np.zeros((3, 20, 20), np.uint8)
    seg[1, 5:15, 5:15] = 2
    save_raw(sdir / "R1_flair.raw", vol)
    save_raw(sdir / "R1_seg.raw", seg, dtype="uint8")
    assert find_file(sdir, "R1", "flair").suffix == ".raw"
    rows = subject_features(sdir, "R1", RunConfig(modalities=["FLAIR"]))
    assert [r.z_index for r in rows] == [1]
    with pytest.raises(FileNotFoundError):
        find_file(sdir, "R1", "t1")


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"modalities": ["PET"]})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"thresholds": [1300, 600]})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"normalization": "roi"})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"offsets": [[1, 0, 0]]})
    with pytest.raises(ConfigError):
        RunConfig(data_root=str(tmp_path)).validate(check_paths=True)  # no survival_data.csv
    with pytest.raises(ConfigError):
        RunConfig.load(tmp_path / "absent.json")


def test_config_roundtrip_and_digest(tmp_path):
    cfg = RunConfig(levels=16, model={"kind": "SVM", "hyperparams": {"C": 2.0}})
    (tmp_path / "c.json").write_text(__import__("json").dumps(cfg.to_dict()))
    back = RunConfig.load(tmp_path / "c.json")
    assert back == cfg and back.digest() == cfg.digest()
    assert cfg.merged(levels=8).digest() != cfg.digest()
    assert cfg.feature_config().levels == 16


def test_make_blobs_shape():
    d = make_blobs()
    assert d.X.shape == (300, 91) and np.bincount(d.y).tolist() == [100, 100, 100]
    assert len(d.subjects()) == 30
    for sid in d.subjects():
        assert len(set(d.y[d.subject_ids == sid])) == 1


def test_save_nifti_promotes_unsupported_dtype(tmp_path):
    save_nifti(tmp_path / "b.nii", np.array([[[True, False]]]))
    assert load_volume(tmp_path / "b.nii").flat.tolist() == [1.0, 0.0]
