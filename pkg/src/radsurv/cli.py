"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 I/O or data error, 4 no
output rows, 5 too few rows/subjects per class for the requested folds.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import __version__, classifiers, kernels
from .dataset import SurvivalClass, assemble, read_clinical_csv, read_dataset_csv, write_dataset_csv
from .errors import RadsurvError, TooFewPerClass, FoldError
from .evaluation import CVMode, cross_validate, make_folds, write_importance_csv
from .pipeline import ConfigError, RunConfig, extract_all, list_subjects, radiomic_names, subject_features
from .synthetic import generate_phantoms

EXIT_CONFIG, EXIT_IO, EXIT_EMPTY, EXIT_FOLDS = 2, 3, 4, 5

log = logging.getLogger("radsurv")


class CLIError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(out_dir, command, config, seed, inputs, outputs):
    manifest = {
        "command": command,
        "radsurv_version": __version__,
        "kernel_backend": kernels.BACKEND,
        "seed": seed,
        "config": config.to_dict(),
        "config_sha256": config.digest(),
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": {Path(p).name: _sha256(p) for p in outputs},
    }
    path = Path(out_dir) / f"manifest_{command}.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _load_config(args):
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
    except ConfigError as exc:
        raise CLIError(EXIT_CONFIG, str(exc)) from None
    overrides = {
        "data_root": getattr(args, "data_root", None),
        "clinical_csv": getattr(args, "clinical", None),
        "output_dir": getattr(args, "out_dir", None),
        "threads": getattr(args, "threads", None),
        "min_roi_pixels": getattr(args, "min_roi_pixels", None),
        "normalization": getattr(args, "normalization", None),
    }
    if getattr(args, "modalities", None):
        overrides["modalities"] = args.modalities.split(",")
    if getattr(args, "fourier", False):
        overrides["fourier"] = True
    cfg = cfg.merged(**overrides)
    cv = dict(cfg.cv)
    for key, attr in (("mode", "cv_mode"), ("folds", "folds"), ("seed", "seed")):
        if getattr(args, attr, None) is not None:
            cv[key] = getattr(args, attr)
    model = dict(cfg.model)
    if getattr(args, "model", None):
        model = {"kind": args.model, "hyperparams": {}}
    if getattr(args, "hyperparams", None):
        try:
            model["hyperparams"] = {**model.get("hyperparams", {}), **json.loads(args.hyperparams)}
        except json.JSONDecodeError as exc:
            raise CLIError(EXIT_CONFIG, f"--hyperparams is not valid JSON: {exc}") from None
    cfg = cfg.merged(cv=cv, model=model)
    try:
        cfg.validate(check_paths=False)
    except ConfigError as exc:
        raise CLIError(EXIT_CONFIG, str(exc)) from None
    return cfg


def _model_spec(cfg, seed=None):
    hp = dict(cfg.model.get("hyperparams", {}))
    kind = str(cfg.model.get("kind", "RF")).upper()
    if kind in ("RF", "SVM") and "seed" not in hp and seed is not None:
        hp["seed"] = seed
    try:
        return classifiers.ModelSpec(kind, hp)
    except (TypeError, ValueError) as exc:
        raise CLIError(EXIT_CONFIG, f"invalid model spec {cfg.model}: {exc}") from None


def _read_features(path):
    try:
        return read_dataset_csv(path)
    except (OSError, RadsurvError) as exc:
        raise CLIError(EXIT_IO, f"cannot read feature CSV {path}: {exc}") from None


def cmd_phantom_gen(args):
    ids = generate_phantoms(args.out_dir, args.subjects, args.seed, tuple(args.shape))
    print(f"wrote {len(ids)} phantom subjects to {args.out_dir}")
    return 0


def cmd_extract(args):
    cfg = _load_config(args)
    try:
        cfg.validate(check_paths=True)
    except ConfigError as exc:
        raise CLIError(EXIT_CONFIG, str(exc)) from None
    try:
        clinical = read_clinical_csv(cfg.clinical_path())
    except (OSError, RadsurvError) as exc:
        raise CLIError(EXIT_IO, f"clinical CSV {cfg.clinical_path()}: {exc}") from None
    subjects = list_subjects(cfg.data_root)
    known = {r.subject_id for r in clinical}
    missing = [s for s in subjects if s not in known]
    if missing:
        raise CLIError(EXIT_IO, f"no clinical record for subject(s): {', '.join(missing)}")

    per_subject = {}
    if cfg.threads > 1:
        try:
            per_subject = extract_all(cfg, subjects)
        except (OSError, RadsurvError) as exc:
            raise CLIError(EXIT_IO, str(exc)) from None
    else:
        for sid in subjects:
            try:
                per_subject[sid] = subject_features(Path(cfg.data_root) / sid, sid, cfg)
            except (OSError, RadsurvError) as exc:
                msg = str(exc) if sid in str(exc) else f"subject {sid}: {exc}"
                raise CLIError(EXIT_IO, msg) from None
    for sid in subjects:
        print(f"{sid}: {len(per_subject[sid])} slices")
    rows = [sf for sid in subjects for sf in per_subject[sid]]
    if not rows:
        raise CLIError(EXIT_EMPTY, f"no slice reached min_roi_pixels={cfg.min_roi_pixels}; nothing to write")
    data = assemble(rows, clinical, radiomic_names(cfg), tuple(cfg.thresholds))
    out = Path(args.out) if args.out else Path(cfg.output_dir) / "features.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_dataset_csv(data, out)
    _write_manifest(out.parent, "extract", cfg, None, [cfg.clinical_path()], [out])
    print(f"wrote {len(data)} rows x {data.n_features} features to {out}")
    return 0


def _importance(cfg, data, seed):
    spec = _model_spec(cfg, seed)
    if spec.kind != "RF":
        spec = classifiers.ModelSpec("RF", {"seed": seed})
    model = classifiers.fit(spec, data)
    return classifiers.rf_oob_importance(model, data)


def cmd_evaluate(args):
    cfg = _load_config(args)
    data = _read_features(args.features)
    mode = CVMode.parse(cfg.cv.get("mode", "slice"))
    folds = int(cfg.cv.get("folds", 10))
    seed = int(cfg.cv.get("seed", 0))
    spec = _model_spec(cfg, seed)
    try:
        plan = make_folds(data, folds, mode, seed)
        report = cross_validate(spec, data, plan)
    except TooFewPerClass as exc:
        raise CLIError(EXIT_FOLDS, str(exc)) from None
    except FoldError as exc:
        raise CLIError(EXIT_FOLDS if isinstance(exc.cause, TooFewPerClass) else EXIT_IO, str(exc)) from None
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = [out_dir / "report.json", out_dir / "report.txt"]
    outputs[0].write_text(report.to_json())
    outputs[1].write_text(report.to_text())
    if spec.kind == "RF":
        scores = _importance(cfg, data, seed)
        imp = out_dir / "importance.csv"
        write_importance_csv(data.feature_names, scores, imp)
        outputs.append(imp)
    _write_manifest(out_dir, "evaluate", cfg, seed, [args.features], outputs)
    sys.stdout.write(report.to_text())
    return 0


def cmd_importance(args):
    cfg = _load_config(args)
    data = _read_features(args.features)
    seed = int(cfg.cv.get("seed", 0))
    scores = _importance(cfg, data, seed)
    out = Path(args.out) if args.out else Path(cfg.output_dir) / "importance.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_importance_csv(data.feature_names, scores, out)
    _write_manifest(out.parent, "importance", cfg, seed, [args.features], [out])
    print(f"wrote {len(scores)} importance scores to {out}")
    return 0


def cmd_train(args):
    cfg = _load_config(args)
    data = _read_features(args.features)
    seed = int(cfg.cv.get("seed", 0))
    model = classifiers.fit(_model_spec(cfg, seed), data)
    out = Path(args.model_out)
    out.parent.mkdir(parents=True, exist_ok=True)
    classifiers.save_model(model, out)
    print(f"wrote {model.kind} model to {out}")
    return 0


def cmd_predict(args):
    try:
        model = classifiers.load_model(args.model)
    except (OSError, ValueError, KeyError) as exc:
        raise CLIError(EXIT_IO, f"cannot load model {args.model}: {exc}") from None
    data = _read_features(args.features)
    try:
        pred = classifiers.predict(model, data.X)
    except RadsurvError as exc:
        raise CLIError(EXIT_IO, str(exc)) from None
    lines = ["subject_id,z_index,label,predicted"]
    for sid, z, y, p in zip(data.subject_ids, data.z_index, data.y, pred):
        lines.append(f"{sid},{z},{SurvivalClass(int(y)).label},{SurvivalClass(int(p)).label}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _add_common(p, data=False):
    p.add_argument("--config", help="JSON run configuration (keys as in RunConfig)")
    p.add_argument("--out-dir", help="output directory (overrides config output_dir)")
    if data:
        p.add_argument("--data-root", help="directory holding one sub-directory per subject")
        p.add_argument("--clinical", help="survival CSV (default: <data-root>/survival_data.csv)")
        p.add_argument("--modalities", help="comma-separated subset of T1,T1CE,T2,FLAIR")
        p.add_argument("--min-roi-pixels", type=int)
        p.add_argument("--normalization", choices=["slice", "volume"])
        p.add_argument("--fourier", action="store_true", help="append 10 Fourier descriptor features")
        p.add_argument("--threads", type=int, help="worker threads across subjects")


def _add_model(p):
    p.add_argument("--model", choices=sorted(classifiers.KINDS), help="classifier kind")
    p.add_argument("--hyperparams", help='JSON object, e.g. \'{"k": 5}\'')
    p.add_argument("--seed", type=int)


def build_parser():
    parser = argparse.ArgumentParser(prog="radsurv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"radsurv {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom-gen", help="write synthetic BraTS-layout subjects")
    p.add_argument("out_dir")
    p.add_argument("--subjects", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shape", type=int, nargs=3, default=[16, 64, 64], metavar=("NZ", "NY", "NX"))
    p.set_defaults(func=cmd_phantom_gen)

    p = sub.add_parser("extract", help="compute per-slice radiomic features")
    _add_common(p, data=True)
    p.add_argument("--out", help="feature CSV path (default: <out-dir>/features.csv)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("evaluate", help="cross-validate a classifier on a feature CSV")
    p.add_argument("features")
    _add_common(p)
    _add_model(p)
    p.add_argument("--folds", type=int)
    p.add_argument("--cv-mode", choices=[m.value for m in CVMode])
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("importance", help="random-forest out-of-bag permutation importance")
    p.add_argument("features")
    _add_common(p)
    _add_model(p)
    p.add_argument("--out", help="CSV path (default: <out-dir>/importance.csv)")
    p.set_defaults(func=cmd_importance)

    p = sub.add_parser("train", help="fit a classifier on all rows and save it")
    p.add_argument("features")
    p.add_argument("model_out")
    _add_common(p)
    _add_model(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="apply a saved model to a feature CSV")
    p.add_argument("model")
    p.add_argument("features")
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"radsurv: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
