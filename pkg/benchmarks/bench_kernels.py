"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from radsurv import kernels
from radsurv.texture import DEFAULT_OFFSETS


def cases(rng):
    codes = rng.integers(0, 32, (120, 120)).astype(np.int32)
    codes[rng.random(codes.shape) < 0.2] = -1
    offsets = np.asarray(DEFAULT_OFFSETS, dtype=np.int64)
    img = rng.normal(size=(120, 120))
    mask = rng.random((120, 120)) < 0.8
    X = rng.normal(size=(2000, 91))
    y = rng.integers(0, 3, 2000).astype(np.intp)
    rows = np.arange(2000, dtype=np.intp)
    feats = np.arange(91, dtype=np.intp)
    return {
        "glcm_counts 120x120 G=32": lambda m: m.glcm_counts(codes, offsets, 32),
        "lbp_codes 120x120": lambda m: m.lbp_codes(img, mask),
        "best_split 2000x91": lambda m: m.best_split(X, y, rows, feats, 3, 10),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.backends()
    names = sorted(backends)
    print(f"{'kernel':28s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, call in cases(np.random.default_rng(0)).items():
        best = {}
        for n in names:
            call(backends[n])  # warm up
            best[n] = min(timeit.repeat(lambda: call(backends[n]), number=1, repeat=args.repeat))
        line = f"{label:28s}" + "".join(f"{best[n] * 1e3:10.2f}ms" for n in names)
        if "cython" in best:
            line += f"{best['python'] / best['cython']:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
