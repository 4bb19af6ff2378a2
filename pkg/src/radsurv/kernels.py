"""Kernel dispatch: compiled extension when importable, numpy otherwise.

Set ``RADSURV_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("RADSURV_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

glcm_counts = _impl.glcm_counts
lbp_codes = _impl.lbp_codes
best_split = _impl.best_split


def backends():
    """All importable kernel modules keyed by name (for tests and benchmarks)."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
