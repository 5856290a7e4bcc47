"""Backend selection for the scan kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback. Setting ``RIKIT_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _kernels_py

TILDE = _kernels_py.TILDE
WMARC = _kernels_py.WMARC
WEAK = _kernels_py.WEAK
NESTED = _kernels_py.NESTED

_impl = _kernels_py
BACKEND = "python"
if os.environ.get("RIKIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def scan(kind, x, y, fy, minimize):
    return _impl.scan(kind, x, y, fy, minimize)


def window_scan(kind, x, y, fy, lo, hi, minimize):
    return _impl.window_scan(kind, x, y, fy, lo, hi, minimize)


def offset_scan(logv, offsets):
    # numpy's SIMD argmax beats the compiled loop here (see benchmarks/)
    return _kernels_py.offset_scan(logv, offsets)
