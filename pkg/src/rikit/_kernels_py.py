"""Pure-numpy versions of the O(n*m) scan kernels.

Both backends expose the same functions, ``scan``, ``window_scan`` and
``offset_scan``;
``rikit.kernels`` picks one at import time.
"""
import numpy as np

TILDE = 0
WMARC = 1
WEAK = 2
NESTED = 3

# rows per block; keeps the temporary matrix around 8 MB
_BLOCK = 256


def _objective(kind, x, y, fy):
    # x has shape (b, 1); y and fy broadcast against it
    if kind == TILDE:
        return x * fy / (y * np.log1p(x / y))
    if kind == WMARC:
        return x * np.log1p(y / x) * fy / y
    if kind == WEAK:
        return fy / (1.0 + y / x)
    if kind == NESTED:
        return fy / (y * np.log1p(1.0 / (x * y)))
    raise ValueError(f"unknown kernel kind {kind}")


def scan(kind, x, y, fy, minimize):
    """Extremum over ``y`` of the kernel objective, for every ``x``.

    Returns ``(best, index)`` where ``index`` points into ``y``.
    """
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    fy = np.ascontiguousarray(fy, dtype=float)
    best = np.empty(x.size)
    idx = np.empty(x.size, dtype=np.int64)
    for lo in range(0, x.size, _BLOCK):
        block = x[lo:lo + _BLOCK, None]
        vals = _objective(kind, block, y, fy)
        j = np.argmin(vals, axis=1) if minimize else np.argmax(vals, axis=1)
        idx[lo:lo + _BLOCK] = j
        best[lo:lo + _BLOCK] = vals[np.arange(j.size), j]
    return best, idx


def window_scan(kind, x, y, fy, lo, hi, minimize):
    """Like ``scan`` but target i only looks at ``y[lo[i]:hi[i]]``."""
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    fy = np.ascontiguousarray(fy, dtype=float)
    lo = np.clip(np.asarray(lo, dtype=np.int64), 0, y.size)
    hi = np.clip(np.asarray(hi, dtype=np.int64), 0, y.size)
    width = int(max(1, (hi - lo).max(initial=1)))
    cols = lo[:, None] + np.arange(width)[None, :]
    valid = cols < hi[:, None]
    cols = np.minimum(cols, y.size - 1)
    with np.errstate(all="ignore"):
        vals = _objective(kind, x[:, None], y[cols], fy[cols])
    fill = np.inf if minimize else -np.inf
    vals = np.where(valid & ~np.isnan(vals), vals, fill)
    j = np.argmin(vals, axis=1) if minimize else np.argmax(vals, axis=1)
    return vals[np.arange(x.size), j], cols[np.arange(x.size), j]


def offset_scan(logv, offsets):
    """For each offset k return max_j logv[j + k] - logv[j] and its j."""
    logv = np.ascontiguousarray(logv, dtype=float)
    offsets = np.asarray(offsets, dtype=np.int64)
    n = logv.size
    best = np.full(offsets.size, -np.inf)
    idx = np.zeros(offsets.size, dtype=np.int64)
    for i, k in enumerate(offsets):
        if abs(k) >= n:
            continue
        if k >= 0:
            diff = logv[k:] - logv[:n - k]
            p = int(np.argmax(diff))
            idx[i] = p
        else:
            diff = logv[:n + k] - logv[-k:]
            p = int(np.argmax(diff))
            idx[i] = p - k
        best[i] = diff[p]
    return best, idx
