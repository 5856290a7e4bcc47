# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels; same contract as rikit._kernels_py."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log1p, INFINITY

cnp.import_array()

DEF TILDE = 0
DEF WMARC = 1
DEF WEAK = 2
DEF NESTED = 3


cdef inline double _objective(int kind, double x, double y, double fy) nogil:
    if kind == TILDE:
        return x * fy / (y * log1p(x / y))
    elif kind == WMARC:
        return x * log1p(y / x) * fy / y
    elif kind == WEAK:
        return fy / (1.0 + y / x)
    else:
        return fy / (y * log1p(1.0 / (x * y)))


def _lattice_offsets(x, y):
    """Integer lattice positions of x relative to y when both sit on the
    same geometric lattice (y consecutive), else None."""
    m = y.shape[0]
    if m < 2 or np.any(x <= 0) or np.any(y <= 0):
        return None
    ly = np.log(y)
    h = (ly[m - 1] - ly[0]) / (m - 1)
    if not h > 0 or np.any(np.abs(ly - (ly[0] + h * np.arange(m))) > 1e-9 * h):
        return None
    u = (np.log(x) - ly[0]) / h
    k = np.rint(u)
    if np.any(np.abs(u - k) > 1e-9):
        return None
    return k.astype(np.int64), ly[0], h


def _log_table(int kind, k, double ly0, double h, Py_ssize_t m):
    """log1p of the kernel ratio indexed by lattice offset, plus the base
    index subtracted before lookup."""
    if kind == TILDE:       # x/y = e^{(k_i - j) h}
        base = int(k.min()) - (m - 1)
        d = np.arange(base, int(k.max()) + 1)
        return np.log1p(np.exp(d * h)), base
    if kind == WMARC:       # y/x = e^{(j - k_i) h}
        base = -int(k.max())
        d = np.arange(base, (m - 1) - int(k.min()) + 1)
        return np.log1p(np.exp(d * h)), base
    # NESTED: 1/(x y) = e^{-(2 ly0 + (k_i + j) h)}
    base = int(k.min())
    d = np.arange(base, int(k.max()) + m)
    return np.log1p(np.exp(-(2.0 * ly0 + d * h))), base


def scan(int kind, x, y, fy, bint minimize):
    if kind < 0 or kind > NESTED:
        raise ValueError(f"unknown kernel kind {kind}")
    xa = np.ascontiguousarray(x, dtype=np.float64)
    ya = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] xv = xa
    cdef double[::1] yv = ya
    cdef double[::1] fv = np.ascontiguousarray(fy, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], m = yv.shape[0], i, j, jb
    best_arr = np.empty(n)
    idx_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] best = best_arr
    cdef long long[::1] idx = idx_arr
    cdef double v, b, xi
    cdef double[::1] tab
    cdef long long[::1] kv
    cdef long long base, ki
    aligned = _lattice_offsets(xa, ya) if kind != WEAK and n > 0 else None
    if aligned is not None:
        k_arr, ly0, h = aligned
        tab_arr, base = _log_table(kind, k_arr, ly0, h, m)
        tab = tab_arr
        kv = k_arr
        with nogil:
            for i in range(n):
                xi = xv[i]
                ki = kv[i]
                jb = 0
                b = INFINITY if minimize else -INFINITY
                for j in range(m):
                    if kind == TILDE:
                        v = xi * fv[j] / (yv[j] * tab[ki - j - base])
                    elif kind == WMARC:
                        v = xi * tab[j - ki - base] * fv[j] / yv[j]
                    else:
                        v = fv[j] / (yv[j] * tab[ki + j - base])
                    if minimize:
                        if v < b:
                            b = v
                            jb = j
                    elif v > b:
                        b = v
                        jb = j
                best[i] = b
                idx[i] = jb
        return best_arr, idx_arr
    with nogil:
        for i in range(n):
            jb = 0
            b = INFINITY if minimize else -INFINITY
            for j in range(m):
                v = _objective(kind, xv[i], yv[j], fv[j])
                if minimize:
                    if v < b:
                        b = v
                        jb = j
                elif v > b:
                    b = v
                    jb = j
            best[i] = b
            idx[i] = jb
    return best_arr, idx_arr


def window_scan(int kind, x, y, fy, lo, hi, bint minimize):
    if kind < 0 or kind > NESTED:
        raise ValueError(f"unknown kernel kind {kind}")
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] fv = np.ascontiguousarray(fy, dtype=np.float64)
    cdef long long[::1] lov = np.ascontiguousarray(lo, dtype=np.int64)
    cdef long long[::1] hiv = np.ascontiguousarray(hi, dtype=np.int64)
    cdef Py_ssize_t n = xv.shape[0], m = yv.shape[0], i, j, jb, a, b_
    best_arr = np.empty(n)
    idx_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] best = best_arr
    cdef long long[::1] idx = idx_arr
    cdef double v, b
    with nogil:
        for i in range(n):
            a = lov[i] if lov[i] > 0 else 0
            b_ = hiv[i] if hiv[i] < m else m
            jb = a
            b = INFINITY if minimize else -INFINITY
            for j in range(a, b_):
                v = _objective(kind, xv[i], yv[j], fv[j])
                if minimize:
                    if v < b:
                        b = v
                        jb = j
                elif v > b:
                    b = v
                    jb = j
            best[i] = b
            idx[i] = jb
    return best_arr, idx_arr


def offset_scan(logv, offsets):
    cdef double[::1] lv = np.ascontiguousarray(logv, dtype=np.float64)
    cdef long long[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef Py_ssize_t n = lv.shape[0], q = off.shape[0], i, j, lo, hi, jb
    cdef long long k
    best_arr = np.full(q, -np.inf)
    idx_arr = np.zeros(q, dtype=np.int64)
    cdef double[::1] best = best_arr
    cdef long long[::1] idx = idx_arr
    cdef double v, b
    with nogil:
        for i in range(q):
            k = off[i]
            if k >= n or -k >= n:
                continue
            lo = -k if k < 0 else 0
            hi = n - k if k > 0 else n
            b = -INFINITY
            jb = lo
            for j in range(lo, hi):
                v = lv[j + k] - lv[j]
                if v > b:
                    b = v
                    jb = j
            best[i] = b
            idx[i] = jb
    return best_arr, idx_arr
