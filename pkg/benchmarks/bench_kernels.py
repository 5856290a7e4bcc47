"""Compiled vs numpy scan kernels on lattice-sized inputs.

    python benchmarks/bench_kernels.py [--repeat N] [--size M]

Prints best-of-N wall time per kernel for each backend, the speedup and the
max relative difference between the two outputs.
"""
import argparse
import time

import numpy as np

from rikit import _kernels_py

try:
    from rikit import _kernels as _compiled
except ImportError:
    _compiled = None


def best_of(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(m):
    x = np.geomspace(1e-18, 1e18, m)
    fy = x * np.log1p(1.0 / x)
    lo = np.clip(np.arange(m) - 8, 0, m)
    hi = np.clip(np.arange(m) + 9, 0, m)
    logv = np.log(fy)
    offsets = np.arange(-m // 2, m // 2 + 1)
    return {
        "scan/tilde": lambda k: k.scan(_kernels_py.TILDE, x, x, fy, True),
        "scan/wmarc": lambda k: k.scan(_kernels_py.WMARC, x, x, fy, False),
        "scan/nested": lambda k: k.scan(_kernels_py.NESTED, x, x, fy, True),
        "window_scan/nested": lambda k: k.window_scan(_kernels_py.NESTED, x, x, fy, lo, hi, True),
        "offset_scan": lambda k: k.offset_scan(logv, offsets),
    }


def _diff(a, b):
    a = np.asarray(a[0] if isinstance(a, tuple) else a, dtype=float)
    b = np.asarray(b[0] if isinstance(b, tuple) else b, dtype=float)
    ok = np.isfinite(a) & np.isfinite(b)
    return float(np.max(np.abs(a[ok] - b[ok]) / np.maximum(np.abs(b[ok]), 1e-300)))


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--size", type=int, default=4609, help="lattice nodes (default lattice)")
    args = ap.parse_args(argv)
    print(f"nodes={args.size} repeat={args.repeat} compiled={'yes' if _compiled else 'no'}")
    print(f"{'kernel':<20} {'python [s]':>11} {'cython [s]':>11} {'speedup':>8} {'max rel diff':>13}")
    for name, run in cases(args.size).items():
        tp, op = best_of(lambda: run(_kernels_py), args.repeat)
        if _compiled is None:
            print(f"{name:<20} {tp:11.4f} {'-':>11} {'-':>8} {'-':>13}")
            continue
        tc, oc = best_of(lambda: run(_compiled), args.repeat)
        print(f"{name:<20} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f} {_diff(op, oc):13.2e}")


if __name__ == "__main__":
    main()
