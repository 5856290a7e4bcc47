"""Geometric grids, batched golden-section refinement, endpoint extrapolation
and improper-integral helpers shared by the numerical modules."""
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import GridTooCoarse

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

# extra decades searched beyond the reporting grid by inf/sup transforms
SEARCH_PAD_DECADES = 10
# envelope suprema converge logarithmically for t*log(1+1/t); search far out
ENVELOPE_SPAN = (1e-100, 1e100)
REFINE_WIDTH = 1e-10


@dataclass(frozen=True)
class GridSpec:
    t_min: float = 1e-8
    t_max: float = 1e8
    points: int = 2049

    def __post_init__(self):
        if not (0 < self.t_min < self.t_max):
            raise ValueError(f"need 0 < t_min < t_max, got {self.t_min}, {self.t_max}")
        if self.points < 3:
            raise ValueError("a grid needs at least 3 points")

    @property
    def log_step(self):
        return (math.log(self.t_max) - math.log(self.t_min)) / (self.points - 1)

    def log_nodes(self, pad_decades=0):
        """Log-coordinates of the grid, extended by ``pad_decades`` on both
        sides with the same spacing (so the grid is an exact sub-lattice)."""
        h = self.log_step
        k = int(math.ceil(pad_decades * math.log(10.0) / h)) if pad_decades else 0
        return math.log(self.t_min) + h * np.arange(-k, self.points + k)

    def nodes(self):
        return np.exp(self.log_nodes())

    def lattice(self, pad_decades=SEARCH_PAD_DECADES):
        return np.exp(self.log_nodes(pad_decades))

    def central(self, fraction=0.8):
        """Index slice of the central ``fraction`` of the nodes."""
        cut = int(round(self.points * (1.0 - fraction) / 2.0))
        return slice(cut, self.points - cut)

    @classmethod
    def parse(cls, text):
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError("grid must be 'tmin,tmax,points'")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]))

    def __str__(self):
        return f"{self.t_min:g},{self.t_max:g},{self.points}"


DEFAULT_GRID = GridSpec()


def golden_refine(func, lo, hi, maximize=False, width=REFINE_WIDTH, max_iter=200):
    """Vectorised golden-section search on the intervals ``[lo, hi]``.

    ``func`` maps an array of abscissae (same shape as ``lo``) to values.
    Returns ``(x_best, f_best)``. No unimodality is assumed beyond the
    bracket; callers compare against their grid candidate.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    sign = -1.0 if maximize else 1.0

    def f(x):
        return sign * np.asarray(func(x), dtype=float)

    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if np.all(hi - lo <= width):
            break
        left = f1 <= f2  # minimum lies in [lo, x2]
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        nx1 = np.where(left, hi - INV_PHI * (hi - lo), x2)
        nx2 = np.where(left, x1, lo + INV_PHI * (hi - lo))
        ff = f(np.where(left, nx1, nx2))
        f1, f2 = np.where(left, ff, f2), np.where(left, f1, ff)
        x1, x2 = nx1, nx2
    else:
        raise GridTooCoarse("golden-section refinement did not reach the target width")
    xb = np.where(f1 <= f2, x1, x2)
    fb = np.minimum(f1, f2)
    return xb, sign * fb


def refine_scan(func, log_nodes, best_idx, best_val, maximize=False):
    """Golden-section polish around grid winners.

    ``func(x, i)`` evaluates the objective at log-abscissae ``x`` for the
    targets ``i`` (an index array aligned with ``x``). The bracket is the
    pair of neighbouring nodes, clamped at the ends. The better of grid and
    refined values is returned, with the log-location of the winner.
    """
    n = log_nodes.size
    best_idx = np.asarray(best_idx)
    lo = log_nodes[np.clip(best_idx - 1, 0, n - 1)]
    hi = log_nodes[np.clip(best_idx + 1, 0, n - 1)]
    targets = np.arange(best_idx.size)
    xr, fr = golden_refine(lambda x: func(x, targets), lo, hi, maximize=maximize)
    grid_x = log_nodes[best_idx]
    better = fr > best_val if maximize else fr < best_val
    better &= np.isfinite(fr)
    return np.where(better, fr, best_val), np.where(better, xr, grid_x)


class LogLogTable:
    """Piecewise power-law interpolation of a positive function (linear in
    log-log coordinates), extended as a power law past the table ends.

    Each piece is c*t^p; quasi-concave node data give p in [0, 1] on every
    piece, so the interpolant stays quasi-concave and never overshoots a
    kink. End exponents are clipped to [0, 1].
    """

    def __init__(self, t, values):
        self.log_t = np.log(np.asarray(t, dtype=float))
        self.log_v = np.log(np.asarray(values, dtype=float))
        lt, lv = self.log_t, self.log_v
        self._slope_lo = float(np.clip((lv[1] - lv[0]) / (lt[1] - lt[0]), 0.0, 1.0))
        self._slope_hi = float(np.clip((lv[-1] - lv[-2]) / (lt[-1] - lt[-2]), 0.0, 1.0))

    @property
    def domain(self):
        return float(np.exp(self.log_t[0])), float(np.exp(self.log_t[-1]))

    def __call__(self, t):
        x = np.log(np.asarray(t, dtype=float))
        out = np.interp(x, self.log_t, self.log_v)
        below = x < self.log_t[0]
        above = x > self.log_t[-1]
        out = np.where(below, self.log_v[0] + self._slope_lo * (x - self.log_t[0]), out)
        out = np.where(above, self.log_v[-1] + self._slope_hi * (x - self.log_t[-1]), out)
        return np.exp(out)


def extrapolate_limit(outer, middle, inner):
    """Aitken delta-squared limit of a monotone sequence approaching its
    limit from above; ``outer`` is the sample closest to the limit point.
    The result is clamped to ``[0, outer]``."""
    d_out = outer - middle
    d_in = middle - inner
    denom = d_out - d_in
    if d_out == 0.0:
        return max(float(outer), 0.0)
    if denom == 0.0 or not np.isfinite(denom):
        return max(float(outer), 0.0)
    lim = outer - d_out * d_out / denom
    return float(min(max(lim, 0.0), max(outer, 0.0)))


def endpoint_limits(func, log_nodes, stride=None):
    """``(f(0+), lim f(t)/t)`` extrapolated from the outermost nodes.

    The three samples at each end are ``stride`` nodes apart (one decade
    by default): adjacent nodes of a fine grid are too close for the
    Aitken step to be informative.
    """
    n = log_nodes.size
    if stride is None:
        h = log_nodes[1] - log_nodes[0]
        stride = max(1, min((n - 1) // 2, int(round(math.log(10.0) / h))))
    lo = np.exp(log_nodes[[0, stride, 2 * stride]])
    hi = np.exp(log_nodes[[n - 1, n - 1 - stride, n - 1 - 2 * stride]])
    v_lo = np.asarray(func(lo), dtype=float)
    v_hi = np.asarray(func(hi), dtype=float) / hi
    return extrapolate_limit(*v_lo), extrapolate_limit(*v_hi)


DECADE = math.log(10.0)


def tail_integral(g, x0, base=0.0, max_decades=400, rel_tol=1e-13):
    """Integrate ``g`` over ``[x0, inf)`` one decade (in log variable) at a
    time with adaptive quadrature.

    Returns ``(value, divergent)``. Divergence is declared once three
    successive decade increments each exceed 1% of the running value
    (``base`` plus the tail so far) without decaying geometrically
    (increment ratio at least 0.9).
    """
    total = 0.0
    prev = None
    strikes = 0
    quiet = 0
    for k in range(max_decades):
        a = x0 + k * DECADE
        with warnings.catch_warnings():
            # relative 1e-12 is below what smooth pieces can reach in roundoff; quad's
            # best effort is still accurate, so its warning is noise
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            piece, _ = integrate.quad(g, a, a + DECADE, limit=200, epsabs=0.0, epsrel=1e-12)
        total += piece
        running = base + total
        growing = prev is not None and piece >= 0.9 * prev
        if piece > 0.01 * abs(running) and (prev is None or growing):
            strikes += 1
            if strikes >= 3:
                return math.inf, True
        else:
            strikes = 0
        if abs(piece) <= rel_tol * abs(running):
            quiet += 1
            if quiet >= 2:
                return total, False
        else:
            quiet = 0
        prev = piece
    return total, False
