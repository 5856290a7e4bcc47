"""Simple functions on (0, inf) and their exact calculus.

Step functions are closed under distribution/rearrangement; the Hardy
operator and its conjugate map decreasing steps to pieces of the form
a + b/t + c*log(t), which ``ClosedFormPiecewise`` stores exactly.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import UnboundedSupport
from .grid import DEFAULT_GRID, golden_refine


class SimpleFn:
    """Values taken on sets of given measure; equal values are merged."""

    def __init__(self, pieces):
        merged = {}
        for value, measure in pieces:
            value, measure = float(value), float(measure)
            if value < 0 or not math.isfinite(value):
                raise ValueError(f"values must be finite and nonnegative, got {value}")
            if not (measure > 0 and math.isfinite(measure)):
                raise ValueError(f"measures must be finite and positive, got {measure}")
            merged[value] = merged.get(value, 0.0) + measure
        if not merged:
            raise ValueError("a simple function needs at least one piece")
        self.pieces = tuple(sorted(merged.items(), reverse=True))

    @property
    def values(self):
        return np.array([p[0] for p in self.pieces])

    @property
    def measures(self):
        return np.array([p[1] for p in self.pieces])

    def integral(self):
        return float(np.dot(self.values, self.measures))

    def __eq__(self, other):
        return isinstance(other, SimpleFn) and self.pieces == other.pieces

    def __hash__(self):
        return hash(self.pieces)

    def __repr__(self):
        return f"SimpleFn({list(self.pieces)})"


class DecreasingStepFn:
    """Value ``values[i]`` on (x_i, x_{i+1}] with x_0 = 0; zero past the last
    breakpoint. The last breakpoint may be ``inf``. Consecutive equal values
    are merged and trailing zeros dropped, so the representation is unique.
    """

    def __init__(self, breakpoints, values):
        x = np.asarray(breakpoints, dtype=float).ravel()
        v = np.asarray(values, dtype=float).ravel()
        if x.size and x[0] == 0.0 and x.size == v.size + 1:
            x = x[1:]
        if x.size != v.size:
            raise ValueError("need one value per breakpoint")
        if x.size and (x[0] <= 0 or np.any(np.diff(x) <= 0)):
            raise ValueError("breakpoints must be positive and strictly increasing")
        if np.any(v < 0) or np.any(np.isnan(v)) or np.any(np.diff(v) > 0):
            raise ValueError("values must be nonnegative and nonincreasing")
        keep = np.ones(v.size, dtype=bool)
        keep[:-1] = v[:-1] != v[1:]  # a tie extends the later breakpoint
        x, v = x[keep], v[keep]
        nz = v > 0
        self.x, self.v = x[nz], v[nz]
        self.x.flags.writeable = False
        self.v.flags.writeable = False

    @classmethod
    def indicator(cls, t):
        return cls([t], [1.0])

    @classmethod
    def zero(cls):
        return cls([], [])

    @property
    def edges(self):
        return np.concatenate([[0.0], self.x])

    @property
    def support(self):
        return float(self.x[-1]) if self.x.size else 0.0

    def __len__(self):
        return self.v.size

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.x, t, side="left")
        vals = np.concatenate([self.v, [0.0]])
        out = vals[idx]
        return float(out) if out.ndim == 0 else out

    def right_value(self, t):
        """Right-continuous evaluation (value on [x_{i-1}, x_i))."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.x, t, side="right")
        out = np.concatenate([self.v, [0.0]])[idx]
        return float(out) if out.ndim == 0 else out

    def cumulative(self):
        """C_i = integral over (0, x_i]; C_0 = 0."""
        with np.errstate(invalid="ignore"):
            return np.concatenate([[0.0], np.cumsum(self.v * np.diff(self.edges))])

    def integral(self):
        return float(self.cumulative()[-1])

    def to_simple(self):
        return SimpleFn(zip(self.v, np.diff(self.edges)))

    def __eq__(self, other):
        return (isinstance(other, DecreasingStepFn) and np.array_equal(self.x, other.x)
                and np.array_equal(self.v, other.v))

    def __hash__(self):
        return hash((self.x.tobytes(), self.v.tobytes()))

    def __repr__(self):
        return f"DecreasingStepFn(x={self.x.tolist()}, v={self.v.tolist()})"


@dataclass(frozen=True, eq=False)
class ClosedFormPiecewise:
    """t -> a_k + b_k/t + c_k*log(t) on (edges[k], edges[k+1]]."""
    edges: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=float)
        c = np.asarray(self.coeffs, dtype=float).reshape(-1, 3)
        if e[0] != 0.0 or e[-1] != math.inf or c.shape[0] != e.size - 1:
            raise ValueError("edges must run from 0 to inf with one coefficient row per piece")
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "coeffs", c)
        for k in range(1, e.size - 1):
            left, right = self._piece(k - 1, e[k]), self._piece(k, e[k])
            scale = np.abs(c[k - 1] * [1.0, 1.0 / e[k], math.log(e[k])]).sum() + abs(left)
            if abs(left - right) > 1e-12 * max(scale, 1e-300) * 16:
                raise ValueError(f"discontinuity at t={e[k]:.6g}: {left} vs {right}")

    def _piece(self, k, t):
        a, b, c = self.coeffs[k]
        return a + b / t + c * math.log(t)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(self.edges[1:-1], t, side="left")
        a, b, c = self.coeffs[k].T
        with np.errstate(divide="ignore", invalid="ignore"):
            out = a + np.where(b != 0, b / t, 0.0) + np.where(c != 0, c * np.log(t), 0.0)
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        rows = ", ".join(f"({lo:g},{hi:g}]: {a:g}{b:+g}/t{c:+g}log t"
                         for lo, hi, (a, b, c) in zip(self.edges[:-1], self.edges[1:], self.coeffs))
        return f"ClosedFormPiecewise({rows})"


def _as_decreasing(f):
    return f if isinstance(f, DecreasingStepFn) else decreasing_rearrangement(f)


def distribution(f):
    """lambda_f(y) = |{f > y}| as a step function of the level y.

    Returned in ``DecreasingStepFn`` form: use ``right_value`` for the
    right-continuous convention.
    """
    if isinstance(f, DecreasingStepFn):
        f = f.to_simple() if len(f) else None
        if f is None:
            return DecreasingStepFn.zero()
    vals, meas = f.values, f.measures
    pos = vals > 0
    vals, meas = vals[pos], meas[pos]
    levels = vals[::-1]
    counts = np.cumsum(meas)[::-1]
    return DecreasingStepFn(levels, counts)


def decreasing_rearrangement(f):
    if isinstance(f, DecreasingStepFn):
        return f
    vals, meas = f.values, f.measures
    pos = vals > 0
    return DecreasingStepFn(np.cumsum(meas[pos]), vals[pos])


def double_star(f):
    """f**(t) = (1/t) * integral of f* over (0, t], exactly."""
    f = _as_decreasing(f)
    if not len(f):
        return ClosedFormPiecewise(np.array([0.0, math.inf]), np.zeros((1, 3)))
    e = f.edges
    cum = f.cumulative()
    rows = [(v, cum[i] - v * e[i], 0.0) for i, v in enumerate(f.v)]
    edges = list(e)
    if math.isfinite(e[-1]):
        rows.append((0.0, cum[-1], 0.0))
        edges.append(math.inf)
    return ClosedFormPiecewise(np.array(edges), np.array(rows))


def hardy(f):
    """S f(t) = (1/t) * integral of f over (0, t] for decreasing steps."""
    return double_star(_as_decreasing(f))


def conjugate_hardy(f):
    """S'f(t) = integral of f(s)/s over (t, inf), with log pieces."""
    f = _as_decreasing(f)
    if not len(f):
        return ClosedFormPiecewise(np.array([0.0, math.inf]), np.zeros((1, 3)))
    if not math.isfinite(f.x[-1]):
        raise UnboundedSupport("conjugate Hardy operator needs bounded support")
    e = f.edges
    logs = np.log(f.x)
    # contribution of the cells strictly to the right of cell i
    cell = np.zeros(len(f))
    cell[1:] = f.v[1:] * (logs[1:] - logs[:-1])
    after = np.concatenate([np.cumsum(cell[::-1])[::-1][1:], [0.0]])
    rows = [(f.v[i] * logs[i] + after[i], 0.0, -f.v[i]) for i in range(len(f))]
    rows.append((0.0, 0.0, 0.0))
    return ClosedFormPiecewise(np.concatenate([e, [math.inf]]), np.array(rows))


def iterated_hardy(g):
    """t -> S(S g)(t) for a decreasing step g, using
    integral_0^t S g = integral_0^t g(v) log(t/v) dv cellwise."""
    g = _as_decreasing(g)
    e = g.edges

    def ssg(t):
        t = np.asarray(t, dtype=float)
        tt = t[..., None]
        lo = e[:-1]
        hi = np.minimum(e[1:], tt)
        with np.errstate(divide="ignore", invalid="ignore"):
            upper = np.where(hi > lo, hi * np.log(tt / hi) + hi, 0.0)
            lower = np.where((hi > lo) & (lo > 0), lo * np.log(tt / np.where(lo > 0, lo, 1.0)) + lo, 0.0)
        out = ((upper - lower) * g.v).sum(axis=-1) / t
        return float(out) if out.ndim == 0 else out
    return ssg


def dilate(f, a):
    """(E_a f)(s) = f(a*s)."""
    if not a > 0:
        raise ValueError("dilation factor must be positive")
    if isinstance(f, DecreasingStepFn):
        return DecreasingStepFn(f.x / a, f.v)
    if isinstance(f, ClosedFormPiecewise):
        c = f.coeffs.copy()
        c[:, 0] += c[:, 2] * math.log(a)
        c[:, 1] /= a
        return ClosedFormPiecewise(f.edges / a, c)

    def g(s):
        return f(a * np.asarray(s, dtype=float))
    return g


def norm_lambda(f, phi):
    """Layer-cake sum: sum_i (v_i - v_{i+1}) * phi(x_i)."""
    f = _as_decreasing(f)
    if not len(f):
        return 0.0
    steps = f.v - np.concatenate([f.v[1:], [0.0]])
    return float(np.dot(steps, phi(f.x)))


def norm_marcinkiewicz(f, phi, grid=DEFAULT_GRID):
    """sup_t f**(t) * phi(t): breakpoints and grid nodes scanned, then the
    best node polished by golden-section search between its neighbours."""
    f = _as_decreasing(f)
    if not len(f):
        return 0.0
    fss = double_star(f)
    finite = f.x[np.isfinite(f.x)]
    t = np.unique(np.concatenate([grid.nodes(), finite]))
    vals = fss(t) * phi(t)
    i = int(np.argmax(vals))
    best = float(vals[i])
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, t.size - 1)]
    if hi > lo:
        def obj(x):
            s = np.exp(x)
            return fss(s) * phi(s)
        _, fr = golden_refine(obj, np.array([math.log(lo)]), np.array([math.log(hi)]),
                              maximize=True)
        if np.isfinite(fr[0]):
            best = max(best, float(fr[0]))
    return best


def quasinorm_weak(f, phi, grid=DEFAULT_GRID):
    """max_i v_i * phi(x_i); an infinite last breakpoint uses the top of
    the padded search lattice."""
    f = _as_decreasing(f)
    if not len(f):
        return 0.0
    x = np.where(np.isfinite(f.x), f.x, grid.lattice()[-1])
    return float(np.max(f.v * phi(x)))
