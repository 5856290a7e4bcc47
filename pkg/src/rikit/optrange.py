"""Optimal-range norms as linear programs over decreasing step functions,
and the weak-L1 majorant construction.

Decision variable: a decreasing step g with value x_i on the cell
(u_{i-1}, u_i]. For decreasing g,

    integral_0^s S g = integral_0^s g(v) log(s/v) dv,

and each cell contributes F(min(u_i, s)) - F(min(u_{i-1}, s)) with
F(u) = u log(s/u) + u, so the Banach constraints are linear in x.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import Infeasible, NotInDomain, PostconditionFailed
from .grid import DEFAULT_GRID, GridSpec
from .lp import LPProblem, lp_solve
from .rearrange import DecreasingStepFn, SimpleFn, decreasing_rearrangement, hardy
from .transforms import _require_condition3

CELLS = 200
SAMPLES = 400
SPAN = (1e-6, 1e6)


@dataclass(frozen=True, eq=False)
class RangeNormResult:
    value: float
    witness: DecreasingStepFn
    grid: GridSpec
    cells: np.ndarray = field(default=None, repr=False)
    samples: np.ndarray = field(default=None, repr=False)
    max_constraint_violation: float = 0.0


def _merge(base, extra, lo, hi):
    extra = np.asarray([e for e in extra if lo <= e <= hi and math.isfinite(e)], dtype=float)
    pts = np.unique(np.concatenate([base, extra]))
    # drop points closer than a relative 1e-12 to a neighbour
    keep = np.concatenate([[True], np.diff(np.log(pts)) > 1e-12])
    return pts[keep]


def _layout(extra, cells, samples, span):
    lo, hi = span
    u = _merge(np.geomspace(lo, hi, cells), extra, lo, hi)
    s = _merge(np.geomspace(lo, hi, samples), extra, lo, hi)
    return u, s


def _log_entries(u, s):
    """Cellwise integral of log(s/v) over (u_{i-1}, u_i] intersected with (0, s]."""
    edges = np.concatenate([[0.0], u])
    ss = s[:, None]
    clip = np.minimum(edges[None, :], ss)
    with np.errstate(divide="ignore", invalid="ignore"):
        big_f = np.where(clip > 0, clip * np.log(ss / clip) + clip, 0.0)
    return np.diff(big_f, axis=1)


def _len_entries(u, s):
    edges = np.concatenate([[0.0], u])
    return np.diff(np.minimum(edges[None, :], s[:, None]), axis=1)


def _objective(phi, u):
    vals = phi(u)
    return np.diff(np.concatenate([[0.0], vals]))


def _solve(a, b, phi, u, s, grid):
    c = _objective(phi, u)
    sol = lp_solve(LPProblem(c, a, b, monotone=True))
    if not sol.feasible:
        raise Infeasible(f"LP {sol.status}: the cell range cannot carry the constraints")
    x = np.maximum(sol.solution, 0.0)
    x = np.minimum.accumulate(x)  # strip round-off reversals
    return RangeNormResult(sol.value, DecreasingStepFn(u, x), grid, u, s,
                           sol.max_constraint_violation)


def _check_support(fstar, span):
    fstar = fstar if isinstance(fstar, DecreasingStepFn) else decreasing_rearrangement(fstar)
    if len(fstar) and fstar.support > span[1]:
        raise Infeasible(f"support {fstar.support:g} exceeds the cell range {span[1]:g}")
    return fstar


def norm_optimal_banach(fstar, phi, grid=DEFAULT_GRID, cells=CELLS, samples=SAMPLES, span=SPAN):
    """inf ||g||_Lambda over decreasing g with
    integral_0^s g(v) log(s/v) dv >= integral_0^s f* at every sample s."""
    _require_condition3(phi, grid)
    fstar = _check_support(fstar, span)
    u, s = _layout(fstar.x, cells, samples, span)
    cum = fstar.cumulative()
    rhs = np.interp(s, fstar.edges, cum) if len(fstar) else np.zeros_like(s)
    return _solve(_log_entries(u, s), rhs, phi, u, s, grid)


def w_optimal_banach(phi, t, grid=DEFAULT_GRID, cells=CELLS, samples=SAMPLES, span=SPAN):
    """Same LP with right-hand side t*log(1 + s/t). The indicator of (0, t]
    is feasible, so the value never exceeds phi(t)."""
    _require_condition3(phi, grid)
    u, s = _layout([t], cells, samples, span)
    a = _log_entries(u, s)
    rhs = t * np.log1p(s / t)
    ind = (u <= t * (1 + 1e-12)).astype(float)
    if np.any(a @ ind < rhs * (1 - 1e-12)):
        raise PostconditionFailed("indicator of (0, t] is not feasible")
    res = _solve(a, rhs, phi, u, s, grid)
    bound = float(phi(t))
    if res.value > bound * (1 + 1e-6):
        raise PostconditionFailed(f"LP value {res.value:.10g} exceeds phi(t) = {bound:.10g}")
    return res


def fundamental_optimal_range(phi, t, grid=DEFAULT_GRID, cells=CELLS, samples=SAMPLES, span=SPAN):
    """Optimal-range norm of the indicator of (0, t]."""
    return norm_optimal_banach(DecreasingStepFn.indicator(t), phi, grid, cells, samples, span)


def norm_optimal_quasi(fstar, phi, grid=DEFAULT_GRID, cells=CELLS, samples=SAMPLES, span=SPAN):
    """inf ||g||_Lambda over decreasing g with s*f*(s) <= integral_0^s g."""
    fstar = _check_support(fstar, span)
    u, s = _layout(fstar.x, cells, samples, span)
    rhs = s * fstar(s)
    return _solve(_len_entries(u, s), rhs, phi, u, s, grid)


def refinement_trend(solver, *args, levels=3, cells=CELLS // 2, samples=SAMPLES // 2, **kw):
    """LP values as cells and samples double ``levels - 1`` times."""
    out = []
    for k in range(levels):
        res = solver(*args, cells=cells * 2 ** k, samples=samples * 2 ** k, **kw)
        out.append(res.value)
    return out


def _domain_slope(fstar):
    n = min(3, len(fstar))
    if n < 2:
        return 1.0
    lx = np.log(fstar.x[:n])
    return float(np.polyfit(lx, np.log(fstar.x[:n] * fstar.v[:n]), 1)[0])


def _discretize(f, grid):
    t0, t1 = grid.t_min * 1e-4, grid.t_min
    r = (t0 * float(f(t0))) / (t1 * float(f(t1)))
    if not r < 0.5:
        raise NotInDomain("t*f*(t) does not vanish as t -> 0")
    t = grid.nodes()
    v = np.asarray(f(t), dtype=float)
    return DecreasingStepFn(t, np.minimum.accumulate(v))


def weak_L1_majorant(fstar, grid=DEFAULT_GRID):
    """Decreasing g with f*(t) <= S(g)(t) for every t.

    h(t) = sup_{s<t} s f*(s) is piecewise linear for step input; g = h' up
    to the point T where h reaches its supremum and 0 after, so that
    integral_0^T g = sup t f*(t). Returned rearranged (decreasing). Inputs
    need not be normalised: the construction is homogeneous.
    """
    if not isinstance(fstar, DecreasingStepFn):
        if isinstance(fstar, SimpleFn):
            fstar = decreasing_rearrangement(fstar)
        else:
            fstar = _discretize(fstar, grid)
    if not len(fstar):
        return DecreasingStepFn.zero()
    if not math.isfinite(fstar.support):
        raise NotInDomain("t*f*(t) must be bounded; support is unbounded")
    if _domain_slope(fstar) < 0.05:
        raise NotInDomain("t*f*(t) does not vanish as t -> 0 on the leftmost cells")
    e, v = fstar.edges, fstar.v
    peaks = fstar.x * v
    top = np.maximum.accumulate(peaks)
    prev = np.concatenate([[0.0], top[:-1]])
    k_end = int(np.argmax(peaks)) + 1  # cells up to where h peaks
    pieces = []
    for i in range(k_end):
        start = max(e[i], prev[i] / v[i])
        if e[i + 1] > start:
            pieces.append((v[i], e[i + 1] - start))
    g = decreasing_rearrangement(SimpleFn(pieces))
    sg = hardy(g)
    t = np.unique(np.concatenate([grid.nodes(), fstar.x]))
    lhs, rhs = fstar(t), sg(t)
    bad = lhs > rhs * (1 + 1e-9)
    if bad.any():
        k = int(np.argmax(bad))
        raise PostconditionFailed(f"f*({t[k]:.6g}) = {lhs[k]:.10g} exceeds S(g*) = {rhs[k]:.10g}")
    return g
