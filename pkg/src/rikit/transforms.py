"""Transforms between quasi-concave functions and the W functions of the
Lorentz, Marcinkiewicz and weak-type families.

Inf/sup transforms are evaluated once on the padded search lattice (a scan
then golden-section polish per node) and returned as tables interpolated
in log-log coordinates. Equivalence checks compare two functions on the
reporting grid.
"""
import functools
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from . import kernels
from .errors import (Condition3Violated, GridExhausted, NonzeroLinearPart,
                     NotQuasiConcave, PostconditionFailed)
from .grid import DECADE, DEFAULT_GRID, LogLogTable, golden_refine, refine_scan, tail_integral
from .qcf import (QuasiConcaveFn, check_condition3, check_samples, from_values, log_affine_tail,
                  search_nodes, validate_quasi_concave)

DEFAULT_WINDOW = 4.0
# decades beyond the reporting grid that transform tables vouch for
TRUSTED_PAD_DECADES = 5
HAT_STEP = 1e-5
# off-node tilde: parabola stencil half-width and fallback golden width (log r units)
OFF_NODE_STENCIL = 1e-3
OFF_NODE_STEPS = 3
OFF_NODE_JUMP = 0.5
OFF_NODE_WIDTH = 1e-7
# W_M growth test: per-decade increments over the last decades of the lattice
W_DIVERGENCE_DECADES = 3
W_DIVERGENCE_GROWTH = 0.01


@dataclass(frozen=True)
class LogAtomForm:
    """c + t * sum_k b_k log(1 + a_k/t)."""
    constant_c: float
    atoms: tuple = ()

    def __post_init__(self):
        atoms = tuple((float(a), float(b)) for a, b in self.atoms)
        if self.constant_c < 0:
            raise ValueError("constant must be nonnegative")
        if any(a <= 0 or b <= 0 for a, b in atoms):
            raise ValueError("atoms need positive a_k and b_k")
        if any(a2 <= a1 for (a1, _), (a2, _) in zip(atoms, atoms[1:])):
            raise ValueError("a_k must be strictly increasing")
        object.__setattr__(self, "atoms", atoms)

    def arrays(self):
        a = np.array([p[0] for p in self.atoms])
        b = np.array([p[1] for p in self.atoms])
        return a, b

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        a, b = self.arrays()
        s = (b * np.log1p(a / t[..., None])).sum(axis=-1) if a.size else 0.0
        return self.constant_c + t * s

    def derivative_j(self, s):
        """(phi^j)'(s) = c + sum a b / (1 + a s)."""
        s = np.asarray(s, dtype=float)
        a, b = self.arrays()
        tail = (a * b / (1.0 + a * s[..., None])).sum(axis=-1) if a.size else 0.0
        return self.constant_c + tail


@dataclass(frozen=True)
class MinAtomForm:
    """c + sigma*t + sum_k h_k min(1, t/t_k)."""
    constant_c: float
    slope_sigma: float
    nodes: tuple = ()

    def __post_init__(self):
        nodes = tuple((float(t), float(h)) for t, h in self.nodes)
        if self.constant_c < 0 or self.slope_sigma < 0:
            raise ValueError("constant and slope must be nonnegative")
        if any(t <= 0 or h <= 0 for t, h in nodes):
            raise ValueError("nodes need positive t_k and h_k")
        if any(t2 <= t1 for (t1, _), (t2, _) in zip(nodes, nodes[1:])):
            raise ValueError("t_k must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)

    def arrays(self):
        tk = np.array([p[0] for p in self.nodes])
        hk = np.array([p[1] for p in self.nodes])
        return tk, hk

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        tk, hk = self.arrays()
        s = (hk * np.minimum(1.0, t[..., None] / tk)).sum(axis=-1) if tk.size else 0.0
        return self.constant_c + self.slope_sigma * t + s

    def derivative_j(self, s):
        """(Phi^j)'(s) = c + sum h_k [s < 1/t_k]; sigma drops out."""
        s = np.asarray(s, dtype=float)
        tk, hk = self.arrays()
        tail = (hk * (s[..., None] < 1.0 / tk)).sum(axis=-1) if tk.size else 0.0
        return self.constant_c + tail


@dataclass(frozen=True)
class EquivalenceReport:
    ratio_low: float
    ratio_high: float
    equivalent: bool
    witness_low: float
    witness_high: float
    window: float

    @property
    def spread(self):
        return self.ratio_high / self.ratio_low


def _lattice(phi, grid):
    return search_nodes(phi, grid)


def _tabulate(x, values, provenance, grid=DEFAULT_GRID):
    """Table over lattice nodes ``x``. Quasi-concavity is enforced strictly
    on the reporting grid; the padding, where truncating the search to the
    lattice bends the values, is projected onto the quasi-concave cone."""
    t = np.exp(x)
    values = np.asarray(values, dtype=float)
    inside = (t >= grid.t_min * (1 - 1e-12)) & (t <= grid.t_max * (1 + 1e-12))
    check_samples(t[inside], values[inside])
    v = np.maximum.accumulate(values)
    v = np.minimum.accumulate(v / t) * t
    pad = 10.0 ** TRUSTED_PAD_DECADES
    trusted = (max(t[0], grid.t_min / pad), min(t[-1], grid.t_max * pad))
    return from_values(t, v, provenance, validate=False, trusted=trusted)


def _tilde_kernel(t, log_r, phi):
    r = np.exp(log_r)
    return t * phi(r) / (r * np.log1p(t / r))


class _InfTable(LogLogTable):
    """Tilde table that evaluates off-node points by minimising over r near
    the neighbouring nodes' minimisers.

    Every branch r -> t*phi(r)/(r*log(1+t/r)) is convex in log-log
    coordinates, so plain interpolation overshoots between nodes. A
    minimised value is always attained by some r, hence never below the
    true infimum. Intervals whose node values were moved by the cone
    projection keep the interpolant.
    """

    def __init__(self, table, log_r, exact, phi, tail=math.inf):
        self.log_t, self.log_v = table.log_t, table.log_v
        self._slope_lo, self._slope_hi = table._slope_lo, table._slope_hi
        self._log_r = log_r
        self._exact = exact
        self._phi = phi
        self._tail = tail

    def _off_node(self, tt, x, kk, h):
        """Minimum over r for t strictly inside cells kk.

        The minimiser moves smoothly between the nodes' minimisers, so a
        parabola through a small stencil at the interpolated guess lands on
        it; points where that fails (kinks, jumps) get a golden search over
        the bracket widened by one node either side.
        """
        kern = functools.partial(_tilde_kernel, tt, phi=self._phi)
        r0, r1 = self._log_r[kk], self._log_r[kk + 1]
        guess = r0 + (x - self.log_t[kk]) / h * (r1 - r0)
        d = OFF_NODE_STENCIL
        best = np.minimum(kern(log_r=r0), kern(log_r=r1))
        # a jump in the node minimisers means a branch switch inside the cell
        ok = np.abs(r1 - r0) <= OFF_NODE_JUMP
        for _ in range(OFF_NODE_STEPS):
            fm, fc, fp = kern(log_r=guess - d), kern(log_r=guess), kern(log_r=guess + d)
            best = np.minimum(best, np.minimum(np.minimum(fm, fc), fp))
            curv = fm - 2.0 * fc + fp
            with np.errstate(divide="ignore", invalid="ignore"):
                shift = 0.5 * d * (fm - fp) / curv
            ok &= (curv > 0) & (np.abs(shift) <= 0.1)
            guess = guess + np.where(ok, shift, 0.0)
        # converged: last Newton step far below the stencil width
        ok &= np.abs(shift) <= 1e-2 * d
        best = np.minimum(best, kern(log_r=guess))
        # minimiser pinned at a lattice end: the kernel is monotone there, the end value is it
        lt = self.log_t
        ok |= (r0 == r1) & ((r0 <= lt[0]) | (r0 >= lt[-1]))
        bad = np.flatnonzero(~ok)
        if bad.size:
            lo = np.minimum(r0[bad], r1[bad]) - h
            hi = np.maximum(r0[bad], r1[bad]) + h
            _, gb = golden_refine(lambda lr: _tilde_kernel(tt[bad], lr, self._phi), lo, hi,
                                  width=OFF_NODE_WIDTH)
            best[bad] = np.minimum(best[bad], gb)
        return best

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.array(LogLogTable.__call__(self, t), dtype=float, ndmin=1)
        x = np.log(t).ravel()
        lt = self.log_t
        k = np.clip(np.searchsorted(lt, x) - 1, 0, lt.size - 2)
        inside = (x > lt[0]) & (x < lt[-1])
        off = np.minimum(np.abs(x - lt[k]), np.abs(x - lt[k + 1])) > 1e-12
        sel = np.flatnonzero(inside & off & self._exact[k])
        if sel.size:
            kk, tt = k[sel], np.exp(x[sel])
            h = lt[1] - lt[0]
            flat = out.ravel()
            flat[sel] = np.minimum(self._off_node(tt, x[sel], kk, h), tt * self._tail)
            out = flat.reshape(out.shape)
        return out.reshape(t.shape) if t.ndim else out[0]


@functools.lru_cache(maxsize=128)
def _small_r_slope(phi, grid):
    """Tail limit of phi(r)/(r*log(1/r)) below the lattice. Past it the
    tilde and nested kernels are then Mobius maps of log(1/r), hence
    monotone, so the whole tail contributes only this limit (times t for
    tilde)."""
    return log_affine_tail(phi, _lattice(phi, grid)[0])


@functools.lru_cache(maxsize=128)
def _tilde_cached(phi, grid):
    x = _lattice(phi, grid)
    r = np.exp(x)
    fr = phi(r)
    best, idx = kernels.scan(kernels.TILDE, r, r, fr, True)

    def obj(xx, targets):
        return _tilde_kernel(r[targets], xx, phi)
    vals, where = refine_scan(obj, x, idx, best)
    tail = _small_r_slope(phi, grid)
    vals = np.minimum(vals, r * tail)
    fn = _tabulate(x, vals, f"tilde({phi.provenance})", grid)
    table = fn.evaluator
    kept = np.abs(table.log_v - np.log(vals)) <= 1e-15 * np.maximum(1.0, np.abs(table.log_v))
    exact = kept[:-1] & kept[1:]
    return replace(fn, evaluator=_InfTable(table, where, exact, phi, tail))


def tilde(phi, grid=DEFAULT_GRID):
    """t -> inf_r t*phi(r) / (r*log(1 + t/r))."""
    return _tilde_cached(phi, grid)


def _sup_scan(kind, phi, t, grid):
    """Vectorised sup over the lattice of one of the W kernels, polished."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x = _lattice(phi, grid)
    u = np.exp(x)
    fu = phi(u)
    best, idx = kernels.scan(kind, t, u, fu, False)

    if kind == kernels.WMARC:
        def obj(xx, targets):
            uu = np.exp(xx)
            tt = t[targets]
            return tt * np.log1p(uu / tt) * phi(uu) / uu
    else:
        def obj(xx, targets):
            uu = np.exp(xx)
            return phi(uu) / (1.0 + uu / t[targets])
    vals, where = refine_scan(obj, x, idx, best, maximize=True)
    return t, x, u, fu, vals, idx


def _unwrap(t_in, out):
    return float(out[0]) if np.ndim(t_in) == 0 else out


def w_marcinkiewicz(phi, t, grid=DEFAULT_GRID):
    """t -> sup_u t*log(1 + u/t)*phi(u)/u, inf when it keeps growing at the
    top of the lattice."""
    t_arr, x, u, fu, vals, idx = _sup_scan(kernels.WMARC, phi, t, grid)
    top = idx == x.size - 1
    if top.any():
        d = int(round(DECADE / (x[1] - x[0])))
        probe = x.size - 1 - d * np.arange(W_DIVERGENCE_DECADES + 1)[::-1]
        probe = probe[probe >= 0]
        for k in np.flatnonzero(top):
            tt = t_arr[k]
            w = tt * np.log1p(u[probe] / tt) * fu[probe] / u[probe]
            inc = np.diff(w)
            if (inc.size == W_DIVERGENCE_DECADES and np.all(inc > W_DIVERGENCE_GROWTH * w[1:])
                    and np.all(np.diff(inc) >= 0)):
                vals[k] = math.inf
    return _unwrap(t, vals)


def w_weak(phi, t, grid=DEFAULT_GRID):
    """t -> sup_u phi(u)/(1 + u/t)."""
    _, _, _, _, vals, _ = _sup_scan(kernels.WEAK, phi, t, grid)
    return _unwrap(t, vals)


def w_lambda(psi, t):
    """t -> t * integral_0^inf psi(r)/(t + r)^2 dr; inf when divergent.

    With r = t*e^x the integrand is psi(t e^x) e^x/(1 + e^x)^2; each half
    line is integrated decade by decade from x = 0.
    """
    def one(tt):
        def g(x):
            ex = math.exp(-abs(x))
            # e^x/(1+e^x)^2 written to stay finite for large |x|
            return float(psi(np.array(tt * math.exp(x)))) * ex / (1.0 + ex) ** 2
        right, div = tail_integral(g, 0.0)
        if div:
            return math.inf
        left, _ = tail_integral(lambda y: g(-y), 0.0, base=right)
        return left + right
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.array([one(tt) for tt in t_arr])
    return _unwrap(t, out)


def _require_condition3(phi, grid):
    rep = check_condition3(phi, grid)
    if not rep.holds:
        raise Condition3Violated(
            f"{phi.provenance} fails phi(t) >= C t log(1+1/t) (best C = {rep.best_constant:.3g} "
            f"near t = {rep.witness_t:.3g})")
    return rep


def _involution_table(f, provenance, grid):
    """1/f(1/t) tabulated on the reflected table nodes."""
    lo, hi = f.domain
    x = -f.evaluator.log_t[::-1] if hasattr(f.evaluator, "log_t") else None
    if x is None:
        raise TypeError("expected a tabulated function")
    vals = 1.0 / f(np.exp(-x))
    return _tabulate(x, vals, provenance, grid)


@functools.lru_cache(maxsize=128)
def _delta_cached(phi, grid):
    _require_condition3(phi, grid)
    return _involution_table(tilde(phi, grid), f"delta({phi.provenance})", grid)


def delta(phi, grid=DEFAULT_GRID):
    """i(tilde(phi)) where i(f)(t) = 1/f(1/t)."""
    return _delta_cached(phi, grid)


@functools.lru_cache(maxsize=32)
def _nested_inner(phi, grid):
    x = _lattice(phi, grid)
    s = np.exp(x)
    fs = phi(s)
    return x, s, fs


# extra lattice nodes on each side of the neighbours' minimisers searched
# when the inner infimum is needed between lattice nodes
INNER_WINDOW = 8


def _inner_inf(phi, grid, r, centres=None):
    """inf_s phi(s)/(s*log(1 + 1/(r*s))) for an array of r. With
    ``centres`` (shape (k, len(r))) only windows of INNER_WINDOW nodes
    around each centre index are scanned."""
    x, s, fs = _nested_inner(phi, grid)
    if centres is None:
        best, idx = kernels.scan(kernels.NESTED, r, s, fs, True)
    else:
        best = np.full(r.size, np.inf)
        idx = np.zeros(r.size, dtype=np.int64)
        for c in centres:
            b, i = kernels.window_scan(kernels.NESTED, r, s, fs, c - INNER_WINDOW,
                                       c + INNER_WINDOW + 1, True)
            better = b < best
            best, idx = np.where(better, b, best), np.where(better, i, idx)

    def obj(xx, targets):
        ss = np.exp(xx)
        return phi(ss) / (ss * np.log1p(1.0 / (r[targets] * ss)))
    vals, _ = refine_scan(obj, x, idx, best)
    return np.minimum(vals, _small_r_slope(phi, grid)), idx


def delta_delta(phi, t, grid=DEFAULT_GRID, check=False, rtol=1e-4):
    """sup_r t*log(1 + 1/(t r)) * inf_s phi(s)/(s log(1 + 1/(r s))).

    The inner infimum is a full lattice scan at lattice nodes r; between
    nodes (outer refinement) it is searched near the minimisers found for
    the neighbouring nodes. With ``check`` the value is compared against
    ``w_marcinkiewicz(tilde(phi), t)`` and a mismatch beyond ``rtol``
    raises PostconditionFailed.
    """
    _require_condition3(phi, grid)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    xr = _lattice(phi, grid)
    r = np.exp(xr)
    inner, inner_idx = _inner_inf(phi, grid, r)
    outer = t_arr[:, None] * np.log1p(1.0 / (t_arr[:, None] * r[None, :])) * inner[None, :]
    idx = np.argmax(outer, axis=1)
    best = outer[np.arange(t_arr.size), idx]
    nb = np.stack([inner_idx[np.clip(idx + d, 0, r.size - 1)] for d in (-1, 0, 1)])

    def obj(xx, targets):
        rr = np.exp(xx)
        tt = t_arr[targets]
        vals, _ = _inner_inf(phi, grid, rr, nb[:, targets])
        return tt * np.log1p(1.0 / (tt * rr)) * vals
    vals, _ = refine_scan(obj, xr, idx, best, maximize=True)
    if check:
        ref = np.atleast_1d(w_marcinkiewicz(tilde(phi, grid), t_arr, grid))
        err = np.abs(vals - ref) / ref
        if np.any(err > rtol):
            k = int(np.argmax(err))
            raise PostconditionFailed(
                f"nested formula {vals[k]:.10g} vs W_M(tilde) {ref[k]:.10g} at t={t_arr[k]:.6g}")
    return _unwrap(t, vals)


def hat(phi, grid=DEFAULT_GRID):
    """t -> (phi^j)'(1/t) with phi^j(s) = s*phi(1/s).

    Exact for functions synthesised from atom forms, otherwise a central
    difference of step HAT_STEP in log coordinates. Differences lose
    precision far out, so the numeric route is tabulated on the reporting
    grid only; the exact route uses the full lattice.
    """
    form = phi.form
    if form is not None and hasattr(form, "derivative_j"):
        x = _lattice(phi, grid)
        s = np.exp(-x)
        vals = form.derivative_j(s)
    else:
        x = grid.log_nodes()
        s = np.exp(-x)
        def j(ss):
            return ss * phi(1.0 / ss)
        up, dn = math.exp(HAT_STEP), math.exp(-HAT_STEP)
        vals = (j(s * up) - j(s * dn)) / (s * (up - dn))
    try:
        return _tabulate(x, vals, f"hat({phi.provenance})", grid)
    except NotQuasiConcave as exc:
        raise NotQuasiConcave(f"hat({phi.provenance}) is not quasi-concave: {exc}",
                              pair=exc.pair) from exc


def synthesize_log_atoms(form, grid=DEFAULT_GRID):
    if not isinstance(form, LogAtomForm):
        raise TypeError("expected a LogAtomForm")
    desc = " + ".join([f"{form.constant_c:g}"] + [f"{b:g}*t*log(1+{a:g}/t)" for a, b in form.atoms])
    return validate_quasi_concave(form, grid, provenance=desc, form=form)


def synthesize_min_atoms(form, grid=DEFAULT_GRID):
    if not isinstance(form, MinAtomForm):
        raise TypeError("expected a MinAtomForm")
    desc = " + ".join([f"{form.constant_c:g}", f"{form.slope_sigma:g}*t"]
                      + [f"{h:g}*min(1,t/{tk:g})" for tk, h in form.nodes])
    return validate_quasi_concave(form, grid, provenance=desc, form=form)


def bk_decompose(phi, grid=DEFAULT_GRID, factor=2.0, window=DEFAULT_WINDOW):
    """Greedy doubling decomposition into c + sigma*t + sum h_k min(1, t/t_k).

    Walking right from t = 1 a node is emitted once phi has grown by
    ``factor`` and phi(t)/t has dropped by ``factor`` since the last node;
    walking left, once phi(t)/t has grown and phi has dropped by ``factor``.
    The node at t = 1 is kept unless c + sigma already carries phi(1).
    """
    t = grid.nodes()
    v = phi(t)
    c = phi.limit_at_zero if phi.limit_at_zero > 1e-9 * v[0] else 0.0
    sigma = phi.slope_at_infinity if phi.slope_at_infinity > 1e-9 * v[-1] / t[-1] else 0.0
    one = float(phi(1.0))
    nodes = []
    if one > factor * (c + sigma):
        nodes.append((1.0, one))
    t_ref, h_ref = 1.0, one
    for tk, hk in zip(t[t > 1.0], v[t > 1.0]):
        if hk >= factor * h_ref and hk / tk <= h_ref / t_ref / factor:
            nodes.append((float(tk), float(hk)))
            t_ref, h_ref = tk, hk
    t_ref, h_ref = 1.0, one
    left = []
    for tk, hk in zip(t[t < 1.0][::-1], v[t < 1.0][::-1]):
        if hk / tk >= factor * h_ref / t_ref and hk <= h_ref / factor:
            left.append((float(tk), float(hk)))
            t_ref, h_ref = tk, hk
    form = MinAtomForm(c, sigma, tuple(left[::-1] + nodes))
    ratio = form(t) / v
    if ratio.min() < 1.0 / window or ratio.max() > window:
        k = int(np.argmax(np.maximum(ratio, 1.0 / ratio)))
        raise GridExhausted(f"reconstruction ratio {ratio[k]:.3g} at t={t[k]:.3g}; enlarge the grid")
    return form


def min_to_log_atoms(form):
    """a_k = t_k, b_k = h_k/t_k, same constant."""
    if form.slope_sigma > 0:
        raise NonzeroLinearPart(f"linear part sigma = {form.slope_sigma:g} must vanish")
    return LogAtomForm(form.constant_c, tuple((tk, h / tk) for tk, h in form.nodes))


def equivalence(f, g, grid=DEFAULT_GRID, window=DEFAULT_WINDOW, full_span=False):
    """Extremes of f/g over the grid (central 80% unless ``full_span``)."""
    t = grid.nodes()
    if not full_span:
        t = t[grid.central()]
    ratio = np.asarray(f(t), dtype=float) / np.asarray(g(t), dtype=float)
    lo, hi = int(np.argmin(ratio)), int(np.argmax(ratio))
    rlo, rhi = float(ratio[lo]), float(ratio[hi])
    ok = bool(np.isfinite(rhi) and rlo > 0 and rhi / rlo <= window)
    return EquivalenceReport(rlo, rhi, ok, float(t[lo]), float(t[hi]), window)


def check_thm45(phi, grid=DEFAULT_GRID, window=DEFAULT_WINDOW, full_span=False):
    """K = sup phi(t)/W_M(tilde(phi))(t); equivalent when K <= window."""
    _require_condition3(phi, grid)
    tl = tilde(phi, grid)
    t = grid.nodes()
    if not full_span:
        t = t[grid.central()]
    w = np.asarray(w_marcinkiewicz(tl, t, grid))
    ratio = phi(t) / w
    lo, hi = int(np.argmin(ratio)), int(np.argmax(ratio))
    k = float(ratio[hi])
    return EquivalenceReport(float(ratio[lo]), k, bool(np.isfinite(k) and k <= window),
                             float(t[lo]), float(t[hi]), window)
