"""Quasi-concave functions on (0, inf): validation, the two canonical
involutions, the submultiplicative envelope, the upper fundamental index and
the two admissibility conditions (the t*log(1+1/t) lower bound and B1)."""
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import NonPositive, NotQuasiConcave
from .grid import (DECADE, DEFAULT_GRID, ENVELOPE_SPAN, SEARCH_PAD_DECADES, GridSpec,
                   LogLogTable, endpoint_limits, golden_refine, refine_scan,
                   tail_integral)

RTOL = 1e-9
# polish width for envelope sups (log units); value error is quadratic in it
ENVELOPE_WIDTH = 1e-7
COND3_THRESHOLD = 1e-12
# log-decay exponent above which t -> 0 probing declares the constant zero
COND3_DECAY_EXPONENT = 0.5


@dataclass(frozen=True, eq=False)
class QuasiConcaveFn:
    """A positive, nondecreasing function with t -> f(t)/t nonincreasing.

    ``evaluator`` must accept numpy arrays. ``domain`` is where the
    evaluator is trustworthy (tabulated transforms extrapolate outside it).
    ``form`` optionally carries the atomic representation the function was
    synthesised from, enabling closed-form derivatives. ``trusted`` narrows
    the domain for searches that are sensitive to edge error (tables built
    by truncated inf/sup searches bend near their ends).
    """
    evaluator: object
    limit_at_zero: float
    slope_at_infinity: float
    provenance: str = "<fn>"
    form: object = None
    domain: tuple = (0.0, math.inf)
    trusted: tuple = None

    @property
    def trusted_domain(self):
        return self.trusted if self.trusted is not None else self.domain

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        out = np.asarray(self.evaluator(arr), dtype=float)
        if out.shape != arr.shape:
            out = np.broadcast_to(out, arr.shape).copy()
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        return f"QuasiConcaveFn({self.provenance})"


@dataclass(frozen=True)
class IndexEstimate:
    value: float
    sampled_infimum: float
    asymptotic_slope: float
    grid: GridSpec
    witness_s: float = math.nan


@dataclass(frozen=True)
class ConditionReport:
    holds: bool
    best_constant: float
    witness_t: float
    details: dict = field(default_factory=dict)


def vectorize(f):
    """Return an array-friendly version of a scalar or vector callable."""
    if isinstance(f, QuasiConcaveFn):
        return f
    probe = np.array([0.5, 2.0])
    try:
        out = np.asarray(f(probe), dtype=float)
        if out.shape == probe.shape:
            return f
    except Exception:
        pass
    vf = np.vectorize(lambda x: float(f(float(x))), otypes=[float])
    return vf


def check_samples(t, v, rtol=RTOL):
    """Raise unless ``v`` sampled at increasing ``t`` is quasi-concave."""
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        bad = int(np.argmax(~np.isfinite(v) | (v <= 0)))
        raise NonPositive(f"value {v[bad]!r} at t={t[bad]:.6g} is not finite and positive",
                          pair=(t[bad], t[bad]))
    drop = v[1:] < v[:-1] * (1.0 - rtol)
    if drop.any():
        i = int(np.argmax(drop))
        raise NotQuasiConcave(
            f"decreasing between t={t[i]:.6g} ({v[i]:.12g}) and t={t[i+1]:.6g} ({v[i+1]:.12g})",
            pair=(t[i], t[i + 1]))
    q = v / t
    rise = q[1:] > q[:-1] * (1.0 + rtol)
    if rise.any():
        i = int(np.argmax(rise))
        raise NotQuasiConcave(
            f"f(t)/t increasing between t={t[i]:.6g} and t={t[i+1]:.6g}",
            pair=(t[i], t[i + 1]))


def validate_quasi_concave(f, grid=DEFAULT_GRID, provenance=None, form=None,
                           log_nodes=None, domain=None):
    """Check quasi-concavity of ``f`` on the grid and attach endpoint data.

    ``log_nodes`` overrides the sampled nodes (transforms validate on their
    padded lattice). Endpoint limits are Aitken-extrapolated from the
    outermost samples.
    """
    ev = vectorize(f)
    if log_nodes is None:
        log_nodes = grid.log_nodes()
    t = np.exp(log_nodes)
    v = np.asarray(ev(t), dtype=float)
    check_samples(t, v)
    zero, slope = endpoint_limits(ev, log_nodes)
    if provenance is None:
        provenance = getattr(f, "provenance", None) or getattr(f, "__name__", "<fn>")
    if domain is None:
        domain = getattr(f, "domain", (0.0, math.inf))
    if form is None:
        form = getattr(f, "form", None)
    return QuasiConcaveFn(ev, zero, slope, provenance, form, tuple(domain))


def from_values(t, values, provenance, validate=True, trusted=None):
    """Wrap a table of samples (power-law pieces between nodes)."""
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if validate:
        check_samples(t, values)
    table = LogLogTable(t, values)
    zero, slope = endpoint_limits(table, np.log(t))
    return QuasiConcaveFn(table, zero, slope, provenance, None, table.domain, trusted)


def involution_i(f, grid=DEFAULT_GRID):
    """t -> 1/f(1/t)."""
    def g(t):
        return 1.0 / f(1.0 / t)
    lo, hi = f.domain
    dom = (1.0 / hi if hi > 0 else math.inf, 1.0 / lo if lo > 0 else math.inf)
    return validate_quasi_concave(g, grid, provenance=f"i({f.provenance})",
                                  log_nodes=_nodes_within(grid, dom), domain=dom)


def involution_j(f, grid=DEFAULT_GRID):
    """t -> t*f(1/t)."""
    def g(t):
        return t * f(1.0 / t)
    lo, hi = f.domain
    dom = (1.0 / hi if hi > 0 else math.inf, 1.0 / lo if lo > 0 else math.inf)
    return validate_quasi_concave(g, grid, provenance=f"j({f.provenance})",
                                  log_nodes=_nodes_within(grid, dom), domain=dom)


def _nodes_within(grid, domain, pad_decades=0):
    x = grid.log_nodes(pad_decades)
    lo, hi = domain
    keep = np.ones(x.size, dtype=bool)
    if lo > 0:
        keep &= x >= math.log(lo) - 1e-12
    if math.isfinite(hi):
        keep &= x <= math.log(hi) + 1e-12
    return x[keep]


def search_nodes(f, grid, pad_decades=SEARCH_PAD_DECADES):
    """Log-nodes of the padded search lattice, restricted to f's domain."""
    return _nodes_within(grid, f.domain, pad_decades)


def _envelope_nodes(f, grid):
    """Wide search nodes for the envelope, aligned with the grid spacing and
    trimmed to the block where f is finite and positive."""
    h = grid.log_step
    dom = f.trusted_domain
    lo = max(ENVELOPE_SPAN[0], dom[0]) if dom[0] > 0 else ENVELOPE_SPAN[0]
    hi = min(ENVELOPE_SPAN[1], dom[1])
    start = math.ceil(math.log(lo) / h)
    stop = math.floor(math.log(hi) / h)
    x = h * np.arange(start, stop + 1)
    with np.errstate(all="ignore"):
        v = np.asarray(f(np.exp(x)), dtype=float)
    ok = np.isfinite(v) & (v > 0)
    centre = int(np.argmin(np.abs(x)))
    if not ok[centre]:
        raise NonPositive("function not positive near t = 1")
    a = centre
    while a > 0 and ok[a - 1]:
        a -= 1
    b = centre
    while b < x.size - 1 and ok[b + 1]:
        b += 1
    return x[a:b + 1], np.log(v[a:b + 1])


def log_affine_tail(f, x0):
    """lim_{t->0} f(t)/(t*log(1/t)) estimated from t = e^x0 upwards; inf
    unless f(t)/t is already affine in log(1/t) over those two decades.

    Such tails converge like 1/log(1/t), so sups and infs that run off
    towards t = 0 must take the limit instead of trusting a finite scan.
    """
    t = np.exp(x0 + DECADE * np.arange(3))
    with np.errstate(all="ignore"):
        g = np.asarray(f(t), dtype=float) / t
    s1, s2 = (g[0] - g[1]) / DECADE, (g[1] - g[2]) / DECADE
    if np.isfinite(s1) and s1 > 0 and abs(s1 - s2) <= 1e-9 * s1:
        return float(s1)
    return math.inf


def envelope(f, grid=DEFAULT_GRID):
    """Submultiplicative envelope s -> sup_t f(t*s)/f(t).

    Tabulated at s = exp(k*h) (h the grid log-step) covering the grid span;
    each supremum is a lattice scan followed by golden-section polish.
    A log-affine tail at 0 pushes f(t*s)/f(t) up to its bound s for s > 1.
    """
    x, lv = _envelope_nodes(f, grid)
    h = grid.log_step
    n = x.size
    kmax = int(math.ceil(max(abs(math.log(grid.t_min)), abs(math.log(grid.t_max))) / h)) + 1
    kmax = min(kmax, n - 1)
    ks = np.arange(-kmax, kmax + 1)
    best, idx = kernels.offset_scan(lv, ks)

    def obj(xt, targets):
        # one call for both abscissae: table evaluation has a fixed cost per call
        lv2 = np.log(f(np.exp(np.concatenate([xt + ks[targets] * h, xt]))))
        return lv2[:xt.size] - lv2[xt.size:]

    # bracket limited to the valid index range for each offset
    jlo = np.maximum(idx - 1, np.maximum(0, -ks))
    jhi = np.minimum(idx + 1, np.minimum(n - 1, n - 1 - ks))
    targets = np.arange(ks.size)
    with np.errstate(all="ignore"):
        xr, fr = golden_refine(lambda xt: obj(xt, targets), x[jlo], x[jhi], maximize=True,
                               width=ENVELOPE_WIDTH)
    better = np.isfinite(fr) & (fr > best)
    logenv = np.where(better, fr, best)
    logenv[ks == 0] = 0.0
    # running max guards against refinement noise breaking monotonicity
    s = np.exp(ks * h)
    vals = np.exp(logenv)
    if math.isfinite(log_affine_tail(f, x[0])):
        vals = np.where(s > 1.0, s, vals)
    vals = np.maximum.accumulate(vals)
    q = np.minimum.accumulate(vals / s)
    vals = q * s
    return from_values(s, vals, f"envelope({f.provenance})")


def upper_fundamental_index(f, grid=DEFAULT_GRID):
    env = envelope(f, grid)
    s = grid.nodes()
    s = s[s > 1.0 + 1e-12]
    ratios = np.log(env(s)) / np.log(s)
    i = int(np.argmin(ratios))
    top = s >= grid.t_max / 10.0
    if top.sum() >= 2:
        slope = float(np.polyfit(np.log(s[top]), np.log(env(s[top])), 1)[0])
    else:
        slope = float(ratios[-1])
    sampled = float(ratios[i])
    return IndexEstimate(min(sampled, slope), sampled, slope, grid, float(s[i]))


def _cond3_ratio(f):
    def rho(t):
        return f(t) / (t * np.log1p(1.0 / t))
    return rho


def check_condition3(f, grid=DEFAULT_GRID):
    """Best constant C with f(t) >= C*t*log(1+1/t).

    The infimum is scanned over the padded search lattice and polished;
    then the t -> 0 trend is probed: if the ratio decays like a positive
    power of log(1/t) the constant is reported as 0, and if f(t)/t is
    affine in log(1/t) the ratio's limit (reached only like 1/log(1/t))
    caps the constant.
    """
    rho = _cond3_ratio(f)
    x = search_nodes(f, grid)
    vals = rho(np.exp(x))
    i = int(np.argmin(vals))
    best, where = refine_scan(lambda xx, _: rho(np.exp(xx)), x, np.array([i]),
                              np.array([vals[i]]))
    best, witness = float(best[0]), float(np.exp(where[0]))
    # decay probe between the lattice bottom and the geometric midpoint to 1
    t0 = math.exp(x[0])
    details = {"decay_exponent": 0.0}
    if t0 < 1.0:
        t1 = math.sqrt(t0)
        r0, r1 = float(rho(np.array(t0))), float(rho(np.array(t1)))
        big_l0, big_l1 = math.log(1.0 / t0), math.log(1.0 / t1)
        p = -math.log(r0 / r1) / math.log(big_l0 / big_l1)
        details["decay_exponent"] = p
        if p >= COND3_DECAY_EXPONENT:
            best, witness = 0.0, t0
    tail = log_affine_tail(f, x[0])
    details["tail_limit"] = tail
    # finite-difference limit: only trust it past roundoff
    if tail < best * (1.0 - 1e-9):
        best, witness = tail, t0
    return ConditionReport(best > COND3_THRESHOLD, best, witness, details)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def _interval_integrals(g, x):
    """Gauss-Legendre integrals of g over consecutive intervals of x."""
    a, b = x[:-1, None], x[1:, None]
    mid, half = (a + b) / 2, (b - a) / 2
    pts = mid + half * _GL_X[None, :]
    return (half[:, 0]) * (g(pts) @ _GL_W)


def check_B1(f, grid=DEFAULT_GRID):
    """Best constant in int_t^inf f(r)/r^2 dr <= C f(t)/t over the grid.

    Integrals are taken in the variable x = log r. Between the grid top and
    the padded-lattice top the integrand is integrated on every lattice
    cell; beyond that, decade by decade with a divergence test.
    """
    def g(xx):
        return f(np.exp(xx)) * np.exp(-xx)

    xg = grid.log_nodes()
    xl = search_nodes(f, grid)
    upper = xl[xl >= xg[-1] - 1e-12]
    cells = _interval_integrals(g, xg)
    mid = float(_interval_integrals(g, upper).sum()) if upper.size > 1 else 0.0
    far, divergent = tail_integral(lambda xx: float(g(np.array(xx))), upper[-1], base=mid)
    if divergent:
        return ConditionReport(False, math.inf, float(np.exp(xg[-1])), {"divergent": True})
    tail = np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]]) + mid + far
    t = np.exp(xg)
    ratio = t / f(t) * tail
    i = int(np.argmax(ratio))
    return ConditionReport(True, float(ratio[i]), float(t[i]), {"divergent": False})
