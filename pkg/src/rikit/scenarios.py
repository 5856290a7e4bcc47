"""Registered scenarios: each one reproduces a worked example or checks a
theorem-level identity on the catalog and returns a ScenarioReport.

All randomness is seeded, so reports are reproducible; ``timing=False``
zeroes runtime_ms for byte-identical output.
"""
import functools
import math
import time

import numpy as np

from . import catalog
from .errors import (Condition3Violated, NonzeroLinearPart, NotInDomain, NotQuasiConcave,
                     UnknownScenario)
from .grid import DEFAULT_GRID
from .optrange import (fundamental_optimal_range, norm_optimal_banach, norm_optimal_quasi,
                       w_optimal_banach, weak_L1_majorant)
from .qcf import check_condition3, envelope, upper_fundamental_index, validate_quasi_concave
from .rearrange import DecreasingStepFn, SimpleFn, hardy, quasinorm_weak
from .report import ScenarioReport
from .transforms import (DEFAULT_WINDOW, LogAtomForm, MinAtomForm, bk_decompose, check_thm45,
                         delta, delta_delta, equivalence, hat, min_to_log_atoms,
                         synthesize_log_atoms, tilde, w_lambda, w_marcinkiewicz, w_weak)

SEED = 20240611
T_PROBES = (0.01, 1.0, 100.0)
# admissible catalog: every member satisfies phi >= C t log(1+1/t)
ADMISSIBLE = ("t*log(1+1/t)", "max(1,t)", "t/log(1+t)", "t^0.3", "t^0.5", "t^0.8")
# log-atom synthesis from a min-atom form doubles the min-atom window
SYNTH_WINDOW = 16.0
# endpoint limits of tabulated transforms are extrapolated; tolerance in units of phi(1)
LIMIT_TOL = 0.05
REL = 1e-6
DD_RTOL = 1e-4
EX411_WINDOW = 1.05


@functools.lru_cache(maxsize=None)
def fn(name, grid=DEFAULT_GRID):
    """Validated catalog member, cached so transform caches are shared."""
    return validate_quasi_concave(catalog.CATALOG[name], grid, provenance=name)


def _probe_nodes(grid, count=41):
    t = grid.nodes()[grid.central()]
    return t[np.linspace(0, t.size - 1, count).round().astype(int)]


def random_log_atom_forms(n=20, seed=SEED, max_atoms=4):
    """Seeded LogAtomForms with 1..max_atoms atoms spread over 1e-4..1e4."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        k = int(rng.integers(1, max_atoms + 1))
        a = np.sort(10.0 ** rng.uniform(-4, 4, size=k))
        b = 10.0 ** rng.uniform(-1, 1, size=k)
        c = float(rng.uniform(0, 1)) if rng.random() < 0.5 else 0.0
        out.append(LogAtomForm(c, tuple(zip(a, b))))
    return out


# -- optimal range of S on Lorentz spaces

def _example_2_8(rep, grid, window):
    # L^{p,1} for p = 2, 4/3 and L^1
    for alpha in (0.5, 0.75):
        phi = validate_quasi_concave(catalog.power(alpha), grid, provenance=f"t^{alpha:g}")
        idx = upper_fundamental_index(phi, grid)
        rep.add(f"index of t^{alpha:g} is below 1", "< 1", idx.value, "< 1", idx.value < 1.0,
                idx.witness_s)
        c3 = check_condition3(phi, grid)
        rep.holds(f"t^{alpha:g} satisfies the log lower bound", c3.holds, c3.best_constant,
                  c3.witness_t)
        res = fundamental_optimal_range(phi, 1.0, grid)
        rep.ratio_in(f"optimal range of L^(p,1) indicator norm at 1, t^{alpha:g}", res.value,
                     phi(1.0), 1 / 8, 8)
    ident = validate_quasi_concave(catalog.ident, grid, provenance="t")
    idx = upper_fundamental_index(ident, grid)
    rep.at_least("index of t reaches 1", idx.value, 1.0 - 0.02, idx.witness_s)
    c3 = check_condition3(ident, grid)
    rep.holds("t fails the log lower bound", not c3.holds, c3.best_constant, c3.witness_t)
    rep.raises("L^1 has no optimal range", Condition3Violated,
               lambda: norm_optimal_banach(DecreasingStepFn.indicator(1.0), ident, grid))


def _example_2_9(rep, grid, window):
    phi = fn("max(1,t)", grid)
    tl = tilde(phi, grid)
    rep.equivalent("fundamental function of the range ~ t/log(1+t)",
                   equivalence(tl, catalog.t_over_log, grid, window))
    for t in T_PROBES:
        res = fundamental_optimal_range(phi, t, grid)
        rep.ratio_in(f"LP indicator norm vs tilde at t={t:g}", res.value, tl(t), 1 / 8, 8)
    res = w_optimal_banach(phi, 1.0, grid)
    rep.ratio_in("W of the range at t=1 vs phi(1)", res.value, phi(1.0), 1 / 8, 8)
    rep.curves["tilde(max(1,t))"] = (grid.nodes(), tl(grid.nodes()))


def _example_2_10(rep, grid, window):
    phi = fn("t*log(1+1/t)", grid)
    tl = tilde(phi, grid)
    rep.equivalent("range is L1+Linf: tilde ~ min(1,t)", equivalence(tl, catalog.min1, grid, window))
    for t in T_PROBES:
        res = w_optimal_banach(phi, t, grid)
        rep.ratio_in(f"W of the range at t={t:g} vs phi(t)", res.value, phi(t), 1 / 8, 8)


# -- quasi-Banach range

def _thm_3_1(rep, grid, window):
    t = _probe_nodes(grid, 21)
    for name in ADMISSIBLE + ("min(1,t)",):
        phi = fn(name, grid)
        r = np.asarray(w_weak(phi, t, grid)) / phi(t)
        k = int(np.argmax(np.abs(np.log(r))))
        rep.add(f"W of weak-type space / phi in [1/2, 1] for {name}", "[0.5, 1]",
                float(r[k]), "ratio in [0.5, 1+1e-6]",
                bool(r.min() >= 0.5 and r.max() <= 1 + REL), float(t[k]))


def _prop_3_4(rep, grid, window):
    rng = np.random.default_rng(SEED)
    for name in ("t^0.5", "max(1,t)"):
        phi = fn(name, grid)
        for trial in range(2):
            k = int(rng.integers(2, 5))
            f = SimpleFn(list(zip(rng.uniform(0.1, 3.0, k), 10.0 ** rng.uniform(-2, 2, k))))
            weak = quasinorm_weak(f, phi, grid)
            res = norm_optimal_quasi(f, phi, grid)
            rep.at_most(f"weak quasinorm <= 4 x range quasinorm, {name} #{trial}", weak,
                        4 * res.value)


def _remark_3_5(rep, grid, window):
    x = np.arange(1, 65) / 64.0
    fstar = DecreasingStepFn(x, x ** -0.5)
    g = weak_L1_majorant(fstar, grid)
    t = np.unique(np.concatenate([grid.nodes(), x]))
    lhs, rhs = fstar(t), hardy(g)(t)
    k = int(np.argmax(lhs / rhs))
    rep.at_most("f* <= S(g*) on the grid (max ratio)", float(lhs[k] / rhs[k]), 1 + 1e-9,
                float(t[k]))
    rep.close("integral of g* equals sup t f*(t)", g.integral(),
              float(np.max(fstar.x * fstar.v)), 1e-12)
    rep.raises("f*(t) = 1/t is outside the domain", NotInDomain,
               lambda: weak_L1_majorant(lambda s: 1.0 / np.asarray(s), grid))


# -- the tilde transform

def _lemma_4_1(rep, grid, window):
    t = grid.nodes()
    for name in ADMISSIBLE:
        phi = fn(name, grid)
        v = tilde(phi, grid)(t)
        rep.holds(f"tilde nondecreasing, {name}", np.all(np.diff(v) >= -REL * v[1:]))
        q = v / t
        rep.holds(f"tilde/t nonincreasing, {name}", np.all(np.diff(q) <= REL * q[:-1]))
        c = check_condition3(phi, grid).best_constant
        low = c * np.minimum(1.0, t) * (1 - REL)
        k = int(np.argmax(low / v))
        rep.at_most(f"C min(1,t) <= tilde, {name} (max ratio)", float(low[k] / v[k]), 1.0,
                    float(t[k]))


def _remark_4_2(rep, grid, window):
    for name in ADMISSIBLE:
        phi = fn(name, grid)
        tl = tilde(phi, grid)
        tol = LIMIT_TOL * phi(1.0)
        rep.add(f"tilde keeps phi(0+), {name}", phi.limit_at_zero, tl.limit_at_zero,
                f"abs {tol:.3g}", abs(tl.limit_at_zero - phi.limit_at_zero) <= tol)
        rep.add(f"tilde has zero slope at infinity, {name}", 0.0, tl.slope_at_infinity,
                f"abs {tol:.3g}", abs(tl.slope_at_infinity) <= tol)


def _lemma_4_3(rep, grid, window):
    t = _probe_nodes(grid)
    for name in ADMISSIBLE:
        phi = fn(name, grid)
        w = np.asarray(w_marcinkiewicz(tilde(phi, grid), t, grid))
        r = w / phi(t)
        k = int(np.argmax(r))
        rep.at_most(f"W of M(tilde) <= phi, {name} (max ratio)", float(r[k]), 1 + REL, float(t[k]))


def _lemma_4_4(rep, grid, window):
    t = _probe_nodes(grid)
    tn = grid.nodes()
    for name in ADMISSIBLE:
        phi = fn(name, grid)
        tl = tilde(phi, grid)
        c = check_condition3(phi, grid).best_constant
        cands = {"C min(1,t)": lambda s, c=c: c * np.minimum(1.0, s),
                 "tilde/2": lambda s, tl=tl: 0.5 * tl(s)}
        for label, fun in cands.items():
            cand = validate_quasi_concave(fun, grid, provenance=label)
            w = np.asarray(w_marcinkiewicz(cand, t, grid))
            admissible = bool(np.all(w <= phi(t) * (1 + REL)))
            r = cand(tn) / tl(tn)
            k = int(np.argmax(r))
            rep.add(f"{label} below tilde for {name}", "<= 1+1e-6", float(r[k]),
                    "admissible => ratio <= 1+1e-6", admissible and r[k] <= 1 + REL, float(tn[k]))


def _thm_4_5(rep, grid, window):
    for name in ("t*log(1+1/t)", "t^0.3", "t^0.5", "t^0.8"):
        phi = fn(name, grid)
        form = bk_decompose(phi, grid, window=window)
        rep.equivalent(f"min-atom decomposition ~ phi, {name}",
                       equivalence(form, phi, grid, window))
        synth = synthesize_log_atoms(min_to_log_atoms(form), grid)
        rep.equivalent(f"log-atom synthesis ~ phi, {name}",
                       equivalence(synth, phi, grid, SYNTH_WINDOW))
        rep.equivalent(f"phi ~ W of M(tilde), {name}", check_thm45(phi, grid, window))
    rep.raises("linear part blocks log-atom conversion", NonzeroLinearPart,
               lambda: min_to_log_atoms(MinAtomForm(0.0, 1.0, ((1.0, 1.0),))))


def _prop_4_6(rep, grid, window):
    for name in ("max(1,t)", "t^0.5", "t*log(1+1/t)"):
        phi = fn(name, grid)
        tl = tilde(phi, grid)
        for t in T_PROBES:
            res = fundamental_optimal_range(phi, t, grid)
            rep.ratio_in(f"LP indicator norm / tilde, {name}, t={t:g}", res.value, tl(t), 1 / 8, 8)


def _lemma_4_7(rep, grid, window):
    s = grid.nodes()
    for name in ADMISSIBLE:
        phi = fn(name, grid)
        r = envelope(tilde(phi, grid), grid)(s) / envelope(phi, grid)(s)
        k = int(np.argmax(r))
        rep.at_most(f"envelope of tilde <= envelope, {name} (max ratio)", float(r[k]), 1 + REL,
                    float(s[k]))


def _thm_4_8(rep, grid, window):
    for alpha in (0.3, 0.5, 0.8):
        name = f"t^{alpha:g}"
        phi = fn(name, grid)
        idx = upper_fundamental_index(phi, grid)
        rep.at_most(f"index of {name} <= alpha + 0.02", idx.value, alpha + 0.02, idx.witness_s)
        rep.equivalent(f"tilde ~ phi for {name}", equivalence(tilde(phi, grid), phi, grid, window))
    for name in ("max(1,t)", "t*log(1+1/t)"):
        phi = fn(name, grid)
        idx = upper_fundamental_index(phi, grid)
        rep.at_least(f"index of {name} >= 0.98", idx.value, 0.98, idx.witness_s)
        rep.equivalent(f"tilde not ~ phi over the full grid for {name}",
                       equivalence(tilde(phi, grid), phi, grid, window, full_span=True),
                       expect=False)


def _prop_4_9(rep, grid, window):
    tl = tilde(fn("max(1,t)", grid), grid)
    rep.equivalent("tilde(max(1,t)) ~ t/log(1+t)", equivalence(tl, catalog.t_over_log, grid, window))
    rep.curves["tilde(max(1,t))"] = (grid.nodes(), tl(grid.nodes()))


def _prop_4_10(rep, grid, window):
    phi = fn("t*log(1+1/t)", grid)
    tl = tilde(phi, grid)
    rep.equivalent("tilde(t log(1+1/t)) ~ min(1,t)", equivalence(tl, catalog.min1, grid, window))
    rep.equivalent("phi ~ W of M(tilde)", check_thm45(phi, grid, window))
    rep.curves["tilde(t*log(1+1/t))"] = (grid.nodes(), tl(grid.nodes()))


def _example_4_11(rep, grid, window):
    tl = tilde(fn("t/log(1+t)", grid), grid)
    rep.equivalent("tilde(t/log(1+t)) ~ t/log^2(1+sqrt t)",
                   equivalence(tl, catalog.t_over_log2_sqrt, grid, EX411_WINDOW))
    rep.curves["tilde(t/log(1+t))"] = (grid.nodes(), tl(grid.nodes()))


def _rel_err(a, b):
    return np.abs(a - b) / np.abs(b)


def _thm_4_12(rep, grid, window):
    t = grid.nodes()[grid.central()]
    for name in ("t*log(1+1/t)", "max(1,t)", "t^0.5", "t/log(1+t)"):
        phi = fn(name, grid)
        dd = np.asarray(delta_delta(phi, t, grid))
        w = np.asarray(w_marcinkiewicz(tilde(phi, grid), t, grid))
        e = _rel_err(dd, w)
        k = int(np.argmax(e))
        rep.at_most(f"delta-delta = W of M(tilde), {name} (max rel err)", float(e[k]), DD_RTOL,
                    float(t[k]))
        d1 = delta(phi, grid)
        d3 = delta(delta(d1, grid), grid)
        e = _rel_err(d3(t), d1(t))
        k = int(np.argmax(e))
        rep.at_most(f"delta^3 = delta, {name} (max rel err)", float(e[k]), DD_RTOL, float(t[k]))
        c3 = check_condition3(d1, grid)
        rep.holds(f"delta satisfies the log lower bound, {name}", c3.holds, c3.best_constant,
                  c3.witness_t)
        # the envelope dominates C * delta, C the log lower-bound constant of phi
        c = check_condition3(phi, grid).best_constant
        r = envelope(phi, grid)(t) / (c * d1(t))
        k = int(np.argmin(r))
        rep.at_least(f"envelope >= C delta, {name} (min ratio)", float(r[k]), 1 - REL, float(t[k]))


def _cor_4_13(rep, grid, window):
    t = _probe_nodes(grid)
    pairs = (("max(1,t)", lambda s: np.maximum(1.0, s) + np.sqrt(s), "max(1,t)+t^0.5"),
             ("t*log(1+1/t)", lambda s: catalog.t_log(s) + catalog.frac(s),
              "t*log(1+1/t)+t/(t+1)"))
    for base, fun, label in pairs:
        p1 = fn(base, grid)
        p2 = validate_quasi_concave(fun, grid, provenance=label)
        t1, t2 = tilde(p1, grid), tilde(p2, grid)
        eq = equivalence(t1, t2, grid, window)
        rep.equivalent(f"tilde({base}) ~ tilde({label})", eq)
        w1 = np.asarray(w_marcinkiewicz(t1, t, grid))
        w2 = np.asarray(w_marcinkiewicz(t2, t, grid))
        r = w1 / w2
        spread = float(r.max() / r.min())
        rep.add(f"W of M(tilde) equivalent for {base} and {label}", f"spread <= {window:g}",
                spread, f"spread <= {window:g}", spread <= window, float(t[int(np.argmax(r))]))


# -- the hat transform

def _thm_5_1(rep, grid, window):
    for name in ("t*log(1+1/t)", "t^0.3", "t^0.5", "t^0.8"):
        phi = fn(name, grid)
        h = hat(phi, grid)
        for t in T_PROBES:
            rep.ratio_in(f"W of Lambda(hat) / phi, {name}, t={t:g}", w_lambda(h, t), phi(t),
                         1 / window, window)
    rep.raises("hat(max(1,t)) is not quasi-concave", NotQuasiConcave,
               lambda: hat(fn("max(1,t)", grid), grid))


def _example_5_2(rep, grid, window):
    phi = fn("t*log(1+1/t)", grid)
    h = hat(phi, grid)
    rng = np.random.default_rng(SEED)
    t = np.sort(rng.choice(grid.nodes(), 50, replace=False))
    e = _rel_err(h(t), catalog.frac(t))
    k = int(np.argmax(e))
    rep.at_most("hat(t log(1+1/t)) = t/(t+1) (max rel err)", float(e[k]), 1e-6, float(t[k]))
    for tt in T_PROBES:
        rep.ratio_in(f"W of Lambda(hat) / phi at t={tt:g}", w_lambda(h, tt), phi(tt),
                     1 / window, window)
    rep.curves["hat(t*log(1+1/t))"] = (grid.nodes(), h(grid.nodes()))


def _thm_5_3(rep, grid, window):
    # log-atom form -> hat -> W of Lambda(hat) reproduces phi
    for i, form in enumerate(random_log_atom_forms(4)):
        phi = synthesize_log_atoms(form, grid)
        h = hat(phi, grid)
        for t in T_PROBES:
            rep.ratio_in(f"random log-atom #{i}: W of Lambda(hat) / phi at t={t:g}",
                         w_lambda(h, t), phi(t), 1 / window, window)
    # phi with vanishing slope at infinity -> log-atom form
    for name in ("t*log(1+1/t)", "t^0.5"):
        phi = fn(name, grid)
        synth = synthesize_log_atoms(min_to_log_atoms(bk_decompose(phi, grid, window=window)),
                                     grid)
        rep.equivalent(f"log-atom form ~ {name}", equivalence(synth, phi, grid, SYNTH_WINDOW))
    rep.raises("max(1,t) carries a linear part", NonzeroLinearPart,
               lambda: min_to_log_atoms(bk_decompose(fn("max(1,t)", grid), grid, window=window)))
    ident = validate_quasi_concave(catalog.ident, grid, provenance="t")
    rep.add("W of Lambda(t) diverges", "inf", w_lambda(ident, 1.0), "== inf",
            math.isinf(w_lambda(ident, 1.0)))


SCENARIOS = {
    "cor-4.13": _cor_4_13,
    "example-2.10": _example_2_10,
    "example-2.8": _example_2_8,
    "example-2.9": _example_2_9,
    "example-4.11": _example_4_11,
    "example-5.2": _example_5_2,
    "lemma-4.1": _lemma_4_1,
    "lemma-4.3": _lemma_4_3,
    "lemma-4.4": _lemma_4_4,
    "lemma-4.7": _lemma_4_7,
    "prop-3.4": _prop_3_4,
    "prop-4.10": _prop_4_10,
    "prop-4.6": _prop_4_6,
    "prop-4.9": _prop_4_9,
    "remark-3.5": _remark_3_5,
    "remark-4.2": _remark_4_2,
    "thm-3.1": _thm_3_1,
    "thm-4.12": _thm_4_12,
    "thm-4.5-roundtrip": _thm_4_5,
    "thm-4.8": _thm_4_8,
    "thm-5.1": _thm_5_1,
    "thm-5.3-roundtrip": _thm_5_3,
}


def scenario_names():
    return sorted(SCENARIOS)


def run_scenario(name, grid=DEFAULT_GRID, window=DEFAULT_WINDOW, timing=True):
    if name not in SCENARIOS:
        raise UnknownScenario(f"unknown scenario {name!r}; see `ri-kit list`")
    rep = ScenarioReport(name)
    start = time.perf_counter()
    SCENARIOS[name](rep, grid, window)
    rep.runtime_ms = (time.perf_counter() - start) * 1e3 if timing else 0.0
    return rep


def run_all(grid=DEFAULT_GRID, window=DEFAULT_WINDOW, timing=True):
    return [run_scenario(n, grid, window, timing) for n in scenario_names()]
