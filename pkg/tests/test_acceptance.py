"""Acceptance criteria 1-10. Each test prints one PASS/FAIL line with its
wall time; every item must also finish within 10 s."""
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from rikit import catalog
from rikit.errors import Condition3Violated, NotInDomain
from rikit.optrange import fundamental_optimal_range, norm_optimal_banach, norm_optimal_quasi
from rikit.optrange import weak_L1_majorant
from rikit.qcf import (check_condition3, envelope, involution_i, involution_j,
                       upper_fundamental_index, validate_quasi_concave)
from rikit.rearrange import (DecreasingStepFn, SimpleFn, hardy, norm_lambda, norm_marcinkiewicz,
                             quasinorm_weak)
from rikit.scenarios import random_log_atom_forms
from rikit.transforms import (delta, delta_delta, equivalence, hat, synthesize_log_atoms, tilde,
                              w_lambda, w_marcinkiewicz)

PROBES = (0.01, 1.0, 100.0)
TIME_LIMIT = 10.0
REL = 1e-6


@contextmanager
def criterion(capsys, n, text):
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        dt = time.perf_counter() - t0
        assert dt < TIME_LIMIT, f"took {dt:.1f} s"
        ok = True
    finally:
        dt = time.perf_counter() - t0
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {text} ({dt:.2f} s)")


def test_criterion_1(capsys, cat, grid):
    with criterion(capsys, 1, "tilde(t/log(1+t)) ~ t/log^2(1+sqrt t) at window 1.05"):
        rep = equivalence(tilde(cat("t/log(1+t)"), grid), catalog.t_over_log2_sqrt, grid, 1.05)
        assert rep.equivalent, rep


def test_criterion_2(capsys, cat, grid):
    with criterion(capsys, 2, "hat(t log(1+1/t)) = t/(t+1) and W_Lambda of it ~ phi"):
        h = hat(cat("t*log(1+1/t)"), grid)
        t = np.random.default_rng(2).choice(grid.nodes(), 50, replace=False)
        assert np.allclose(h(t), t / (t + 1), rtol=1e-6, atol=0)
        for s in PROBES:
            assert 0.25 <= w_lambda(h, s) / (s * math.log1p(1 / s)) <= 4


def test_criterion_3(capsys, cat, grid):
    with criterion(capsys, 3, "tilde catalog: max(1,t) -> t/log(1+t), t log(1+1/t) -> min(1,t)"):
        assert equivalence(tilde(cat("max(1,t)"), grid), catalog.t_over_log, grid, 4).equivalent
        assert equivalence(tilde(cat("t*log(1+1/t)"), grid), catalog.min1, grid, 4).equivalent


def test_criterion_4(capsys, cat, grid):
    with criterion(capsys, 4, "delta_delta = W_M(tilde) and delta^3 = delta within 1e-4"):
        t = grid.nodes()[grid.central()]
        for name in ("t*log(1+1/t)", "max(1,t)", "t^0.5", "t/log(1+t)"):
            phi = cat(name)
            tt = t[::8]
            dd = delta_delta(phi, tt, grid)
            w = w_marcinkiewicz(tilde(phi, grid), tt, grid)
            assert np.max(np.abs(dd - w) / w) <= 1e-4, name
            d = delta(phi, grid)
            d3 = delta(delta(d, grid), grid)
            assert np.max(np.abs(d3(t) - d(t)) / d(t)) <= 1e-4, name


def test_criterion_5(capsys, cat, grid):
    with criterion(capsys, 5, "index bound and tilde ~ phi exactly when the index is below 1"):
        for a in ("0.3", "0.5", "0.8"):
            phi = cat(f"t^{a}")
            assert upper_fundamental_index(phi, grid).value <= float(a) + 0.02
            assert equivalence(tilde(phi, grid), phi, grid, 4).equivalent
        for name in ("max(1,t)", "t*log(1+1/t)"):
            phi = cat(name)
            assert upper_fundamental_index(phi, grid).value >= 0.98
            assert not equivalence(tilde(phi, grid), phi, grid, 4, full_span=True).equivalent


def test_criterion_6(capsys, cat, grid):
    with criterion(capsys, 6, "fundamental function of the optimal range / tilde in [1/8, 8]"):
        for name in ("max(1,t)", "t^0.5", "t*log(1+1/t)"):
            phi = cat(name)
            for t in PROBES:
                res = fundamental_optimal_range(phi, t, grid)
                assert res.cells.size >= 200 and res.samples.size >= 400
                assert 1 / 8 <= res.value / tilde(phi, grid)(t) <= 8, (name, t)


def test_criterion_7(capsys, cat, grid):
    with criterion(capsys, 7, "quasi-Banach optimal range of indicators / phi in [1/4, 4]"):
        for name in ("max(1,t)", "t^0.5", "t*log(1+1/t)"):
            phi = cat(name)
            for t in PROBES:
                v = norm_optimal_quasi(DecreasingStepFn.indicator(t), phi, grid).value
                assert 0.25 <= v / phi(t) <= 4, (name, t)


def test_criterion_8(capsys, grid):
    with criterion(capsys, 8, "weak-L1 majorant of a t^-1/2 staircase; 1/t is rejected"):
        x = np.linspace(0, 1, 65)[1:]
        fstar = DecreasingStepFn(x, x ** -0.5)
        g = weak_L1_majorant(fstar, grid)
        t = grid.nodes()
        assert np.all(fstar(t) <= hardy(g)(t) * (1 + 1e-9))
        with pytest.raises(NotInDomain):
            weak_L1_majorant(lambda s: 1 / np.asarray(s, dtype=float), grid)


def _lemma_suites(phi, grid, rng):
    t = grid.nodes()
    tl = tilde(phi, grid)
    v = tl(t)
    # Lemma 4.1
    assert np.all(np.diff(v) >= -REL * v[1:])
    assert np.all(np.diff(v / t) <= REL * (v / t)[:-1])
    c3 = check_condition3(phi, grid)
    assert c3.holds
    low = c3.best_constant * np.minimum(1, t)
    assert np.all(low * (1 - REL) <= v)
    # Eq. 9: r = 1 in the infimum caps tilde by phi(1) t/log(1+t)
    c = np.max(v * np.log1p(t) / t)
    assert c <= phi(1.0) * (1 + REL)
    # Lemma 4.3
    tp = t[grid.central()][::64]
    assert np.all(w_marcinkiewicz(tl, tp, grid) <= phi(tp) * (1 + REL))
    # Lemma 4.7(i)
    assert np.all(envelope(tl, grid)(t) <= envelope(phi, grid)(t) * (1 + REL))
    # Remark 4.2
    tol = 0.05 * phi(1.0)
    assert abs(tl.limit_at_zero - phi.limit_at_zero) <= tol
    assert abs(tl.slope_at_infinity) <= tol
    # norm chain
    k = int(rng.integers(1, 6))
    f = SimpleFn(zip(rng.uniform(0.1, 10, k), 10.0 ** rng.uniform(-3, 3, k)))
    w, m, lam = quasinorm_weak(f, phi), norm_marcinkiewicz(f, phi, grid), norm_lambda(f, phi)
    assert w <= m * (1 + 1e-9) and m <= lam * (1 + 1e-9)
    # involution laws
    for op in (involution_i, involution_j):
        assert np.allclose(op(op(phi, grid), grid)(t), phi(t), rtol=1e-9)
    assert np.allclose(involution_i(involution_j(phi, grid), grid)(t),
                       involution_j(involution_i(phi, grid), grid)(t), rtol=1e-9)


def test_criterion_9(capsys, grid):
    with criterion(capsys, 9, "lemma suites on 20 random log-atom forms"):
        rng = np.random.default_rng(9)
        for form in random_log_atom_forms(20):
            _lemma_suites(synthesize_log_atoms(form, grid), grid, rng)


def test_criterion_10(capsys, cat, grid):
    with criterion(capsys, 10, "phi(t) = t fails the log lower bound; its optimal range is refused"):
        phi = cat("t")
        assert not check_condition3(phi, grid).holds
        with pytest.raises(Condition3Violated):
            norm_optimal_banach(DecreasingStepFn.indicator(1.0), phi, grid)
