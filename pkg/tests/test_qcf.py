import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rikit import catalog
from rikit.errors import NonPositive, NotQuasiConcave
from rikit.grid import DEFAULT_GRID
from rikit.qcf import (check_B1, check_condition3, envelope, from_values, involution_i,
                       involution_j, upper_fundamental_index, validate_quasi_concave)
from rikit.transforms import LogAtomForm, synthesize_log_atoms

T = DEFAULT_GRID.nodes()
TC = T[DEFAULT_GRID.central()]


def v(f, name="f"):
    return validate_quasi_concave(f, provenance=name)


# -- validation ---------------------------------------------------------------

def test_validate_max():
    f = v(catalog.max1)
    assert f.limit_at_zero == pytest.approx(1.0, rel=1e-9)
    assert f.slope_at_infinity == pytest.approx(1.0, rel=1e-9)
    assert f(2.0) == 2.0 and isinstance(f(2.0), float)


def test_validate_tlog_limits():
    f = v(catalog.t_log)
    assert f.limit_at_zero < 1e-6
    assert f.slope_at_infinity < 1e-6


def test_validate_square_rejected_with_pair():
    with pytest.raises(NotQuasiConcave) as exc:
        v(lambda t: t ** 2)
    a, b = exc.value.pair
    assert a < b and b ** 2 / b > a ** 2 / a


def test_validate_decreasing_rejected():
    with pytest.raises(NotQuasiConcave):
        v(lambda t: 1.0 / (1.0 + t))


def test_validate_nonpositive():
    with pytest.raises(NonPositive):
        v(lambda t: t - 1.0)


def test_scalar_callable_is_vectorised():
    f = v(lambda t: math.sqrt(t))
    assert np.allclose(f(np.array([4.0, 9.0])), [2.0, 3.0])


def test_from_values_interpolates_power_law():
    t = np.geomspace(1e-3, 1e3, 61)
    f = from_values(t, np.sqrt(t), "sqrt")
    s = np.geomspace(1e-3, 1e3, 1000)
    assert np.allclose(f(s), np.sqrt(s), rtol=1e-12)


# -- involutions --------------------------------------------------------------

@pytest.mark.parametrize("src,img", [
    (catalog.power(0.3), catalog.power(0.3)),
    (catalog.max1, catalog.min1),
    (catalog.t_log, catalog.t_over_log),
])
def test_involution_i_examples(src, img):
    g = involution_i(v(src))
    assert np.allclose(g(T), img(T), rtol=1e-12)


@pytest.mark.parametrize("src,img", [
    (catalog.t_log, lambda t: np.log1p(t)),
    (catalog.power(0.3), catalog.power(0.7)),
    (catalog.min1, catalog.min1),
])
def test_involution_j_examples(src, img):
    g = involution_j(v(src))
    assert np.allclose(g(T), img(T), rtol=1e-12)


# -- envelope and index -------------------------------------------------------

def test_envelope_power():
    e = envelope(v(catalog.power(0.5)))
    assert np.allclose(e(TC), np.sqrt(TC), rtol=1e-9)


@pytest.mark.parametrize("f", [catalog.max1, catalog.min1])
def test_envelope_max_and_min(f):
    e = envelope(v(f))
    assert np.allclose(e(TC), np.maximum(1.0, TC), rtol=1e-9)
    assert e(1.0) == pytest.approx(1.0, abs=1e-12)


def test_index_examples():
    assert upper_fundamental_index(v(catalog.power(0.5))).value == pytest.approx(0.5, abs=1e-6)
    assert upper_fundamental_index(v(catalog.max1)).value == pytest.approx(1.0, abs=1e-3)
    assert upper_fundamental_index(v(catalog.t_log)).value == pytest.approx(1.0, abs=1e-2)


# -- admissibility conditions -------------------------------------------------

def test_condition3_equality_case():
    r = check_condition3(v(catalog.t_log))
    assert r.holds and r.best_constant == 1.0


def test_condition3_min_fails():
    r = check_condition3(v(catalog.min1))
    assert not r.holds and r.best_constant == 0.0


def test_condition3_max_constant():
    r = check_condition3(v(catalog.max1))
    assert r.holds
    assert r.best_constant == pytest.approx(1 / math.log(2), rel=1e-9)
    assert r.witness_t == pytest.approx(1.0, rel=1e-4)


def test_condition3_identity_fails():
    assert not check_condition3(v(catalog.ident)).holds


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_b1_power_closed_form(alpha):
    # (t/t^a) * int_t^inf r^(a-2) dr = 1/(1-a)
    r = check_B1(v(catalog.power(alpha)))
    assert r.holds
    assert r.best_constant == pytest.approx(1 / (1 - alpha), rel=1e-6)


@pytest.mark.parametrize("f", [catalog.ident, catalog.max1])
def test_b1_divergent(f):
    r = check_B1(v(f))
    assert not r.holds and math.isinf(r.best_constant)


# -- properties on random log-atom forms ---------------------------------------

atoms = st.lists(st.tuples(st.floats(-4, 4), st.floats(-1, 1)), min_size=1, max_size=4,
                 unique_by=lambda p: round(p[0], 3))


def _form(raw, c):
    raw = sorted(raw)
    return LogAtomForm(c, tuple((10.0 ** a, 10.0 ** b) for a, b in raw))


@settings(max_examples=15)
@given(atoms, st.floats(0, 1))
def test_involutions_are_involutive(raw, c):
    f = synthesize_log_atoms(_form(raw, c))
    for op in (involution_i, involution_j):
        back = op(op(f))
        assert np.allclose(back(T), f(T), rtol=1e-12)


@settings(max_examples=8)
@given(atoms, st.floats(0, 1))
def test_envelope_dominance_and_submultiplicativity(raw, c):
    f = synthesize_log_atoms(_form(raw, c))
    e = envelope(f)
    s = T[::64]
    for t0 in T[::256]:
        assert np.all(e(s) >= f(s * t0) / f(t0) * (1 - 1e-9))
    s1, s2 = np.meshgrid(T[200:1800:160], T[200:1800:160])
    assert np.all(e(s1 * s2) <= e(s1) * e(s2) * (1 + 1e-6))


@settings(max_examples=8)
@given(atoms, st.floats(0, 1))
def test_index_bounds(raw, c):
    est = upper_fundamental_index(synthesize_log_atoms(_form(raw, c)))
    assert 0.0 <= est.value <= 1.0 + 1e-6
