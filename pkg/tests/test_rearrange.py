import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from rikit import catalog
from rikit.errors import UnboundedSupport
from rikit.qcf import validate_quasi_concave
from rikit.rearrange import (ClosedFormPiecewise, DecreasingStepFn, SimpleFn, conjugate_hardy,
                             decreasing_rearrangement, dilate, distribution, double_star, hardy,
                             iterated_hardy, norm_lambda, norm_marcinkiewicz, quasinorm_weak)

F21 = SimpleFn([(2, 1), (1, 2)])
PHI_T = validate_quasi_concave(catalog.ident, provenance="t")
PHI_MAX = validate_quasi_concave(catalog.max1, provenance="max")
PHI_SQRT = validate_quasi_concave(catalog.power(0.5), provenance="sqrt")


def quad(f, a, b):
    return integrate.quad(f, a, b, limit=200, epsabs=0, epsrel=1e-12)[0]


# -- distribution and rearrangement -------------------------------------------

def test_distribution_examples():
    lam = distribution(F21)
    assert [lam.right_value(y) for y in (0.0, 0.5, 1.0, 1.5, 2.0, 3.0)] == [3, 3, 1, 1, 0, 0]
    lam = distribution(SimpleFn([(3, 1), (2, 1), (1, 1)]))
    assert [lam.right_value(y) for y in (0.0, 1.0, 2.0, 3.0)] == [3, 2, 1, 0]
    lam = distribution(SimpleFn([(1, 0.7)]))
    assert lam.right_value(0.5) == 0.7 and lam.right_value(1.0) == 0.0


def test_rearrangement_examples():
    fs = decreasing_rearrangement(F21)
    assert fs.x.tolist() == [1.0, 3.0] and fs.v.tolist() == [2.0, 1.0]
    fs = decreasing_rearrangement(SimpleFn([(5, 0.5)]))
    assert fs.x.tolist() == [0.5] and fs.v.tolist() == [5.0]


def test_ties_merged():
    f = SimpleFn([(1, 1), (2, 1), (1, 2)])
    assert f.pieces == ((2.0, 1.0), (1.0, 3.0))


def test_decreasing_step_validation():
    with pytest.raises(ValueError):
        DecreasingStepFn([1, 2], [1, 2])
    with pytest.raises(ValueError):
        DecreasingStepFn([2, 1], [2, 1])
    with pytest.raises(ValueError):
        SimpleFn([])
    assert DecreasingStepFn([0, 1, 2], [3, 3]) == DecreasingStepFn([2], [3])


simple = st.lists(st.tuples(st.floats(0.01, 100), st.floats(0.01, 10)), min_size=1, max_size=6)


@given(simple)
def test_equimeasurability(pieces):
    f = SimpleFn(pieces)
    fs = decreasing_rearrangement(f)
    assert fs.integral() == pytest.approx(f.integral(), rel=1e-12)
    assert distribution(fs) == distribution(f)


@given(simple, st.randoms(use_true_random=False))
def test_norms_permutation_invariant(pieces, r):
    shuffled = list(pieces)
    r.shuffle(shuffled)
    a, b = SimpleFn(pieces), SimpleFn(shuffled)
    assert norm_lambda(a, PHI_SQRT) == norm_lambda(b, PHI_SQRT)
    assert quasinorm_weak(a, PHI_SQRT) == quasinorm_weak(b, PHI_SQRT)


# -- Hardy operators ------------------------------------------------------------

def test_double_star_example():
    fss = double_star(F21)
    u = np.array([0.5, 1.0, 2.0, 3.0, 5.0])
    assert np.allclose(fss(u), [2, 2, 1.5, 4 / 3, 0.8])


def test_hardy_indicator():
    s = np.geomspace(1e-3, 1e3, 50)
    assert np.allclose(hardy(DecreasingStepFn.indicator(1.0))(s), np.minimum(1, 1 / s))
    assert np.allclose(hardy(DecreasingStepFn.indicator(4.0))(s), np.minimum(1, 4 / s))


def test_hardy_zero():
    assert np.all(hardy(DecreasingStepFn.zero())(np.array([0.1, 1, 10])) == 0)
    assert np.all(conjugate_hardy(DecreasingStepFn.zero())(np.array([0.1, 1, 10])) == 0)


def test_conjugate_hardy_examples():
    s = np.array([0.1, 0.5, 1.0, 2.0])
    assert np.allclose(conjugate_hardy(DecreasingStepFn.indicator(1.0))(s),
                       np.maximum(np.log(1 / s), 0))
    s = np.array([0.1, 1.0, math.e, 5.0])
    assert np.allclose(conjugate_hardy(DecreasingStepFn.indicator(math.e))(s),
                       np.maximum(1 - np.log(s), 0))


def test_conjugate_hardy_unbounded():
    with pytest.raises(UnboundedSupport):
        conjugate_hardy(DecreasingStepFn([1.0, math.inf], [2.0, 1.0]))


steps = st.lists(st.tuples(st.floats(-2, 2), st.floats(0.05, 10)), min_size=1, max_size=5,
                 unique_by=lambda p: round(p[0], 2))


def _step(raw):
    x = np.sort(10.0 ** np.array([a for a, _ in raw]))
    v = np.sort(np.array([b for _, b in raw]))[::-1]
    return DecreasingStepFn(x, v)


@given(steps)
def test_closed_forms_vs_quadrature(raw):
    f = _step(raw)
    pts = np.geomspace(1e-3, 1e3, 50)
    sf, cf = hardy(f), conjugate_hardy(f)
    brk = list(f.x)
    for t in pts:
        ref = sum(quad(f, a, b) for a, b in zip([0] + brk, brk + [t]) if a < min(b, t)
                  for b in [min(b, t)]) / t
        assert sf(t) == pytest.approx(ref, rel=1e-8, abs=1e-14)
        edges = sorted({t, *[x for x in brk if x > t]})
        ref = sum(quad(lambda s: f(s) / s, a, b) for a, b in zip(edges[:-1], edges[1:]))
        assert cf(t) == pytest.approx(ref, rel=1e-8, abs=1e-14)


@given(steps)
def test_double_star_properties(raw):
    f = _step(raw)
    t = np.geomspace(1e-3, 1e3, 200)
    fss = double_star(f)(t)
    assert np.all(np.diff(fss) <= 1e-12 * fss[:-1])
    assert np.all(fss >= f(t) * (1 - 1e-12))
    assert np.array_equal(hardy(f)(t), fss)


@given(steps)
def test_iterated_hardy_identity(raw):
    # integral_0^t S g = integral_0^t g(v) log(t/v) dv, checked by quadrature of S g
    g = _step(raw)
    sg = hardy(g)
    for t in (0.05, 0.7, 3.0, 40.0):
        pts = sorted({x for x in g.x if x < t})
        ref = sum(quad(sg, a, b) for a, b in zip([0.0] + pts, pts + [t])) / t
        assert iterated_hardy(g)(t) == pytest.approx(ref, rel=1e-8)


def test_closed_form_rejects_jump():
    with pytest.raises(ValueError):
        ClosedFormPiecewise(np.array([0.0, 1.0, math.inf]), np.array([[1, 0, 0], [2, 0, 0]]))


# -- dilation -----------------------------------------------------------------

def test_dilate_kernel():
    g = lambda s: 1.0 / (1.0 + np.asarray(s))
    s = np.geomspace(0.01, 100, 11)
    assert np.allclose(dilate(g, 1 / 5)(s), 1 / (1 + s / 5))
    assert np.allclose(dilate(g, 1.0)(s), g(s))
    assert np.allclose(dilate(dilate(g, 2.0), 0.5)(s), g(s))


def test_dilate_closed_forms():
    f = DecreasingStepFn([1.0, 3.0], [2.0, 1.0])
    assert dilate(dilate(f, 2.0), 0.5) == f
    h = hardy(f)
    s = np.geomspace(0.01, 100, 31)
    assert np.allclose(dilate(h, 3.0)(s), h(3.0 * s))
    ch = conjugate_hardy(f)
    assert np.allclose(dilate(ch, 0.25)(s), ch(0.25 * s))


# -- norms --------------------------------------------------------------------

@pytest.mark.parametrize("t", [0.01, 1.0, 37.0])
@pytest.mark.parametrize("phi", [PHI_SQRT, PHI_MAX, PHI_T])
def test_norms_of_indicator(phi, t):
    f = SimpleFn([(1.0, t)])
    assert norm_lambda(f, phi) == pytest.approx(phi(t), rel=1e-12)
    assert norm_marcinkiewicz(f, phi) == pytest.approx(phi(t), rel=1e-9)
    assert quasinorm_weak(f, phi) == pytest.approx(phi(t), rel=1e-12)


def test_norm_examples():
    assert norm_lambda(F21, PHI_T) == pytest.approx(4.0)
    assert norm_lambda(F21, PHI_MAX) == pytest.approx(4.0)
    assert norm_marcinkiewicz(F21, PHI_T) == pytest.approx(4.0)
    assert quasinorm_weak(F21, PHI_T) == pytest.approx(3.0)


@given(simple)
def test_norm_chain(pieces):
    f = SimpleFn(pieces)
    for phi in (PHI_SQRT, PHI_MAX):
        w, m, lam = quasinorm_weak(f, phi), norm_marcinkiewicz(f, phi), norm_lambda(f, phi)
        assert w <= m * (1 + 1e-9)
        assert m <= lam * (1 + 1e-9)


def test_lemma_hardy_bound_on_marcinkiewicz(rng):
    # || S f ||_{M(tilde phi)} <= 4 C ||f||_Lambda with C from indicators
    from rikit.grid import GridSpec
    from rikit.transforms import tilde
    grid = GridSpec(1e-4, 1e4, 257)
    phi = validate_quasi_concave(catalog.power(0.5), grid, provenance="sqrt")
    x = validate_quasi_concave(tilde(phi), grid, provenance="tilde")
    ts = grid.nodes()[::16]
    c = max(_m_of_closed(hardy(DecreasingStepFn.indicator(t)), x, grid) / phi(t) for t in ts)
    for _ in range(5):
        k = int(rng.integers(1, 5))
        f = SimpleFn(zip(rng.uniform(0.1, 5, k), 10.0 ** rng.uniform(-2, 2, k)))
        sf = hardy(f)
        assert _m_of_closed(sf, x, grid) <= 4 * c * norm_lambda(f, phi) * (1 + 1e-9)


def _m_of_closed(h, phi, grid):
    """sup_t h**(t) phi(t) for a nonincreasing closed form h (h** by quadrature)."""
    t = grid.nodes()
    edges = np.concatenate([[0.0], t])
    pieces = [quad(h, max(a, 1e-300), b) for a, b in zip(edges[:-1], edges[1:])]
    hss = np.cumsum(pieces) / t
    return float(np.max(hss * phi(t)))
