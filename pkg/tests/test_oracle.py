import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dipolefront.config import Tolerance
from dipolefront.current import DipoleCurrent, SpectralWeight, dipole_fourier_current, dipole_spectral_weight
from dipolefront.errors import DivergenceError, RegimeError
from dipolefront.fields import radial_coefficients
from dipolefront.integrals import integral_I, integral_I1, integral_I2, integral_I3
from dipolefront.oracle import (
    MAX_OSC_RATIO,
    compensated_sum,
    dipole_vector_coefficient_quadrature,
    integrate_decaying,
    integrate_interval,
    integrate_oscillatory,
    integral_I1_quadrature,
    integral_I2_quadrature,
    integral_I3_quadrature,
    integral_I_quadrature,
    monte_carlo_vector_field,
    numerical_curl,
    numerical_divergence,
    numerical_time_derivative,
    reduce_angular,
    riemann_lebesgue_check,
    truncation_radius,
    weight_integral,
    weight_integral_fn,
)

TOL = Tolerance(1e-12)
UNIT = DipoleCurrent.along_z(1.0, 1.0)


def test_gk_polynomials_exact():
    # G7/K15 is exact for degree <= 22 on a single segment
    for n in (0, 5, 13, 22):
        q = integrate_interval(lambda x: x**n, 0.0, 1.0, TOL, pieces=1)
        assert q.value == pytest.approx(1 / (n + 1), rel=1e-14)


def test_compensated_sum_order_independent():
    vals = [1e16, 1.0, -1e16, 1.0]
    assert compensated_sum(vals) == 2.0
    assert compensated_sum(vals[::-1]) == 2.0


def test_gaussian_integrals():
    q = integrate_decaying(lambda x: np.exp(-x * x / 2), "gaussian", 1.0, TOL)
    assert q.converged and q.value == pytest.approx(math.sqrt(math.pi / 2), rel=1e-13)
    q = integrate_decaying(lambda x: np.exp(-x), "exponential", 1.0, TOL)
    assert q.value == pytest.approx(1.0, rel=1e-12)
    q = integrate_decaying(lambda x: 1 / (1 + x * x), "algebraic", 1.0, TOL)
    assert q.value == pytest.approx(math.pi / 2, rel=1e-12)


def test_truncation_radius():
    assert truncation_radius("gaussian", Tolerance(1e-12)) > math.sqrt(2 * math.log(1e12))
    with pytest.raises(ValueError):
        truncation_radius("algebraic", TOL)


@pytest.mark.parametrize("a", [0.0, 1e-3, 0.3, 1.0, 2.5, 7.0, 25.0, 100.0])
def test_integral_I(a):
    q = integral_I_quadrature(a, TOL)
    assert q.value == pytest.approx(integral_I(a), rel=1e-10, abs=1e-13)


@pytest.mark.parametrize("r,t", [(0.5, 0.0), (2.0, 1.0), (1.0, 3.0), (12.0, 10.0), (30.0, 29.5)])
def test_integral_I1(r, t):
    q = integral_I1_quadrature(r, t, TOL)
    assert q.value == pytest.approx(integral_I1(r, t), rel=1e-10, abs=1e-13)


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0, 3.0, 8.0])
def test_integral_I2_I3(a):
    assert integral_I2_quadrature(a, TOL).value == pytest.approx(integral_I2(a), rel=1e-10, abs=1e-14)
    assert integral_I3_quadrature(a, TOL).value == pytest.approx(integral_I3(a), rel=1e-10, abs=1e-14)


def test_integral_I3_sign_change():
    # I3 crosses zero near a = 1.307; check both sides and the asymptote -1/a^2
    assert integral_I3(1.0) > 0 > integral_I3(2.0)
    assert integral_I3(50.0) == pytest.approx(-1 / 2500, rel=2e-3)


def test_oscillation_ratio_cap():
    with pytest.raises(RegimeError):
        integrate_oscillatory(lambda x: np.exp(-x * x), 2 * MAX_OSC_RATIO)
    with pytest.raises(RegimeError):
        weight_integral(dipole_spectral_weight(UNIT), 2, t=2 * MAX_OSC_RATIO)


def test_weight_integral_uv_divergence():
    w = SpectralWeight(lambda om: om**3 / (1 + om), 1.0, decay="algebraic")
    with pytest.raises(DivergenceError):
        weight_integral(w, 2)


def test_weight_integral_ir_divergence():
    w = SpectralWeight(lambda om: om * np.exp(-om * om), 1.0)
    with pytest.raises(DivergenceError):
        weight_integral(w, 3)


def test_weight_integral_sin_at_zero():
    assert weight_integral(dipole_spectral_weight(UNIT), 2, 0.0, "sin").value == 0.0


def test_weight_integral_fn_matches_power():
    w = dipole_spectral_weight(UNIT)
    a = weight_integral(w, 2, tol=TOL).value
    b = weight_integral_fn(w, lambda om: om**-2.0, 0.0, TOL).value
    assert a == pytest.approx(b, rel=1e-13)


def test_riemann_lebesgue_decay():
    w = dipole_spectral_weight(UNIT)
    ts = np.array([0.0, 10.0, 100.0, 1000.0])
    r2 = riemann_lebesgue_check(w, 2, ts)
    assert r2.decayed and r2.tail_max < 1e-6 * abs(r2.i0)
    r3 = riemann_lebesgue_check(w, 3, ts, threshold=1e-4)
    assert r3.decayed
    # p = 3 tail is algebraic: -Ntilde (eps/t)^2
    assert r3.values[-1] == pytest.approx(-r3.i0 / 1000**2, rel=1e-3)
    with pytest.raises(ValueError):
        riemann_lebesgue_check(w, 4, ts)


@pytest.mark.parametrize("r", [0.3, 1.0, 2.0, 6.0])
def test_static_vector_coefficient_quadrature(r):
    q = dipole_vector_coefficient_quadrature(UNIT, r, None, TOL)
    assert q.value == pytest.approx(radial_coefficients(1.0, r).a, rel=1e-10)


@pytest.mark.parametrize("r,t", [(0.5, 3.0), (9.5, 10.0), (12.0, 10.0)])
def test_expanding_vector_coefficient_quadrature(r, t):
    q = dipole_vector_coefficient_quadrature(UNIT, r, t, TOL)
    assert q.value == pytest.approx(radial_coefficients(1.0, r, t).a, rel=1e-9, abs=1e-15)


def test_reduce_angular_static_field():
    c = DipoleCurrent((0.0, 0.0, 1.0), 1.0)
    pos = np.array([1.2, 0.4, 0.3])
    f = reduce_angular(dipole_fourier_current(c), pos)
    q = integrate_interval(lambda om: f(om.ravel())[:, 0].reshape(om.shape), 1e-12, 14.0, Tolerance(1e-10))
    rr = np.linalg.norm(pos)
    expect = radial_coefficients(1.0, rr).a * np.cross(c.mu_vec, pos / rr)[0]
    assert q.value == pytest.approx(expect, rel=1e-8)


def test_monte_carlo_agrees_within_5_sigma():
    c = DipoleCurrent((0.0, 0.0, 1.0), 1.0)
    pos = np.array([1.0, 0.5, 0.0])
    mc = monte_carlo_vector_field(c, pos, samples=400_000)
    rr = np.linalg.norm(pos)
    expect = radial_coefficients(1.0, rr).a * np.cross(c.mu_vec, pos / rr)
    assert np.all(np.abs(mc.mean - expect) <= 5 * mc.stderr + 1e-12)


def test_finite_difference_helpers():
    def f(r):
        return np.stack([-r[..., 1], r[..., 0], np.zeros(r.shape[:-1])], axis=-1)

    r = np.array([[0.3, 0.2, 0.1]])
    np.testing.assert_allclose(numerical_curl(f, r, 1e-4), [[0, 0, 2.0]], atol=1e-10)
    np.testing.assert_allclose(numerical_divergence(f, r, 1e-4), [0.0], atol=1e-10)
    assert numerical_time_derivative(np.sin, 0.7, 1e-3) == pytest.approx(math.cos(0.7), rel=1e-11)


@given(st.floats(0.0, 40.0))
@settings(max_examples=40, deadline=None)
def test_integral_I_bounded_monotone(a):
    v = integral_I(a)
    assert 0.0 <= v <= math.pi / 2
    assert integral_I(a + 0.1) >= v



# natural scale of each family, used where the value itself passes through zero
FAMILIES = {
    "I": (integral_I, integral_I_quadrature, math.sqrt(math.pi)),
    "I2": (integral_I2, integral_I2_quadrature, math.sqrt(math.pi / 2)),
    "I3": (integral_I3, integral_I3_quadrature, 1.0),
}


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_families_random_points(name):
    closed, quad, scale = FAMILIES[name]
    rng = np.random.default_rng(sorted(FAMILIES).index(name))
    worst = 0.0
    for a in rng.uniform(0.0, 100.0, 50):
        c = closed(a)
        q = quad(a, TOL)
        worst = max(worst, abs(q.value - c) / max(abs(c), scale))
    assert worst <= 1e-8


def test_family_I1_random_points():
    rng = np.random.default_rng(11)
    worst = 0.0
    for r, t in zip(rng.uniform(0.0, 50.0, 50), rng.uniform(0.0, 50.0, 50)):
        c = integral_I1(r, t)
        q = integral_I1_quadrature(r, t, TOL)
        worst = max(worst, abs(q.value - c) / max(abs(c), math.sqrt(math.pi)))
    assert worst <= 1e-8


def test_truncation_doubling_within_error_estimate():
    w = dipole_spectral_weight(UNIT)
    f = lambda x: w(x) / x**2
    a = integrate_interval(f, 0.0, truncation_radius("gaussian", TOL), TOL)
    b = integrate_interval(f, 0.0, 2 * truncation_radius("gaussian", TOL), TOL)
    assert a.converged and b.converged
    assert abs(a.value - b.value) <= max(a.est_error, b.est_error)


def test_segment_permutation_invariance():
    q = integrate_interval(lambda x: np.cos(7 * x) * np.exp(-x * x / 2), 0.0, 12.0, TOL, pieces=64)
    rng = np.random.default_rng(5)
    shuffled = compensated_sum(rng.permutation(q.pieces))
    assert abs(shuffled - q.value) <= 1e-13 * abs(q.value)
