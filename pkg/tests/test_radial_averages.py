import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radialmax import (
    ConvergenceError,
    DomainError,
    ParameterError,
    RadialFunction,
    c_d,
    kernel,
    sphere_average,
    sphere_average_mc,
    stein_function,
)
from radialmax.quadrature import QuadratureResult, integrate, integrate_endpoint_singular
from radialmax.radial_averages import sphere_average_batch

ONE = RadialFunction.constant(1.0, 20.0)


# quadrature ---------------------------------------------------------------------
def test_integrate_polynomial_and_breakpoints():
    res = integrate(lambda s: s**3, 0, 2, 1e-12)
    assert res.value == pytest.approx(4.0, abs=1e-12)
    step = lambda s: np.where(s < 0.3, 1.0, 2.0)  # noqa: E731
    assert integrate(step, 0, 1, 1e-12, breakpoints=(0.3,)).value == pytest.approx(1.7, abs=1e-12)


def test_integrate_endpoint_singular_arcsine():
    # integral of 1/sqrt((s-a)(b-s)) over [a, b] is pi
    phi = lambda s, dl, dr: 1 / np.sqrt(dl * dr)  # noqa: E731
    res = integrate_endpoint_singular(phi, 0.3, 2.1, tol=1e-12)
    assert res.value == pytest.approx(math.pi, abs=1e-10)


def test_integrate_budget_error():
    with pytest.raises(ConvergenceError) as info:
        integrate(lambda s: np.sin(1 / s), 1e-9, 1, 1e-14, max_evaluations=200)
    assert math.isfinite(info.value.value)


def test_quadrature_result_arithmetic():
    a = QuadratureResult(1.0, 0.1, 5) + QuadratureResult(2.0, 0.2, 7)
    assert (a.value, a.evaluations) == (3.0, 12)
    assert a.abs_error_estimate == pytest.approx(0.3)
    assert a.scaled(-2).abs_error_estimate == pytest.approx(0.6)
    with pytest.raises(ParameterError):
        QuadratureResult(0.0, -1.0, 0)


# kernel ---------------------------------------------------------------------------
def test_kernel_examples():
    for s in (1.1, 1.5, 2.9):
        assert kernel(3, 1.0, 2.0, s) == pytest.approx(s / (4 * 2.0 * 1.0))
    assert kernel(2, 1.0, 1.0, math.sqrt(2)) == pytest.approx(math.sqrt(2) / 2)
    assert kernel(4, 1.0, 1.0, 1.0) == pytest.approx(math.sqrt(3) / 16)


def test_kernel_domain():
    with pytest.raises(DomainError):
        kernel(3, 1.0, 2.0, 0.5)
    with pytest.raises(DomainError):
        kernel(3, 1.0, 2.0, 3.0)


def test_calibrated_constants():
    # polar angle form: sin(phi)^(d-2) dphi is 2^(d-1) times the kernel ds, and the
    # angular density is Gamma(d/2) / (sqrt(pi) Gamma((d-1)/2))
    for d in (2, 3, 4, 5):
        expected = 2 ** (d - 1) * math.gamma(d / 2) / (math.sqrt(math.pi) * math.gamma((d - 1) / 2))
        assert c_d(d) == pytest.approx(expected, rel=1e-10)


# sphere_average -----------------------------------------------------------------------
@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_normalization_grid(d):
    tol = 1e-5 if d == 2 else 1e-6
    for r in (0.1, 0.5, 1.0, 1.5, 2.5, 4.0, 8.0):
        for t in (1.0, 1.37, 2.0):
            assert abs(sphere_average(ONE, d, r, t, 1e-10).value - 1) <= tol


def test_closed_form_d3():
    f = RadialFunction.indicator(0, 1.5)
    assert sphere_average(f, 3, 2.0, 1.0, 1e-12).value == pytest.approx(0.15625, abs=1e-11)


def test_zero_radius_is_profile_value():
    f = RadialFunction.indicator(0.5, 1.5)
    assert sphere_average(f, 2, 0.0, 1.2).value == 1.0
    assert sphere_average(f, 2, 0.0, 1.7).value == 0.0


@settings(max_examples=50, deadline=None)
@given(
    st.integers(2, 5),
    st.floats(0.1, 4.0),
    st.floats(1.0, 2.0),
    st.floats(0.0, 6.0),
    st.floats(0.01, 2.0),
)
def test_support_gives_exact_zero(d, r, t, a, width):
    b = a + width
    if max(a, abs(r - t)) < min(b, r + t):
        return
    assert sphere_average(RadialFunction.indicator(a, b), d, r, t).value == 0.0


@pytest.mark.parametrize("d", [3, 4, 5])
def test_continuity_across_r_equals_t(d):
    f = RadialFunction.smooth_bump(0.5, 0.4)
    tol = 1e-10
    t = 1.3
    lo = sphere_average(f, d, t - 1e-4, t, tol).value
    hi = sphere_average(f, d, t + 1e-4, t, tol).value
    assert abs(lo - hi) < 1e-3  # Lipschitz in r, so a 2e-4 shift moves it by O(1e-4)
    mid = sphere_average(f, d, t, t, tol).value
    assert abs(mid - 0.5 * (lo + hi)) < 1e-6


def test_linearity_in_scale():
    f = RadialFunction.step_train([(0.2, 0.9, 1.0), (1.1, 1.8, -0.5)])
    base = sphere_average(f, 3, 0.9, 1.4, 1e-12).value
    assert sphere_average(f.with_scale(3.5), 3, 0.9, 1.4, 1e-12).value == pytest.approx(3.5 * base, rel=1e-12)


def test_mc_constant_and_determinism():
    mean, se = sphere_average_mc(ONE, 3, 1.0, 1.5, 2000, seed=1)
    assert mean == 1.0 and se == 0.0
    f = RadialFunction.indicator(0, 1.5)
    assert sphere_average_mc(f, 2, 2.0, 1.0, 5000, 3) == sphere_average_mc(f, 2, 2.0, 1.0, 5000, 3)
    with pytest.raises(ParameterError):
        sphere_average_mc(f, 2, 2.0, 1.0, 999)


def test_mc_closed_form_d3():
    f = RadialFunction.indicator(0, 1.5)
    mean, se = sphere_average_mc(f, 3, 2.0, 1.0, 1_000_000, seed=11)
    assert abs(mean - 0.15625) <= 3 * se


def test_mc_against_quadrature_d2():
    f = RadialFunction.indicator(0, 1.5)
    mean, se = sphere_average_mc(f, 2, 2.0, 1.0, 1_000_000, seed=5)
    q = sphere_average(f, 2, 2.0, 1.0, 1e-10)
    assert abs(mean - q.value) <= 3 * (se + q.abs_error_estimate)


def test_batch_matches_adaptive():
    f = RadialFunction.smooth_bump(1.0, 0.5)
    ts = np.linspace(1, 2, 7)
    batch = sphere_average_batch(f, 3, 0.8, ts)
    ref = [sphere_average(f, 3, 0.8, t, 1e-12).value for t in ts]
    assert np.allclose(batch, ref, atol=1e-8)


# RadialFunction -----------------------------------------------------------------------
def test_norms_closed_form():
    f = RadialFunction.indicator(1, 2)
    assert f.norm(1, 3) == pytest.approx(7 / 3)
    assert f.norm(2, 2) == pytest.approx(math.sqrt(1.5))
    assert f.norm(math.inf, 3) == 1.0
    st_ = RadialFunction.step_train([(1, 2, 2.0), (3, 4, 1.0)])
    assert st_.norm(2, 1) == pytest.approx(math.sqrt(4 + 1))


def test_power_log_norm_matches_quadrature():
    f = RadialFunction.power_log(-1.5, 0.7, 0.05, 0.8)
    q = integrate(lambda s: f(s) ** 2 * s**2, 0.05, 0.8, 1e-13).value ** 0.5
    assert f.norm(2, 3) == pytest.approx(q, rel=1e-9)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("m", [6, 10, 16])
def test_stein_norm_constant(d, m):
    g = stein_function(d, 2.0**-m)
    assert g.norm(d / (d - 1), d) == pytest.approx(math.log(2) ** ((d - 1) / d), rel=1e-12)


def test_bad_functions():
    with pytest.raises(ParameterError):
        RadialFunction.indicator(2, 1)
    with pytest.raises(ParameterError):
        RadialFunction.step_train([(0, 2, 1), (1, 3, 1)])
    with pytest.raises(ParameterError):
        RadialFunction.power_log(1, 1, 0.5, 2)
    with pytest.raises(ParameterError):
        RadialFunction.from_dict({"kind": "wave", "params": {}})
    with pytest.raises(ParameterError):
        RadialFunction.from_dict({"kind": "smooth_bump", "params": {"center": 1}})


@pytest.mark.parametrize(
    "f",
    [
        RadialFunction.indicator(0.5, 1.5),
        RadialFunction.power_log(-2, -0.5, 0.01, 0.2, scale=2.0),
        RadialFunction.step_train([(0.1, 0.2, 1.0), (0.4, 0.5, 3.0)]),
        RadialFunction.smooth_bump(1.0, 0.3),
    ],
)
def test_function_round_trip(f):
    assert RadialFunction.from_dict(f.to_dict()) == f
