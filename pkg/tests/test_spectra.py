import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radialmax import DilationSet, FitError, ParameterError, generate
from radialmax.dilation_sets import WindowSpec, restrict
from radialmax.fitting import fit_exponent
from radialmax.spectra import (
    CoveringProfile,
    assouad_spectrum_estimate,
    covering_profile,
    endpoint_diagnostics,
    fracprop_check,
    legendre_nu_sharp,
    minkowski_estimate,
    nu_sharp_curve,
    nu_sharp_estimate,
    omega_mpq,
    profile_rows,
    quasi_assouad_estimate,
)

LOG32 = math.log(2) / math.log(3)


def brute_counts(E):
    """counts[k, m] by scanning every window, independent of the merge-based builder."""
    n = E.depth
    out = np.zeros((n + 1, n + 1), dtype=np.int64)
    for m in range(n + 1):
        anc = sorted({int(c) >> (n - m) for c in E.cells})
        for k in range(m + 1):
            best = 0
            for pos in range(1 << k):
                best = max(best, sum(1 for a in anc if a >> (m - k) == pos))
            out[k, m] = best
    return out


# covering_profile ---------------------------------------------------------------
def test_full_interval_profile():
    P = covering_profile(generate("full_interval", 4))
    for m in range(5):
        for k in range(m + 1):
            assert P.counts[k, m] == 2 ** (m - k)


def test_point_profile():
    P = covering_profile(generate("finite_points", 4, points=[1.3]))
    for m in range(5):
        assert all(P.counts[k, m] == 1 for k in range(m + 1))


def test_cantor_global_counts(cantor12):
    P = covering_profile(cantor12)
    for m in range(13):
        assert 0.25 <= P.global_counts[m] / 2 ** (m * LOG32) <= 4


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7).flatmap(lambda n: st.tuples(st.just(n), st.sets(st.integers(0, (1 << n) - 1), min_size=1))))
def test_profile_matches_brute_force(data):
    n, cells = data
    E = DilationSet(n, sorted(cells))
    P = covering_profile(E)
    assert np.array_equal(P.counts, brute_counts(E))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9).flatmap(lambda n: st.tuples(st.just(n), st.sets(st.integers(0, (1 << n) - 1), min_size=1))))
def test_profile_invariants(data):
    n, cells = data
    P = covering_profile(DilationSet(n, sorted(cells)))
    c = P.counts
    assert np.array_equal(c[0], P.global_counts)
    for m in range(n + 1):
        assert c[m, m] >= 1
        for k in range(m + 1):
            assert c[k, m] <= 2 ** (m - k)
            if k:
                assert c[k, m] <= c[k - 1, m]
            if m < n:
                assert c[k, m] <= c[k, m + 1] <= 2 * c[k, m]


def test_positions_attain_max(cantor12):
    P = covering_profile(cantor12)
    for k, m in [(0, 5), (3, 9), (6, 12)]:
        pos = int(P.positions[k, m]) >> (m - k)
        sub = restrict(cantor12, WindowSpec(k, pos))
        assert len(np.unique(sub.cells >> (12 - m))) == P.counts[k, m]


# dimension estimates ---------------------------------------------------------
def test_minkowski_examples():
    P = covering_profile(generate("full_interval", 16))
    assert minkowski_estimate(P, (4, 16)).slope == pytest.approx(1.0, abs=1e-12)
    P = covering_profile(generate("finite_points", 16, points=[1.5]))
    assert minkowski_estimate(P, (4, 16)).slope == pytest.approx(0.0, abs=1e-12)
    P = covering_profile(generate("cantor", 18, base=3, digits=[0, 2]))
    assert abs(minkowski_estimate(P, (6, 18)).slope - LOG32) <= 0.03


def test_minkowski_needs_three_scales():
    P = covering_profile(generate("full_interval", 6))
    with pytest.raises(FitError):
        minkowski_estimate(P, (3, 4))


def test_assouad_spectrum_examples():
    thetas = [0.1, 0.3, 0.5, 0.7, 0.9]
    full = assouad_spectrum_estimate(covering_profile(generate("full_interval", 14)), thetas)
    assert all(v == pytest.approx(1.0, abs=1e-9) for v in full.values())
    pt = assouad_spectrum_estimate(covering_profile(generate("finite_points", 14, points=[1.2])), thetas)
    assert all(v == pytest.approx(0.0, abs=1e-9) for v in pt.values())
    conv = assouad_spectrum_estimate(covering_profile(generate("convex_sequence", 20, beta=0.5)), [0.5])
    assert abs(conv[0.5] - 1.0) <= 0.1


def test_quasi_assouad_is_top_of_grid():
    P = covering_profile(generate("assouad_regular", 16, beta=0.5, gamma=1))
    grid = [0.2, 0.5, 0.8]
    assert quasi_assouad_estimate(P, grid) == assouad_spectrum_estimate(P, grid)[0.8]


@pytest.mark.parametrize(
    "name,params",
    [("cantor", {"base": 3, "digits": [0, 2]}), ("convex_sequence", {"beta": 0.5}),
     ("assouad_regular", {"beta": 0.5, "gamma": 1}), ("full_interval", {})],
)
def test_spectrum_dominates_minkowski(name, params):
    P = covering_profile(generate(name, 16, **params))
    beta = minkowski_estimate(P).slope
    spec = assouad_spectrum_estimate(P, [0.1, 0.3, 0.5, 0.7, 0.9])
    assert all(beta <= v + 0.05 for v in spec.values())


# nu_sharp ------------------------------------------------------------------------
@pytest.mark.parametrize("alpha", [0, 0.5, 1, 1.5, 2])
def test_nu_sharp_full_interval(alpha):
    P = covering_profile(generate("full_interval", 16))
    assert abs(nu_sharp_estimate(P, alpha).slope - max(1, alpha)) <= 0.05


def test_nu_sharp_point():
    P = covering_profile(generate("finite_points", 16, points=[1.0]))
    assert nu_sharp_estimate(P, 0.7).slope == pytest.approx(0.7, abs=1e-12)


def test_nu_sharp_assouad_regular():
    P = covering_profile(generate("assouad_regular", 22, beta=0.5, gamma=1))
    assert abs(nu_sharp_estimate(P, 0.5).slope - 0.75) <= 0.1


def test_nu_sharp_monotone_in_alpha(cantor12):
    P = covering_profile(cantor12)
    prev = None
    for alpha in np.linspace(-1, 3, 17):
        cur, _ = nu_sharp_curve(P, alpha)
        if prev is not None:
            assert np.all(cur >= prev - 1e-12)
        prev = cur


@pytest.mark.parametrize("alpha", [-1.0, -0.5, 0.0])
def test_nu_sharp_nonpositive_alpha_is_beta(alpha):
    P = covering_profile(generate("cantor", 16, base=3, digits=[0, 2]))
    assert abs(nu_sharp_estimate(P, alpha).slope - minkowski_estimate(P).slope) <= 0.05


def test_ties_take_smallest_k():
    P = covering_profile(generate("full_interval", 6))
    _, arg = nu_sharp_curve(P, 1.0)  # every k ties at alpha = 1
    assert np.all(arg == 0)


def test_legendre_examples():
    theta = np.linspace(0, 1, 101)
    assert legendre_nu_sharp((theta, theta - 1), 2) == pytest.approx(2)
    assert legendre_nu_sharp((theta, 0 * theta), 0.7) == pytest.approx(0.7)
    nu = -np.minimum(1 - theta, 0.5)
    assert legendre_nu_sharp((theta, nu), 0.5) == pytest.approx(0.75)
    assert legendre_nu_sharp({0.0: 0.0, 1.0: 0.0}, 1.0) == 1.0
    with pytest.raises(ParameterError):
        legendre_nu_sharp(([], []), 1)


def _random_nu(rng):
    """Random nondecreasing piecewise-linear nu <= 0 with nu(1) = 0."""
    knots = np.sort(np.r_[0.0, rng.uniform(0, 1, 2), 1.0])
    vals = np.r_[-rng.uniform(0.2, 1.0), -rng.uniform(0, 1, 2), 0.0]
    vals = np.minimum.accumulate(vals[::-1])[::-1]  # nondecreasing in theta
    return lambda t: float(np.interp(t, knots, vals))


@pytest.mark.parametrize("seed", range(5))
def test_duality_on_synthetic_profiles(seed):
    rng = np.random.default_rng(seed)
    nu = _random_nu(rng)
    P = CoveringProfile.from_exponent(nu, 40)
    theta = np.linspace(0, 1, 401)
    nus = np.array([nu(t) for t in theta])
    for alpha in (0.0, 0.5, 1.0, 2.0):
        est = nu_sharp_estimate(P, alpha, (20, 40)).slope
        assert abs(est - legendre_nu_sharp((theta, nus), alpha)) <= 0.05


# fracprop / diagnostics / omega ----------------------------------------------------
def test_fracprop_examples():
    P = covering_profile(generate("full_interval", 16))
    assert fracprop_check(P, 1, 1, [2], 0.05).passed
    P = covering_profile(generate("assouad_regular", 22, beta=0.5, gamma=1))
    rep = fracprop_check(P, 0.5, 1, np.arange(0, 2.01, 0.25), 0.1)
    assert rep.passed, rep.failures()
    P = covering_profile(generate("cantor", 16, base=3, digits=[0, 2]))
    rep = fracprop_check(P, LOG32, LOG32, [1.0], 0.1)
    assert rep.passed and abs(rep.rows[0].estimate - 1) <= 0.1


def test_fracprop_reports_failure():
    P = covering_profile(generate("full_interval", 12))
    rep = fracprop_check(P, 0.2, 0.4, [0.0], 0.05)  # true nu_sharp(0) = 1 exceeds the bound 0.2
    assert not rep.passed and len(rep.failures()) == 1


def test_endpoint_diagnostics_full_interval():
    P = covering_profile(generate("full_interval", 14))
    diag = endpoint_diagnostics(P, 1, 2, 2)
    assert np.allclose(diag.delta_beta_N, 1.0)
    assert np.allclose(diag.log_weighted, diag.scales * math.log(2))
    assert diag.verdicts["log_weighted"] == "unbounded"
    assert diag.verdicts["delta_beta_N"] == "appears bounded"
    assert np.all(diag.neighborhood_measure > 0)


def test_endpoint_diagnostics_cantor(cantor12):
    diag = endpoint_diagnostics(covering_profile(cantor12), LOG32, 2, 3)
    assert np.all((diag.delta_beta_N >= 0.25) & (diag.delta_beta_N <= 4))


def test_omega_examples(cantor12):
    P = covering_profile(generate("full_interval", 8))
    assert omega_mpq(P, 2, 2, 3, 2) == pytest.approx(2**0.5)
    P = covering_profile(generate("finite_points", 8, points=[1.1]))
    assert omega_mpq(P, 2, 4, 5, 3) == pytest.approx(1.0)
    P = covering_profile(cantor12)
    brute = brute_counts(generate("cantor", 10, base=3, digits=[0, 2]))[4, 10]
    assert omega_mpq(P, 2, 4, 6, 4) == pytest.approx(2 ** (-4 * (0.5 - 0.5)) * brute**0.25)


def test_profile_rows(full8):
    rows = profile_rows(covering_profile(full8))
    assert len(rows) == 9 * 10 // 2
    assert rows[-1] == (8, 8, 1)


# fitting -----------------------------------------------------------------------
def test_fit_examples():
    f = fit_exponent([(1, 2), (2, 4), (3, 6)])
    assert f.slope == pytest.approx(2) and f.r_squared == pytest.approx(1)
    assert fit_exponent([(0, 0), (1, 1), (2, 2)]).slope == pytest.approx(1)
    rng = np.random.default_rng(7)
    x = np.arange(20.0)
    assert abs(fit_exponent(x, 0.5 * x + rng.uniform(-0.01, 0.01, 20)).slope - 0.5) <= 0.02


def test_fit_errors():
    with pytest.raises(FitError):
        fit_exponent([(1, 1), (2, 2)])
    with pytest.raises(FitError):
        fit_exponent([(1, 1), (1, 2), (1, 3)])


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5))
def test_fit_recovers_exact_lines(a, b):
    x = np.arange(6.0)
    f = fit_exponent(x, a * x + b)
    assert f.slope == pytest.approx(a, abs=1e-9)
    assert f.intercept == pytest.approx(b, abs=1e-9)
    assert 0 <= f.r_squared <= 1 + 1e-12


def test_spectrum_skips_degenerate_theta():
    # depth 10 default window (2, 9): m - floor(0.9 m) is 1 throughout
    P = covering_profile(generate("cantor", 10, base=3, digits=[0, 2]))
    spec = assouad_spectrum_estimate(P, [0.5, 0.9])
    assert 0.9 not in spec and 0.5 in spec
    assert math.isfinite(quasi_assouad_estimate(P, [0.1, 0.9]))


def test_fracprop_point_uses_limit_bound():
    P = covering_profile(generate("finite_points", 16, points=[1.5]))
    rep = fracprop_check(P, 0, 0, [0.0, 1.0, 2.0], 0.05)
    assert rep.passed and all(r.upper == r.alpha for r in rep.rows)
    with pytest.raises(ParameterError):
        fracprop_check(P, 0.5, 0, [1.0])
