import math
import warnings
from dataclasses import replace

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bessel_means import epd as E
from bessel_means.fields import b_biharmonic_product, b_harmonic_product, bessel_product, gauss_field, radius_squared
from bessel_means.means import spherical_mean
from bessel_means.numerics import bessel_j_normalized
from bessel_means.shift1d import ScalarField
from bessel_means.sphere_geometry import weighted_sphere_area

LIGHT = E.SolverOptions(radial_order=32, shift_order=24, sphere_order=16)


def solve(f, gamma, k, opts=LIGHT, **kw):
    return E.solve_epd(E.EpdProblem(f, gamma, k), replace(opts, **kw) if kw else opts)


def test_classify():
    assert E.classify(3.0, 4.0) == "mean"
    assert E.classify(4.5, 4.0) == "above"
    assert E.classify(1.0, 4.0) == "recurrence"
    assert E.classify(-2.0, 4.0) == "recurrence"
    assert E.classify(-1.0, 4.0) == "exceptional"
    assert E.classify(-5.0, 4.0) == "exceptional"


def test_recurrence_depth_is_minimal():
    assert E.recurrence_depth(1.0, 4.0) == 1
    assert E.recurrence_depth(0.5, 4.0) == 2
    assert E.recurrence_depth(-2.0, 4.0) == 3
    assert E.recurrence_depth(1.0, 4.0, extra=2) == 3
    for k, q in [(0.3, 5.1), (-0.5, 2.2), (2.9, 4.0)]:
        m = E.recurrence_depth(k, q)
        assert k + 2 * m >= q - 1 and k + 2 * (m - 1) < q - 1


@pytest.mark.parametrize("n,gamma,k", [(2, [1, 1], 4.0), (2, [0.5, 2.0], 6.3), (3, [1, 1, 1], 7.0), (1, [2.0], 3.5)])
def test_normalizer_enforces_initial_value(n, gamma, k):
    q = n + sum(gamma)
    with mpmath.workdps(30):
        integral = mpmath.quad(lambda s: (1 - s * s) ** ((k - q - 1) / 2) * s ** (q - 1), [0, 0.5, 1])
    total = E.epd_normalizer(n, gamma, k) * weighted_sphere_area(n, gamma) * float(integral)
    assert total == pytest.approx(1.0, rel=1e-10)
    assert abs(E.printed_constant(n, gamma, k) * weighted_sphere_area(n, gamma) * float(integral) - 1.0) > 1e-3


def test_options_validation():
    with pytest.raises(ValueError):
        E.SolverOptions(method="bogus")
    with pytest.raises(ValueError):
        E.SolverOptions(fractional_reading="t3")
    with pytest.raises(ValueError):
        E.SolverOptions(fd_rel=0.5)


def test_delta_gamma_square_and_eigen():
    gamma = [0.4, 2.0, 1.1]
    f = radius_squared(3)
    x = np.array([0.3, 0.8, 1.2])
    assert E.apply_delta_gamma(f, gamma, x, 0.01) == pytest.approx(2 * (3 + sum(gamma)), abs=1e-8)
    xi = [0.5, 1.0, 0.7]
    g = bessel_product(gamma, xi)
    lap = E.delta_gamma_field(g, gamma)
    assert lap(x) == pytest.approx(-np.dot(xi, xi) * g(x), abs=1e-8)


def test_delta_gamma_on_axis():
    gamma = [1.5, 1.0]
    f = radius_squared(2)
    assert E.apply_delta_gamma(f, gamma, np.array([0.0, 0.0]), 0.05) == pytest.approx(2 * (2 + 2.5), abs=1e-10)


def test_polyharmonic_residual():
    probes = [np.array([0.4, 0.7]), np.array([1.0, 0.2])]
    assert E.b_polyharmonic_residual(radius_squared(2), [1, 1], 2, probes, 0.05) < 1e-8
    x1sq = ScalarField(lambda p: p[..., 0] ** 2, 2)
    assert E.b_polyharmonic_residual(x1sq, [1, 1], 1, probes, 0.05) == pytest.approx(4.0, abs=1e-9)
    assert E.b_polyharmonic_residual(b_harmonic_product([1, 2]), [1, 2], 1, probes, 0.05, levels=3) < 1e-8
    assert E.b_polyharmonic_residual(b_biharmonic_product([1, 2]), [1, 2], 2, probes, 0.1, levels=3) < 1e-6


def test_erdelyi_kober_of_one():
    for alpha, eta in [(0.5, 1.0), (1.7, 0.3), (3.0, 2.5)]:
        val = E.erdelyi_kober(lambda r: np.ones_like(r), alpha, 2.0, eta, 1.3)
        assert val == pytest.approx(math.gamma(eta + 1) / math.gamma(alpha + eta + 1), rel=1e-13)


def test_erdelyi_kober_against_definition():
    alpha, sigma, eta, x = 1.4, 2.0, 0.6, 0.9
    phi = lambda r: mpmath.cos(r)
    ref = sigma * x ** (-sigma * (alpha + eta)) / mpmath.gamma(alpha) * mpmath.quad(
        lambda r: (x**sigma - r**sigma) ** (alpha - 1) * r ** (sigma * eta + sigma - 1) * phi(r), [0, x]
    )
    assert E.erdelyi_kober(np.cos, alpha, sigma, eta, x) == pytest.approx(float(ref), rel=1e-10)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.8, 1.5])
def test_riemann_liouville_power_rule(alpha):
    beta, t = 2.3, 0.8
    val = E.riemann_liouville_derivative(lambda r: np.asarray(r) ** beta, alpha, t)
    ref = math.gamma(beta + 1) / math.gamma(beta + 1 - alpha) * t ** (beta - alpha)
    assert val == pytest.approx(ref, rel=1e-7)


def test_riemann_liouville_of_one():
    alpha, t = 0.4, 1.3
    val = E.riemann_liouville_derivative(lambda r: np.ones_like(np.asarray(r, dtype=float)), alpha, t)
    assert val == pytest.approx(t ** (-alpha) / math.gamma(1 - alpha), rel=1e-7)


# --- quadratic oracle valid for every k != -1: u = |x|^2 + q t^2 / (k + 1) ---


@pytest.mark.parametrize(
    "gamma,k",
    [([1, 1], 3.0), ([0.7, 1.6], 5.0), ([1, 1], 1.0), ([0.7, 1.6], 0.5), ([1, 1], -0.5), ([1, 1], -2.0), ([1, 1], -3.0), ([2.0], 0.4)],
)
def test_quadratic_data_all_regimes(gamma, k):
    n = len(gamma)
    q = n + sum(gamma)
    sol = solve(radius_squared(n), gamma, k)
    x = np.linspace(0.3, 0.9, n)
    for t in (0.0, 0.4, 1.0, 1.7):
        assert sol(x, t) == pytest.approx(x @ x + q * t * t / (k + 1), abs=2e-7), sol.regime


def test_exceptional_minus_one_returns_data():
    f = gauss_field(2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        sol = solve(f, [1, 1], -1.0)
    x = np.array([0.5, 0.7])
    assert all(sol(x, t) == pytest.approx(f(x), abs=1e-15) for t in (0.0, 0.5, 2.0))


def test_exceptional_warns_on_non_polyharmonic_data():
    with pytest.warns(RuntimeWarning, match="not B-polyharmonic"):
        sol = solve(gauss_field(2), [1, 1], -3.0)
    assert sol.diagnostics


def test_exceptional_quiet_on_biharmonic_data():
    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)
        sol = solve(b_biharmonic_product([1, 1]), [1, 1], -3.0)
    assert sol.regime == "exceptional" and not sol.diagnostics


def test_mean_regime_is_the_mean():
    f, gamma = gauss_field(2), [1, 1]
    sol = solve(f, gamma, 3.0)
    x = np.array([0.4, 0.2])
    assert sol.regime == "mean"
    assert sol(x, 1.1) == pytest.approx(spherical_mean(f, gamma, x, 1.1, None, 24, 16), abs=1e-15)


def test_above_separation_and_initial_value():
    gamma, xi = [1, 1], [1.0, 1.0]
    f = bessel_product(gamma, xi)
    k = 5.0
    sol = solve(f, gamma, k)
    x = np.array([0.6, 0.9])
    assert sol(x, 1.0) == pytest.approx(f(x) * bessel_j_normalized(2.0, math.sqrt(2)), abs=1e-8)
    assert sol(x, 1e-9) == pytest.approx(f(x), abs=1e-8)


def test_erdelyi_kober_form_matches_ball_form():
    f, gamma = gauss_field(2), [0.5, 1.5]
    k = 2 + 2.0 + 1
    x = np.array([0.3, 0.7])
    for t in (0.5, 1.5):
        a = E.epd_case_above(E.EpdProblem(f, gamma, k), x, t, LIGHT)
        b = E.epd_case_erdelyi_kober(E.EpdProblem(f, gamma, k), x, t, LIGHT)
        assert a == pytest.approx(b, abs=1e-10)


def test_paper_constant_flag_changes_normalization():
    f, gamma = gauss_field(2), [1, 1]
    x = np.array([0.3, 0.7])
    good = solve(f, gamma, 6.0)
    alt = solve(f, gamma, 6.0, paper_constant=True)
    assert good(x, 1e-9) == pytest.approx(f(x), abs=1e-8)
    assert abs(alt(x, 1e-9) - f(x)) > 1e-3


def test_recurrence_separation_oracle():
    gamma, xi = [0.7, 1.6], [0.8, 0.5]
    f = bessel_product(gamma, xi)
    x = np.array([0.5, 1.1])
    for k in (1.0, 2.2, -0.5):
        sol = solve(f, gamma, k)
        assert sol.regime == "recurrence"
        for t in (0.3, 1.0, 1.8):
            want = f(x) * bessel_j_normalized(0.5 * (k - 1), t * np.linalg.norm(xi))
            assert sol(x, t) == pytest.approx(want, abs=1e-6)


def test_recurrence_extra_depth_agrees():
    f, gamma = gauss_field(2), [1, 1]
    x = np.array([0.4, 0.6])
    a = solve(f, gamma, 1.0)(x, 0.8)
    b = solve(f, gamma, 1.0, extra_depth=1)(x, 0.8)
    assert a == pytest.approx(b, abs=1e-6)


def test_recurrence_rejects_tiny_positive_t():
    sol = solve(gauss_field(2), [1, 1], 1.0)
    with pytest.raises(ValueError):
        sol(np.array([0.4, 0.6]), 1e-5)


def test_fractional_reading_gate():
    f, gamma = gauss_field(2), [1, 1]
    x = np.array([0.5, 0.5])
    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)
        sol = solve(f, gamma, 0.5, method="fractional")
    ref = solve(f, gamma, 0.5)
    for t in (0.5, 1.0):
        assert sol(x, t) == pytest.approx(ref(x, t), abs=1e-4)
    with pytest.warns(RuntimeWarning, match="disagrees"):
        bad = solve(f, gamma, 0.5, method="fractional", fractional_reading="t")
    assert bad.diagnostics


def test_fractional_method_domain():
    with pytest.raises(ValueError):
        solve(gauss_field(2), [1, 1], 1.5, method="fractional")
    with pytest.raises(ValueError):
        solve(gauss_field(2), [1, 1], 1.0, method="erdelyi-kober")


def test_residual_detects_non_solution():
    gamma, xi = [1, 1], [1.0, 1.0]
    f = bessel_product(gamma, xi)
    sol = solve(f, gamma, 5.0)
    x = np.array([0.6, 0.9])
    assert E.epd_residual(sol, gamma, 5.0, x, 1.0, 1e-2) < 1e-3
    # wrong parameter in the time operator: same field, different equation
    assert E.epd_residual(sol, gamma, 2.0, x, 1.0, 1e-2) > 1e-2
    with pytest.raises(ValueError):
        E.epd_residual(sol, gamma, 5.0, x, 0.005, 1e-2)


def test_second_kind_solution_oracle():
    gamma, xi = [1, 1], [1.0, 1.0]
    f = bessel_product(gamma, xi)
    x = np.array([0.6, 0.9])
    opts = E.SolverOptions(radial_order=24, shift_order=16, sphere_order=12)
    k = 0.5
    for t in (0.5, 1.5):
        want = f(x) * t ** (1 - k) * bessel_j_normalized(0.5 * (1 - k), t * math.sqrt(2))
        assert E.second_kind_solution(E.EpdProblem(f, gamma, k), x, t, opts) == pytest.approx(want, abs=1e-6)


def test_shifted_parameter_is_time_derivative():
    f, gamma = radius_squared(2), [1, 1]
    q = 4.0
    k = 1.0
    up = E.shifted_parameter_solution(E.EpdProblem(f, gamma, k), LIGHT)
    # u^k = |x|^2 + q t^2/(k+1), so u_t / t = 2q/(k+1)
    assert up(np.array([0.3, 0.5]), 0.9) == pytest.approx(2 * q / (k + 1), abs=1e-6)
    with pytest.raises(ValueError):
        E.shifted_parameter_solution(E.EpdProblem(f, gamma, -1.0))


def test_solution_views():
    sol = solve(radius_squared(2), [1, 1], 3.0)
    prof = sol.profile(np.array([1.0, 0.0]))
    np.testing.assert_allclose(prof(np.array([0.0, 1.0])), [1.0, 2.0], atol=1e-12)
    fld = sol.field_at(1.0)
    assert fld(np.array([[1.0, 1.0], [0.0, 0.0]])) == pytest.approx([3.0, 1.0], abs=1e-12)


@settings(max_examples=10, deadline=None)
@given(k=st.floats(3.2, 9.0), t=st.floats(0.05, 2.0))
def test_above_regime_quadratic_property(k, t):
    sol = solve(radius_squared(2), [1, 1], k)
    x = np.array([0.4, 0.8])
    assert sol(x, t) == pytest.approx(0.8 + 4 * t * t / (k + 1), abs=1e-9)
