"""Registry of numerical checks behind the ``verify`` command.

Each check returns a :class:`CheckResult`.  Quadrature orders are chosen per
check so that the whole suite runs at desk scale; the order-doubling tests in
the unit suite show those choices are converged.
"""

from __future__ import annotations

import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import epd as E
from .fields import (
    b_biharmonic_product,
    b_harmonic_product,
    bessel_product,
    constant_field,
    gauss_field,
    radius_squared,
)
from .means import iterated_mean_double, iterated_mean_reduced, spherical_mean
from .numerics import bessel_j_normalized, richardson
from .shift1d import (
    shift_angular,
    shift_power,
    shift_radial,
    weighted_halfline_inner,
)
from .sphere_geometry import ball_integral, sphere_grid, weighted_sphere_area
from .ultrahyperbolic import (
    SplitGeometry,
    asgeirsson_check,
    commuting_means_check,
    separable_solution,
)


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.criterion:2d} {self.name}: measured {self.measured:.3e} (tol {self.tolerance:.1e}) {self.detail}".rstrip()

    def to_dict(self) -> dict:
        return asdict(self)


def bump(t, a: float = 1.0):
    """Smooth even bump ``exp(-1/(1-(t/a)^2))`` supported on ``[0, a)``."""
    s = np.asarray(t, dtype=float) / a
    inside = np.abs(s) < 1.0
    out = np.zeros_like(s)
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


# --- 1 ---------------------------------------------------------------------


def check_shift_identity() -> CheckResult:
    grid = np.linspace(0.0, 3.0, 20)
    X, Y = np.meshgrid(grid, grid, indexing="ij")
    worst = 0.0
    for g in (0.3, 1.0, 2.0, 5.0):
        one = shift_angular(lambda t: np.ones_like(t), g, X, Y)
        worst = max(worst, float(np.max(np.abs(one - 1.0))))
        at_zero = shift_angular(np.cos, g, grid, 0.0)
        worst = max(worst, float(np.max(np.abs(at_zero - np.cos(grid)))))
    return CheckResult(1, "shift normalization and identity", worst, 1e-12, worst <= 1e-12)


# --- 2 ---------------------------------------------------------------------


def check_shift_representations() -> CheckResult:
    pts = (0.2, 0.6, 1.0, 1.4, 1.8)
    worst = 0.0
    for alpha in (0.0, 2.0, 3.2):
        f = lambda t, a=alpha: np.abs(t) ** a
        for g in (0.5, 1.0, 1.4, 2.0, 3.0):
            for x in pts:
                for y in pts:
                    if x == y:
                        continue
                    a = shift_angular(f, g, x, y)
                    b = shift_radial(f, g, x, y)
                    c = shift_power(alpha, g, x, y)
                    worst = max(worst, abs(a - b), abs(a - c), abs(b - c))
    return CheckResult(2, "angular / radial / power shift agreement", worst, 1e-8, worst <= 1e-8)


# --- 3 ---------------------------------------------------------------------


def check_product_formula() -> CheckResult:
    grid = np.linspace(0.0, 4.0, 21)
    X, Y = np.meshgrid(grid, grid, indexing="ij")
    worst = 0.0
    for g in (0.5, 1.0, 2.0, 3.7):
        nu = 0.5 * (g - 1.0)
        j = lambda t, nu=nu: bessel_j_normalized(nu, t)
        lhs = shift_angular(j, g, X, Y)
        worst = max(worst, float(np.max(np.abs(lhs - j(X) * j(Y)))))
    return CheckResult(3, "product formula for j", worst, 1e-8, worst <= 1e-8)


# --- 4 ---------------------------------------------------------------------


def check_self_adjoint() -> CheckResult:
    g = 1.5
    f = lambda t: bump(t, 1.0)
    h = lambda t: bump(t, 1.3) * np.cos(t)
    worst = 0.0
    for x in (0.3, 0.8, 1.5):
        lhs = weighted_halfline_inner(lambda y: shift_angular(f, g, x, y), h, g, 1.3, order=400)
        rhs = weighted_halfline_inner(f, lambda y: shift_angular(h, g, x, y), g, 1.3, order=400)
        worst = max(worst, abs(lhs - rhs))
    return CheckResult(4, "self-adjointness of the shift", worst, 1e-6, worst <= 1e-6)


# --- 5 ---------------------------------------------------------------------


def check_weighted_area() -> CheckResult:
    cases = [(2, (1.0, 1.0)), (2, (0.3, 2.7)), (3, (1.0, 1.0, 1.0)), (3, (0.4, 1.3, 2.2))]
    area_err = 0.0
    for n, g in cases:
        grid = sphere_grid(n, g, 48)
        area_err = max(area_err, abs(grid.area / weighted_sphere_area(n, g) - 1.0))
    # derivative identity: sphere integral = r^(1-q) d/dr ball integral
    deriv_err = 0.0
    for n, g in [(2, (0.3, 2.7)), (3, (0.4, 1.3, 2.2))]:
        q = n + sum(g)
        grid = sphere_grid(n, g, 24)
        f = gauss_field(n)
        for r in (0.5, 1.2):
            sphere = grid.integrate_field(f, r)

            def diff(h, r=r):
                return (ball_integral(f, g, r + h, grid=grid) - ball_integral(f, g, r - h, grid=grid)) / (2 * h)

            d = richardson(diff, 1e-2, 3)
            deriv_err = max(deriv_err, abs(r ** (1 - q) * d - sphere) / abs(sphere))
    ok = area_err <= 1e-10 and deriv_err <= 1e-6
    return CheckResult(
        5, "weighted area / ball derivative identity", max(area_err, deriv_err), 1e-10, ok,
        f"area {area_err:.1e} (tol 1e-10), derivative {deriv_err:.1e} (tol 1e-6)",
    )


# --- 6 ---------------------------------------------------------------------


def check_mean_properties() -> CheckResult:
    ts = np.linspace(0.0, 3.0, 13)
    norm_err = quad_err = eig_err = 0.0
    setups = [((0.8, 1.7), np.array([0.6, 0.9]), 48, 64), ((0.4, 1.3, 2.2), np.array([0.5, 0.7, 0.3]), 10, 12)]
    for g, x, so, ho in setups:
        n = len(g)
        grid = sphere_grid(n, g, so)
        one = spherical_mean(constant_field(n), g, x, ts, grid, ho)
        norm_err = max(norm_err, float(np.max(np.abs(one - 1.0))))
        r2 = spherical_mean(radius_squared(n), g, x, ts, grid, ho)
        quad_err = max(quad_err, float(np.max(np.abs(r2 - (x @ x + ts**2)))))
        q = n + sum(g)
        for norm in (1.0, math.sqrt(2.0), 2.0):
            xi = np.full(n, norm / math.sqrt(n))
            B = bessel_product(g, xi)
            got = spherical_mean(B, g, x, ts, grid, ho)
            want = B(x) * bessel_j_normalized(0.5 * (q - 2.0), ts * norm)
            eig_err = max(eig_err, float(np.max(np.abs(got - want))))
    ok = norm_err <= 1e-10 and quad_err <= 1e-8 and eig_err <= 1e-8
    return CheckResult(
        6, "mean normalization / |x|^2 / eigenfunction", max(norm_err, quad_err, eig_err), 1e-8, ok,
        f"M[1] {norm_err:.1e}, M[|x|^2] {quad_err:.1e}, eigen {eig_err:.1e}",
    )


# --- 7 ---------------------------------------------------------------------


def check_iterated_reduction() -> CheckResult:
    x = np.array([0.5, 0.8])
    worst = 0.0
    radii = (0.3, 0.7, 1.2)
    for g in ((1.0, 1.0), (0.8, 1.7)):
        f = gauss_field(2)
        grid12 = sphere_grid(2, g, 12)
        grid32 = sphere_grid(2, g, 32)
        for lam in radii:
            for mu in radii:
                a = iterated_mean_double(f, g, x, lam, mu, grid12, order=12)
                b = iterated_mean_reduced(f, g, x, lam, mu, grid32, order=32, radial_order=32)
                worst = max(worst, abs(a - b))
    return CheckResult(7, "iterated mean: double vs reduced", worst, 1e-6, worst <= 1e-6)


# --- 8 ---------------------------------------------------------------------

LIGHT = E.SolverOptions(radial_order=32, shift_order=24, sphere_order=16)


def _residual_ratio(sol, gamma, k, x, t):
    r1 = E.epd_residual(sol, gamma, k, x, t, 1e-2)
    r2 = E.epd_residual(sol, gamma, k, x, t, 5e-3)
    return r1 / r2


def check_residual_convergence() -> CheckResult:
    g = (1.0, 1.0)
    x = np.array([0.6, 0.9])
    sep = bessel_product(g, [1.0, 1.0])
    cases = [
        ("mean", 3.0, sep),
        ("above", 5.0, sep),
        ("recurrence", 1.0, sep),
        ("recurrence", 0.5, sep),
        ("exceptional", -1.0, b_harmonic_product(g)),
        ("exceptional", -3.0, b_biharmonic_product(g)),
    ]
    ratios = []
    for label, k, f in cases:
        sol = E.solve_epd(E.EpdProblem(f, g, k), LIGHT)
        assert sol.regime == label
        ratios.append((label, k, _residual_ratio(sol, g, k, x, 1.0)))
    dev = max(abs(r - 4.0) for *_, r in ratios)
    ok = all(3.5 <= r <= 4.5 for *_, r in ratios)
    detail = ", ".join(f"{lab} k={k:g}: {r:.3f}" for lab, k, r in ratios)
    return CheckResult(8, "EPD residual second-order convergence", dev, 0.5, ok, detail)


# --- 9 ---------------------------------------------------------------------


def check_separation_oracle() -> CheckResult:
    g = (1.0, 1.0)
    xi = np.array([1.0, 1.0])
    f = bessel_product(g, xi)
    x = np.array([0.6, 0.9])
    ts = np.array([0.25, 0.75, 1.25, 2.0])
    setups = [
        (3.0, LIGHT),
        (5.0, LIGHT),
        (4.2, LIGHT),
        (5.0, replace(LIGHT, method="erdelyi-kober")),
        (2.0, LIGHT),
        (1.0, LIGHT),
        (0.5, LIGHT),
        (0.5, replace(LIGHT, method="fractional", fractional_gate=False)),
    ]
    worst = 0.0
    parts = []
    for k, opts in setups:
        sol = E.solve_epd(E.EpdProblem(f, g, k), opts)
        want = f(x) * bessel_j_normalized(0.5 * (k - 1.0), ts * np.linalg.norm(xi))
        err = float(np.max(np.abs(sol.evaluate_many(x, ts) - want)))
        worst = max(worst, err)
        parts.append(f"{sol.regime}{'/' + opts.method if opts.method != 'auto' else ''} k={k:g}: {err:.1e}")
    return CheckResult(9, "separation-of-variables oracle", worst, 1e-5, worst <= 1e-5, "; ".join(parts))


# --- 10 --------------------------------------------------------------------


def check_recurrence_identities() -> CheckResult:
    g = (1.0, 1.0)
    xi = np.array([1.0, 1.0])
    f = bessel_product(g, xi)
    x = np.array([0.6, 0.9])
    ts = (0.5, 1.0, 2.0)
    norm = float(np.linalg.norm(xi))
    opts = E.SolverOptions(radial_order=24, shift_order=16, sphere_order=12)
    second = 0.0
    for k in (0.5, -0.5):
        for t in ts:
            v = E.second_kind_solution(E.EpdProblem(f, g, k), x, t, opts)
            want = f(x) * t ** (1 - k) * bessel_j_normalized(0.5 * (1 - k), t * norm)
            second = max(second, abs(v - want))
    deriv = 0.0
    for k in (1.0, 0.5):
        prob = E.EpdProblem(f, g, k)
        u = E.solve_epd(prob, opts)
        up = E.shifted_parameter_solution(prob, opts)
        for t in ts:
            h = 0.02
            vals = u.evaluate_many(x, [t + h, t - h, t + h / 2, t - h / 2])
            coarse, fine = (vals[0] - vals[1]) / (2 * h), (vals[2] - vals[3]) / h
            ut = (4.0 * fine - coarse) / 3.0
            deriv = max(deriv, abs(ut - t * up.evaluate(x, t)))
    ok = second <= 1e-5 and deriv <= 1e-4
    return CheckResult(
        10, "recurrence identities", max(second, deriv), 1e-5, ok,
        f"second-kind {second:.1e} (tol 1e-5), derivative {deriv:.1e} (tol 1e-4)",
    )


# --- 11 --------------------------------------------------------------------


def check_exceptional_closed_form() -> CheckResult:
    worst = 0.0
    resid = 0.0
    for g in ((1.0, 1.0), (0.8, 1.7)):
        n = len(g)
        q = n + sum(g)
        sol = E.solve_epd(E.EpdProblem(radius_squared(n), g, -3.0), replace(LIGHT, delta_h=0.25, richardson_levels=1))
        for x in (np.array([0.6, 0.9]), np.array([0.0, 1.3]), np.array([1.5, 0.2])):
            ts = np.linspace(0.0, 2.0, 9)
            got = sol.evaluate_many(x, ts)
            worst = max(worst, float(np.max(np.abs(got - (x @ x - q * ts**2 / 2)))))
            resid = max(resid, E.epd_residual(sol, g, -3.0, x + 0.1, 1.0, 1e-2))
    ok = worst <= 1e-12 and resid <= 1e-8
    return CheckResult(
        11, "exceptional k=-3 closed form", worst, 1e-12, ok,
        f"closed form {worst:.1e}, residual {resid:.1e} (stencil tol 1e-8)",
    )


# --- 12 --------------------------------------------------------------------


def check_asgeirsson() -> CheckResult:
    y = np.array([0.5, 0.3])
    equal = SplitGeometry(2, 2, (1.0, 1.0), (1.0, 1.0))
    mixed = SplitGeometry(1, 2, (3.0,), (1.0, 1.0))
    bad = SplitGeometry(2, 2, (1.0, 1.0), (1.0, 2.0))
    cases = [
        (equal, separable_solution(equal, [1.0, 1.0], [1.0, 1.0]), [np.array([0.4, 0.7]), np.array([1.1, 0.2])]),
        (mixed, separable_solution(mixed, [math.sqrt(2.0)], [1.0, 1.0]), [np.array([0.6]), np.array([1.3])]),
    ]
    ident = comm = 0.0
    for geo, u, xs in cases:
        for x in xs:
            for r in (0.5, 1.0, 2.0):
                a, b = asgeirsson_check(u, geo, x, y, r)
                ident = max(ident, abs(a - b))
            a, b = commuting_means_check(u, geo, x, y, 0.7, 1.2, shift_order=10, sphere_order=10)
            comm = max(comm, abs(a - b))
    ub = separable_solution(bad, [1.0, 1.0], [1.0, 1.0])
    a, b = asgeirsson_check(ub, bad, np.array([0.4, 0.7]), y, 1.0)
    gap = abs(a - b)
    ok = ident <= 1e-6 and comm <= 1e-6 and gap > 1e-3
    return CheckResult(
        12, "Asgeirsson identity / commuting means", max(ident, comm), 1e-6, ok,
        f"identity {ident:.1e}, commuting {comm:.1e}, inadmissible gap {gap:.2e} (> 1e-3)",
    )


# --- 13 --------------------------------------------------------------------


def check_erdelyi_kober() -> CheckResult:
    worst = 0.0
    for g in ((1.0, 1.0), (0.8, 1.7)):
        q = 2 + sum(g)
        prob = E.EpdProblem(gauss_field(2), g, q + 1.0)
        direct = E.solve_epd(prob, LIGHT)
        ek = E.solve_epd(prob, replace(LIGHT, method="erdelyi-kober"))
        x = np.array([0.6, 0.9])
        ts = np.array([0.3, 1.0, 1.8])
        worst = max(worst, float(np.max(np.abs(direct.evaluate_many(x, ts) - ek.evaluate_many(x, ts)))))
    return CheckResult(13, "Erdelyi-Kober form vs radial quadrature", worst, 1e-6, worst <= 1e-6)


# --- 14 --------------------------------------------------------------------


def degenerate_limit_errors(gammas=(0.5, 0.1, 0.02), x: float = 0.4) -> list[float]:
    """``|int_0^R T^y f(x) y^g dy - int_0^inf f|`` for a smooth bump, per ``g``."""
    f = lambda t: bump(t, 1.0)
    exact = weighted_halfline_inner(f, lambda t: np.ones_like(t), 0.0, 1.0, order=400)
    R = x + 1.0
    errs = []
    for g in gammas:
        val = weighted_halfline_inner(
            lambda y, g=g: shift_angular(f, g, x, y, order=200), lambda y: np.ones_like(y), g, R, order=400
        )
        errs.append(abs(val - exact))
    return errs


def check_degenerate_limit() -> CheckResult:
    errs = degenerate_limit_errors()
    worst_ratio = max(errs[i + 1] / errs[i] for i in range(len(errs) - 1))
    ok = all(errs[i + 1] < errs[i] for i in range(len(errs) - 1))
    detail = "errors " + ", ".join(f"{e:.3e}" for e in errs)
    return CheckResult(14, "gamma -> 0 weighted-integral limit", worst_ratio, 1.0, ok, detail)


CHECKS = {
    1: check_shift_identity,
    2: check_shift_representations,
    3: check_product_formula,
    4: check_self_adjoint,
    5: check_weighted_area,
    6: check_mean_properties,
    7: check_iterated_reduction,
    8: check_residual_convergence,
    9: check_separation_oracle,
    10: check_recurrence_identities,
    11: check_exceptional_closed_form,
    12: check_asgeirsson,
    13: check_erdelyi_kober,
    14: check_degenerate_limit,
}


def run_check(criterion: int) -> CheckResult:
    fn = CHECKS[criterion]
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        try:
            res = fn()
        except Exception as exc:  # a crashing check is a failed check
            res = CheckResult(criterion, fn.__name__, math.inf, 0.0, False, f"error: {exc!r}")
    return replace(res, seconds=round(time.perf_counter() - start, 3))


def thread_count() -> int:
    raw = os.environ.get("BESSEL_MEANS_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_checks(selected=None, threads: int | None = None) -> list[CheckResult]:
    """Run checks in criterion order; with several threads results keep that order."""
    ids = sorted(CHECKS) if selected is None else list(selected)
    threads = threads or thread_count()
    if threads == 1:
        return [run_check(c) for c in ids]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run_check, ids))
