"""Cauchy problem for the general Euler-Poisson-Darboux equation.

    Delta_gamma u = u_tt + (k/t) u_t,   u(x, 0) = f(x),   u_t(x, 0) = 0.

Regimes, with ``q = n + |gamma|``:

* ``mean``         k = q - 1, the weighted spherical mean itself;
* ``above``        k > q - 1, a weighted radial average of the mean;
* ``recurrence``   k < q - 1 and not a negative odd integer, built from a
                   solution with parameter ``k + 2m`` by ``(d/(t dt))^m``;
* ``exceptional``  k = -1, -3, ..., a finite series in powers of Delta_gamma;
* ``fractional``   0 < k < 1 through a Riemann-Liouville derivative (opt-in).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .numerics import bessel_operator_fd, gauss_jacobi_rule, richardson
from .means import _rows, spherical_mean_many
from .shift1d import MultiIndex, ScalarField, as_multi_index, as_profile
from .sphere_geometry import SphereGrid, sphere_grid, weighted_sphere_area

REGIMES = ("mean", "above", "recurrence", "exceptional", "fractional")
METHODS = ("auto", "fractional", "erdelyi-kober")
_SEAM_TOL = 1e-12


@dataclass(frozen=True)
class SolverOptions:
    radial_order: int = 64
    shift_order: int = 64
    sphere_order: int = 48
    extra_depth: int = 0  # recurrence depth beyond the minimal m
    fd_rel: float = 0.05  # stencil step relative to t
    richardson_levels: int = 3
    t_floor: float = 1e-3
    paper_constant: bool = False
    method: str = "auto"
    fractional_reading: str = "t2"  # outer evaluation point: "t2" or "t"
    fractional_order: str = "continued"  # "continued" or "printed"
    fractional_gate: bool = True
    delta_h: float = 0.05  # base step of the Delta_gamma stencil
    polyharmonic_tol: float = 1e-6

    def __post_init__(self):
        for name in ("radial_order", "shift_order", "sphere_order"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.extra_depth < 0:
            raise ValueError("extra_depth must be >= 0")
        if not 0 < self.fd_rel < 0.25:
            raise ValueError("fd_rel must lie in (0, 0.25)")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.fractional_reading not in ("t", "t2"):
            raise ValueError("fractional_reading must be 't' or 't2'")
        if self.fractional_order not in ("continued", "printed"):
            raise ValueError("fractional_order must be 'continued' or 'printed'")


@dataclass(frozen=True, eq=False)
class EpdProblem:
    f: ScalarField
    gamma: MultiIndex
    k: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", as_multi_index(self.gamma))
        object.__setattr__(self, "k", float(self.k))
        if getattr(self.f, "dimension", len(self.gamma)) != len(self.gamma):
            raise ValueError("initial data and gamma disagree on the dimension")

    @property
    def n(self) -> int:
        return len(self.gamma)

    @property
    def q(self) -> float:
        return self.n + self.gamma.abs


def _is_negative_odd(k: float) -> bool:
    return k < 0 and abs(k - round(k)) < 1e-12 and int(round(k)) % 2 == 1


def classify(k: float, q: float) -> str:
    if abs(k - (q - 1.0)) < _SEAM_TOL:
        return "mean"
    if k > q - 1.0:
        return "above"
    if _is_negative_odd(k):
        return "exceptional"
    return "recurrence"


def recurrence_depth(k: float, q: float, extra: int = 0) -> int:
    """Smallest ``m >= 1`` with ``k + 2m >= q - 1``, plus ``extra``."""
    m = max(1, math.ceil((q - 1.0 - k) / 2.0 - 1e-12))
    return m + int(extra)


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------


def epd_normalizer(n: int, gamma, k: float) -> float:
    """Ball constant fixed by ``u(x, 0) = f(x)`` for ``k > q - 1``.

    ``2^n Gamma((k+1)/2) / (Gamma((k-q+1)/2) prod Gamma((g_i+1)/2))``.
    """
    gamma = as_multi_index(gamma)
    q = n + gamma.abs
    if not k > q - 1:
        raise ValueError("normalizer defined only for k > n + |gamma| - 1")
    log_c = n * math.log(2.0) + math.lgamma(0.5 * (k + 1.0)) - math.lgamma(0.5 * (k - q + 1.0))
    log_c -= sum(math.lgamma(0.5 * (g + 1.0)) for g in gamma)
    return math.exp(log_c)


def printed_constant(n: int, gamma, k: float) -> float:
    """The alternative constant kept for comparison tables; it does not reproduce the data."""
    gamma = as_multi_index(gamma)
    q = n + gamma.abs
    log_c = sum(math.lgamma(0.5 * (g + 1.0)) for g in gamma)
    log_c += math.lgamma(0.5 * (k - q + 1.0)) - n * math.log(2.0) - math.lgamma(0.5 * k)
    return math.exp(log_c)


# ---------------------------------------------------------------------------
# Delta_gamma by finite differences
# ---------------------------------------------------------------------------


def _delta_many(f, gamma: MultiIndex, P: np.ndarray, h: float) -> np.ndarray:
    """Central-difference ``Delta_gamma f`` at rows of ``P`` with one batched call."""
    n = len(gamma)
    P = np.abs(np.asarray(P, dtype=float))
    lead = P.shape[:-1]
    P = P.reshape(-1, n)
    stack = [P]
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        stack += [P + e, np.abs(P - e)]
    vals = np.asarray(f(np.stack(stack)), dtype=float)
    center = vals[0]
    total = np.zeros(len(P))
    for i, g in enumerate(gamma):
        plus, minus = vals[1 + 2 * i], vals[2 + 2 * i]
        second = (plus - 2.0 * center + minus) / (h * h)
        xi = P[:, i]
        with np.errstate(divide="ignore", invalid="ignore"):
            radial = second + g * (plus - minus) / (2.0 * h * xi)
        total += np.where(xi == 0.0, (1.0 + g) * second, radial)
    return total.reshape(lead)


def apply_delta_gamma(f, gamma, x, h: float) -> float:
    """``Delta_gamma f(x) = sum_i (B_{gamma_i})_{x_i} f`` with step ``h``."""
    gamma = as_multi_index(gamma)
    x = np.asarray(x, dtype=float)
    if x.shape != (len(gamma),):
        raise ValueError("point dimension does not match gamma")
    if not h > 0:
        raise ValueError("step must be positive")
    return float(_delta_many(f, gamma, x, h))


def delta_gamma_field(f, gamma, h: float = 0.05, levels: int = 3) -> ScalarField:
    """``Delta_gamma f`` as a field, Richardson-extrapolated over ``h, h/2, ...``."""
    gamma = as_multi_index(gamma)

    def func(p):
        return richardson(lambda hh: _delta_many(f, gamma, p, hh), h, levels)

    return ScalarField(func, len(gamma), name=f"delta[{getattr(f, 'name', 'f')}]")


def b_polyharmonic_residual(f, gamma, order: int, probes, h: float, levels: int = 1) -> float:
    """``max |Delta_gamma^order f|`` over probe points with nested stencils.

    ``levels = 1`` is the plain O(h^2) stencil; more levels add Richardson
    extrapolation at every nesting step.
    """
    gamma = as_multi_index(gamma)
    if int(order) < 1:
        raise ValueError("order must be >= 1")
    g = f
    for _ in range(int(order)):
        g = delta_gamma_field(g, gamma, h, levels)
    return float(np.max(np.abs(g(_rows(probes, len(gamma))))))


# ---------------------------------------------------------------------------
# fractional operators
# ---------------------------------------------------------------------------


def erdelyi_kober(phi, alpha: float, sigma: float, eta: float, x: float, order: int = 64) -> float:
    """Left Erdelyi-Kober integral ``I^alpha_{0+; sigma, eta} phi(x)``.

    After ``r = x s^(1/sigma)`` it is ``Gamma(alpha)^-1 int_0^1 (1-s)^(alpha-1) s^eta phi(x s^(1/sigma)) ds``.
    """
    alpha, sigma, eta, x = float(alpha), float(sigma), float(eta), float(x)
    if not alpha > 0:
        raise ValueError("Erdelyi-Kober order must be positive")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if not eta > -1:
        raise ValueError("eta must exceed -1 for a convergent integral")
    if not x > 0:
        raise ValueError("evaluation point must be positive")
    rule = gauss_jacobi_rule(order, alpha - 1.0, eta)
    s = 0.5 * (1.0 + rule.nodes)
    vals = as_profile(phi)(x * s ** (1.0 / sigma))
    return 2.0 ** (-alpha - eta) / math.gamma(alpha) * float(vals @ rule.weights)


def _rl_integral(psi, a: float, s: np.ndarray, power: float, rule) -> np.ndarray:
    """``I^a [rho^power psi(rho)](s)``; ``rule`` carries exponents ``(a-1, power)``."""
    if a == 0.0:
        return s**power * psi(s)
    rho = 0.5 * s[:, None] * (1.0 + rule.nodes[None, :])
    vals = psi(rho.reshape(-1)).reshape(rho.shape)
    return (0.5 * s) ** (a + power) / math.gamma(a) * (vals @ rule.weights)


def _central_power(g, tau, m: int, h):
    """``(D_h)^m g(tau)`` with ``D_h`` the centered first difference."""
    acc = 0.0
    for j in range(m + 1):
        acc = acc + (-1) ** j * math.comb(m, j) * g(tau + (m - 2 * j) * h)
    return acc / (2.0 * h) ** m


def riemann_liouville_derivative(
    phi,
    alpha: float,
    t: float,
    h: float | None = None,
    power: float = 0.0,
    order: int = 64,
    levels: int = 3,
) -> float:
    """Left Riemann-Liouville derivative ``D^alpha`` of ``rho^power phi(rho)`` at ``t``.

    The integral of order ``m - alpha`` uses a Jacobi rule; ``(d/dt)^m`` uses
    centered differences of step ``h`` (default ``t/50``) with Richardson
    extrapolation over ``levels``.
    """
    alpha, t = float(alpha), float(t)
    if not alpha > 0:
        raise ValueError("derivative order must be positive")
    if not t > 0:
        raise ValueError("t must be positive")
    m = math.ceil(alpha - 1e-14)
    a = m - alpha
    if h is None:
        h = 0.02 * t
    if m * h >= t:
        raise ValueError("stencil reaches below zero; reduce h")
    psi = as_profile(phi)
    rule = gauss_jacobi_rule(order, a - 1.0, power) if a > 0 else None

    def g(s):
        return _rl_integral(psi, a, np.atleast_1d(np.asarray(s, dtype=float)), power, rule)[0]

    return richardson(lambda hh: _central_power(g, t, m, hh), h, levels)


# ---------------------------------------------------------------------------
# regime kernels; every kernel maps rows (X, T) to values
# ---------------------------------------------------------------------------


def _mean_rows(f, gamma, X, T, grid, opts):
    return spherical_mean_many(f, gamma, X, T, grid, opts.shift_order)


def _above_rows(f, gamma, k, X, T, grid, opts):
    n = len(gamma)
    q = n + gamma.abs
    b = 0.5 * (k - q - 1.0)
    out = np.empty(len(T))
    zero = T == 0.0
    if zero.any():
        out[zero] = f(X[zero])
    if not (~zero).any():
        return out
    rule = gauss_jacobi_rule(opts.radial_order, b, q - 1.0)
    if opts.paper_constant:
        const = printed_constant(n, gamma, k) * weighted_sphere_area(n, gamma)
    else:
        const = 2.0 * math.exp(
            math.lgamma(0.5 * (k + 1.0)) - math.lgamma(0.5 * q) - math.lgamma(b + 1.0)
        )
    # r = t(1+u)/2 on [0, t]; the t-powers cancel, leaving ((3+u)/2)^b.
    kernel = rule.weights * (0.5 * (3.0 + rule.nodes)) ** b * 2.0 ** (-b - q)
    xs, ts = X[~zero], T[~zero]
    R = opts.radial_order
    radii = (ts[:, None] * 0.5 * (1.0 + rule.nodes[None, :])).reshape(-1)
    M = spherical_mean_many(f, gamma, np.repeat(xs, R, axis=0), radii, grid, opts.shift_order)
    out[~zero] = const * (M.reshape(-1, R) @ kernel)
    return out


def _ek_rows(f, gamma, k, X, T, grid, opts):
    n = len(gamma)
    q = n + gamma.abs
    alpha = 0.5 * (k - q + 1.0)
    eta = 0.5 * q - 1.0
    out = np.empty(len(T))
    zero = T == 0.0
    if zero.any():
        out[zero] = f(X[zero])
    if not (~zero).any():
        return out
    rule = gauss_jacobi_rule(opts.radial_order, alpha - 1.0, eta)
    s = 0.5 * (1.0 + rule.nodes)
    xs, ts = X[~zero], T[~zero]
    R = opts.radial_order
    radii = (ts[:, None] * np.sqrt(s)[None, :]).reshape(-1)
    M = spherical_mean_many(f, gamma, np.repeat(xs, R, axis=0), radii, grid, opts.shift_order)
    ek = 2.0 ** (-alpha - eta) / math.gamma(alpha) * (M.reshape(-1, R) @ rule.weights)
    if opts.paper_constant:
        d = 0.5 * printed_constant(n, gamma, k) * weighted_sphere_area(n, gamma) * math.gamma(alpha)
    else:
        d = math.exp(math.lgamma(0.5 * (k + 1.0)) - math.lgamma(0.5 * q))
    out[~zero] = d * ek
    return out


def _nested_coefficients(m: int, r: float) -> dict[int, float]:
    """Coefficients of ``(d/(t dt))^m`` realised as nested centered differences at ``t = 1``, ``h = r``.

    Offsets are in units of ``h``; at a general ``t`` with ``h = r t`` every
    coefficient scales by ``t^(-2m)``.
    """

    def rec(c: int, depth: int) -> dict[int, float]:
        if depth == 0:
            return {c: 1.0}
        acc: dict[int, float] = {}
        scale = 1.0 / (2.0 * r * (1.0 + c * r))
        for sign in (1, -1):
            for j, w in rec(c + sign, depth - 1).items():
                acc[j] = acc.get(j, 0.0) + sign * w * scale
        return acc

    return rec(0, m)


def _recurrence_rows(f, gamma, k, X, T, grid, opts):
    q = len(gamma) + gamma.abs
    m = recurrence_depth(k, q, opts.extra_depth)
    K = k + 2 * m
    scale = math.prod(k + 2 * i - 1 for i in range(1, m + 1))
    seam = classify(K, q) == "mean"

    def u_big(Xr, Tr):
        if seam:
            return _mean_rows(f, gamma, Xr, Tr, grid, opts)
        return _above_rows(f, gamma, K, Xr, Tr, grid, opts)

    levels = opts.richardson_levels
    ratios = [opts.fd_rel / 2.0**lv for lv in range(levels)]
    stencils = [_nested_coefficients(m, r) for r in ratios]

    def at_positive(Xr, Tr):
        pts_t, pts_x, spans = [], [], []
        for r, st in zip(ratios, stencils):
            offs = np.array(sorted(st))
            s = (Tr[:, None] * (1.0 + offs[None, :] * r)).reshape(-1)
            pts_t.append(s)
            pts_x.append(np.repeat(Xr, len(offs), axis=0))
            spans.append((offs, np.array([st[j] for j in offs])))
        s_all = np.concatenate(pts_t)
        g_all = s_all ** (K - 1.0) * u_big(np.concatenate(pts_x), s_all)
        approx, pos = [], 0
        for offs, coef in spans:
            block = g_all[pos : pos + len(Tr) * len(offs)].reshape(len(Tr), len(offs))
            pos += block.size
            approx.append(block @ coef)
        table = approx
        for j in range(1, levels):
            fac = 4.0**j
            table = [(fac * table[i + 1] - table[i]) / (fac - 1.0) for i in range(len(table) - 1)]
        return Tr ** (1.0 - k) * Tr ** (-2.0 * m) * table[0] / scale

    out = np.empty(len(T))
    zero = T == 0.0
    bad = (T > 0) & (T < opts.t_floor)
    if bad.any():
        raise ValueError(
            f"t = {T[bad].min():.3g} is below the recurrence floor {opts.t_floor:g}; "
            "use t = 0 (extrapolated) or t >= floor"
        )
    live = ~zero
    if live.any():
        out[live] = at_positive(X[live], T[live])
    if zero.any():
        Xz = X[zero]
        two = at_positive(Xz, np.full(len(Xz), 2.0 * opts.t_floor))
        four = at_positive(Xz, np.full(len(Xz), 4.0 * opts.t_floor))
        out[zero] = (4.0 * two - four) / 3.0
    return out


def _exceptional_rows(f, gamma, k, X, T, grid, opts):
    H = int(round(-(k + 1.0) / 2.0))
    out = np.asarray(f(X), dtype=float).copy()
    field_h = f
    denom = 1.0
    fact = 1.0
    for h in range(1, H + 1):
        field_h = delta_gamma_field(field_h, gamma, opts.delta_h, opts.richardson_levels)
        denom *= k + 2 * h - 1
        fact *= 2 * h
        out += field_h(X) / denom * T ** (2 * h) / fact
    return out


def _fractional_rows(f, gamma, k, X, T, grid, opts):
    n = len(gamma)
    q = n + gamma.abs
    alpha = 0.5 * (q - 1.0 - k) if opts.fractional_order == "continued" else 0.5 * (q - 1.0)
    m = math.ceil(alpha - 1e-14)
    a = m - alpha
    p = 0.5 * (q - 2.0)
    rule = gauss_jacobi_rule(opts.radial_order, a - 1.0, p) if a > 0 else None
    pref = math.exp(math.lgamma(0.5 * (k + 1.0)) - math.lgamma(0.5 * q))

    out = np.empty(len(T))
    zero = T == 0.0
    if zero.any():
        out[zero] = f(X[zero])
    for idx in np.flatnonzero(~zero):
        x, t = X[idx], T[idx]
        tau = t * t if opts.fractional_reading == "t2" else t

        def psi(rho, x=x):
            rho = np.asarray(rho, dtype=float)
            return spherical_mean_many(f, gamma, x, np.sqrt(rho), grid, opts.shift_order)

        def g(s):
            return _rl_integral(psi, a, np.atleast_1d(s), p, rule)

        def stencil(hh, tau=tau):
            return _central_power(lambda z: g(np.array([z]))[0], tau, m, hh)

        deriv = richardson(stencil, opts.fd_rel * tau, opts.richardson_levels)
        out[idx] = pref * t ** (1.0 - k) * deriv
    return out


# ---------------------------------------------------------------------------
# solution object and dispatch
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EpdSolution:
    problem: EpdProblem
    regime: str
    k: float
    m: int
    options: SolverOptions
    method: str = "auto"
    diagnostics: tuple[str, ...] = field(default=())

    @cached_property
    def grid(self) -> SphereGrid:
        return sphere_grid(self.problem.n, self.problem.gamma, self.options.sphere_order)

    def evaluate_many(self, X, T) -> np.ndarray:
        gamma = self.problem.gamma
        X = _rows(X, len(gamma))
        T = np.abs(np.asarray(T, dtype=float)).reshape(-1)
        X, Tb = np.broadcast_arrays(X, T[:, None])
        X, T = np.ascontiguousarray(X), np.ascontiguousarray(Tb[:, 0])
        f, k, o = self.problem.f, self.k, self.options
        if self.regime == "mean":
            return _mean_rows(f, gamma, X, T, self.grid, o)
        if self.regime == "above":
            kern = _ek_rows if self.method == "erdelyi-kober" else _above_rows
            return kern(f, gamma, k, X, T, self.grid, o)
        if self.regime == "recurrence":
            return _recurrence_rows(f, gamma, k, X, T, self.grid, o)
        if self.regime == "exceptional":
            return _exceptional_rows(f, gamma, k, X, T, self.grid, o)
        return _fractional_rows(f, gamma, k, X, T, self.grid, o)

    def evaluate(self, x, t: float) -> float:
        return float(self.evaluate_many(np.asarray(x, dtype=float), [t])[0])

    __call__ = evaluate

    def profile(self, x):
        """``t -> u(x, t)`` for arrays of ``t``."""
        x = np.asarray(x, dtype=float)

        def prof(t):
            t = np.asarray(t, dtype=float)
            return self.evaluate_many(x, t.reshape(-1)).reshape(t.shape)

        return prof

    def field_at(self, t: float) -> ScalarField:
        n = self.problem.n

        def func(p):
            flat = p.reshape(-1, n)
            return self.evaluate_many(flat, np.full(len(flat), float(t))).reshape(p.shape[:-1])

        return ScalarField(func, n, name=f"u(.,{t:g})")


def _default_probes(n: int) -> np.ndarray:
    return np.array([np.full(n, 0.5), np.full(n, 1.0), np.linspace(0.3, 1.2, n)])


def solve_epd(problem: EpdProblem, options: SolverOptions | None = None) -> EpdSolution:
    """Pick the regime from ``k`` and ``q`` and return an evaluable solution."""
    opts = options or SolverOptions()
    k, q = problem.k, problem.q
    regime = classify(k, q)
    diagnostics: list[str] = []
    m = 0
    method = opts.method

    if method == "fractional":
        if not 0 < k < 1:
            raise ValueError("the fractional representation needs 0 < k < 1")
        if k >= q - 1:
            raise ValueError("the fractional representation needs k < n + |gamma| - 1")
        regime = "fractional"
    elif method == "erdelyi-kober" and regime != "above":
        raise ValueError("the Erdelyi-Kober form is defined for k > n + |gamma| - 1")

    if regime == "recurrence":
        m = recurrence_depth(k, q, opts.extra_depth)
    if regime == "exceptional":
        order = int(round((1.0 - k) / 2.0))
        resid = b_polyharmonic_residual(
            problem.f, problem.gamma, order, _default_probes(problem.n), opts.delta_h, opts.richardson_levels
        )
        if resid > opts.polyharmonic_tol:
            msg = (
                f"initial data is not B-polyharmonic of order {order} "
                f"(max |Delta^{order} f| = {resid:.3g} at probes); the series is still evaluated"
            )
            diagnostics.append(msg)
            warnings.warn(msg, RuntimeWarning, stacklevel=2)

    sol = EpdSolution(problem, regime, k, m, opts, method, tuple(diagnostics))

    if regime == "fractional" and opts.fractional_gate:
        x0 = np.full(problem.n, 0.5)
        ref = solve_epd(problem, replace(opts, method="auto"))
        gap = abs(sol.evaluate(x0, 0.5) - ref.evaluate(x0, 0.5))
        if gap > 1e-4:
            msg = (
                f"fractional reading ({opts.fractional_reading}, {opts.fractional_order}) "
                f"disagrees with the recurrence solution by {gap:.3g} at t = 0.5"
            )
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
            sol = replace(sol, diagnostics=sol.diagnostics + (msg,))
    return sol


def _single(problem, regime, options, x, t, method="auto"):
    sol = EpdSolution(problem, regime, problem.k, 0, options or SolverOptions(), method)
    return sol.evaluate(x, t)


def epd_case_mean(problem: EpdProblem, x, t: float, options: SolverOptions | None = None) -> float:
    if classify(problem.k, problem.q) != "mean":
        raise ValueError("epd_case_mean needs k = n + |gamma| - 1")
    return _single(problem, "mean", options, x, t)


def epd_case_above(problem: EpdProblem, x, t: float, options: SolverOptions | None = None) -> float:
    if not problem.k > problem.q - 1.0:
        raise ValueError("epd_case_above needs k > n + |gamma| - 1")
    return _single(problem, "above", options, x, t)


def epd_case_erdelyi_kober(problem: EpdProblem, x, t: float, options: SolverOptions | None = None) -> float:
    """Same solution as :func:`epd_case_above` through the Erdelyi-Kober integral of the mean."""
    if not problem.k > problem.q - 1.0:
        raise ValueError("the Erdelyi-Kober form needs k > n + |gamma| - 1")
    return _single(problem, "above", options, x, t, method="erdelyi-kober")


def epd_case_recurrence(problem: EpdProblem, x, t: float, options: SolverOptions | None = None) -> float:
    if classify(problem.k, problem.q) != "recurrence":
        raise ValueError("epd_case_recurrence needs k < n + |gamma| - 1 and k not negative odd")
    opts = options or SolverOptions()
    sol = EpdSolution(problem, "recurrence", problem.k, recurrence_depth(problem.k, problem.q, opts.extra_depth), opts)
    return sol.evaluate(x, t)


def epd_case_exceptional(problem: EpdProblem, x, t: float, options: SolverOptions | None = None) -> float:
    if not _is_negative_odd(problem.k):
        raise ValueError("epd_case_exceptional needs k in {-1, -3, -5, ...}")
    return _single(problem, "exceptional", options, x, t)


def epd_fractional_small_k(problem: EpdProblem, x, t: float, options: SolverOptions | None = None) -> float:
    if not 0 < problem.k < 1:
        raise ValueError("epd_fractional_small_k needs 0 < k < 1")
    return _single(problem, "fractional", options, x, t)


def epd_residual(u: EpdSolution, gamma, k: float, x, t: float, h: float) -> float:
    """``|Delta_gamma u(., t)(x) - (B_k)_t u(x, .)(t)|`` with plain centered stencils."""
    gamma = as_multi_index(gamma)
    x = np.asarray(x, dtype=float)
    t = float(t)
    if not t > h:
        raise ValueError("need t > h so the time stencil stays positive")
    spatial = apply_delta_gamma(u.field_at(t), gamma, x, h)
    temporal = bessel_operator_fd(u.profile(x), k, t, h)
    return abs(spatial - temporal)


def second_kind_solution(problem: EpdProblem, x, t: float, options: SolverOptions | None = None) -> float:
    """``t^(1-k) u^(2-k)(x, t)``: a solution of the same equation that is singular at ``t = 0``."""
    t = float(t)
    if not t > 0:
        raise ValueError("t must be positive")
    partner = solve_epd(EpdProblem(problem.f, problem.gamma, 2.0 - problem.k), options)
    return t ** (1.0 - problem.k) * partner.evaluate(x, t)


def shifted_parameter_solution(problem: EpdProblem, options: SolverOptions | None = None) -> EpdSolution:
    """Solution with parameter ``k + 2`` and data ``Delta_gamma f / (k + 1)``; equals ``u^k_t / t``."""
    k = problem.k
    if k == -1.0:
        raise ValueError("k = -1 has no shifted partner")
    opts = options or SolverOptions()
    lap = delta_gamma_field(problem.f, problem.gamma, opts.delta_h, opts.richardson_levels)
    data = ScalarField(lambda p: lap(p) / (k + 1.0), problem.n, name="delta-data")
    return solve_epd(EpdProblem(data, problem.gamma, k + 2.0), opts)
