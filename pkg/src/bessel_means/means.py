"""Multidimensional shift, weighted spherical means and the iterated mean."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from .numerics import gauss_jacobi_rule
from .shift1d import DEFAULT_SHIFT_ORDER, MultiIndex, ScalarField, as_multi_index, shift_constant_c
from .sphere_geometry import DEFAULT_RADIAL_ORDER, DEFAULT_SPHERE_ORDER, SphereGrid, sphere_grid

# Upper bound on points handed to a field in one call.
CHUNK_POINTS = 2_000_000

ITERATED_DEFAULT_ORDER = 16


def _rows(a, n: int) -> np.ndarray:
    a = np.abs(np.asarray(a, dtype=float))
    if a.ndim == 1:
        a = a[None, :]
    if a.shape[-1] != n:
        raise ValueError(f"points must have {n} coordinates, got shape {a.shape}")
    return a


def _resolve_grid(grid, gamma: MultiIndex, sphere_order: int) -> SphereGrid:
    n = len(gamma)
    if grid is None:
        return sphere_grid(n, gamma, sphere_order)
    if grid.dimension != n or tuple(grid.gamma) != tuple(gamma):
        raise ValueError(
            f"sphere grid built for n={grid.dimension}, gamma={tuple(grid.gamma)} "
            f"does not match gamma={tuple(gamma)}"
        )
    return grid


def multidim_shift_many(f, gamma, X, Y, order: int = DEFAULT_SHIFT_ORDER) -> np.ndarray:
    """``T^{Y_j} f(X_j)`` for paired rows of ``X`` and ``Y``.

    One angular rule per coordinate, tensorized.  A coordinate whose x (or y)
    entries are all zero collapses to a single node since that factor is the
    identity.
    """
    gamma = as_multi_index(gamma)
    n = len(gamma)
    X, Y = np.broadcast_arrays(_rows(X, n), _rows(Y, n))
    m = X.shape[0]

    nodes: list = []
    weights: list = []
    for i, g in enumerate(gamma):
        if not X[:, i].any() or not Y[:, i].any():
            nodes.append(None)
            weights.append(np.ones(1))
        else:
            rule = gauss_jacobi_rule(order, 0.5 * g - 1.0, 0.5 * g - 1.0)
            nodes.append(rule.nodes)
            weights.append(shift_constant_c(g) * rule.weights)
    sizes = [len(w) for w in weights]
    per_row = math.prod(sizes)
    step = max(1, CHUNK_POINTS // per_row)

    out = np.empty(m)
    for start in range(0, m, step):
        xs, ys = X[start : start + step], Y[start : start + step]
        mc = len(xs)
        coords = []
        for i in range(n):
            xi, yi = xs[:, i : i + 1], ys[:, i : i + 1]
            if nodes[i] is None:
                rho = xi + yi
            else:
                rho = np.sqrt(np.maximum(xi * xi + yi * yi - 2.0 * xi * yi * nodes[i], 0.0))
            shape = [mc] + [1] * n
            shape[1 + i] = sizes[i]
            coords.append(rho.reshape(shape))
        pts = np.stack(np.broadcast_arrays(*coords), axis=-1)
        vals = np.asarray(f(pts), dtype=float)
        for i in reversed(range(n)):
            vals = vals @ weights[i]
        out[start : start + mc] = vals
    return out


def multidim_shift(f, gamma, x, y, order: int = DEFAULT_SHIFT_ORDER) -> float:
    """``T^y f(x)``, the product of one-dimensional shifts coordinate by coordinate."""
    gamma = as_multi_index(gamma)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (len(gamma),) or y.shape != (len(gamma),):
        raise ValueError(f"x and y must be points of dimension {len(gamma)}")
    return float(multidim_shift_many(f, gamma, x, y, order)[0])


def spherical_mean_many(
    f,
    gamma,
    X,
    t,
    grid: SphereGrid | None = None,
    order: int = DEFAULT_SHIFT_ORDER,
    sphere_order: int = DEFAULT_SPHERE_ORDER,
) -> np.ndarray:
    """Means ``M_f(X_j; t_j)`` for rows of centers and matching radii."""
    gamma = as_multi_index(gamma)
    n = len(gamma)
    grid = _resolve_grid(grid, gamma, sphere_order)
    X = _rows(X, n)
    t = np.abs(np.asarray(t, dtype=float)).reshape(-1)
    X, t = np.broadcast_arrays(X, t[:, None])
    t = t[:, 0]
    out = np.empty(len(t))

    zero = t == 0.0
    if zero.any():
        out[zero] = np.asarray(f(X[zero]), dtype=float)
    live = ~zero
    if live.any():
        xs, ts = X[live], t[live]
        S = grid.node_count
        centers = np.repeat(xs, S, axis=0)
        offsets = (ts[:, None, None] * grid.nodes[None, :, :]).reshape(-1, n)
        vals = multidim_shift_many(f, gamma, centers, offsets, order).reshape(len(ts), S)
        out[live] = (vals @ grid.weights) / grid.area
    return out


def spherical_mean(
    f,
    gamma,
    x,
    t,
    grid: SphereGrid | None = None,
    order: int = DEFAULT_SHIFT_ORDER,
    sphere_order: int = DEFAULT_SPHERE_ORDER,
):
    """Weighted spherical mean ``M_f(x; t)``; array ``t`` gives a profile."""
    gamma = as_multi_index(gamma)
    x = np.asarray(x, dtype=float)
    if x.shape != (len(gamma),):
        raise ValueError(f"center must be a point of dimension {len(gamma)}")
    t_arr = np.asarray(t, dtype=float)
    vals = spherical_mean_many(f, gamma, x, t_arr.reshape(-1), grid, order, sphere_order)
    return float(vals[0]) if t_arr.ndim == 0 else vals.reshape(t_arr.shape)


def mean_field(
    f,
    gamma,
    t: float,
    grid: SphereGrid | None = None,
    order: int = DEFAULT_SHIFT_ORDER,
    sphere_order: int = DEFAULT_SPHERE_ORDER,
) -> ScalarField:
    """``x -> M_f(x; t)`` as a field, so means can be nested."""
    gamma = as_multi_index(gamma)
    n = len(gamma)
    grid = _resolve_grid(grid, gamma, sphere_order)

    def func(p):
        flat = p.reshape(-1, n)
        return spherical_mean_many(f, gamma, flat, float(t), grid, order).reshape(p.shape[:-1])

    return ScalarField(func, n, name=f"mean[{getattr(f, 'name', 'f')}]")


def iterated_mean_double(
    f,
    gamma,
    x,
    lam: float,
    mu: float,
    grid: SphereGrid | None = None,
    order: int = ITERATED_DEFAULT_ORDER,
    sphere_order: int = ITERATED_DEFAULT_ORDER,
) -> float:
    """``M_lam M_mu f(x)`` by nesting two full mean quadratures.

    The cost is the square of one mean, hence the small default orders.
    """
    gamma = as_multi_index(gamma)
    grid = _resolve_grid(grid, gamma, sphere_order)
    lam, mu = abs(float(lam)), abs(float(mu))
    if mu == 0.0:
        return spherical_mean(f, gamma, x, lam, grid, order)
    if lam == 0.0:
        return spherical_mean(f, gamma, x, mu, grid, order)
    inner = mean_field(f, gamma, mu, grid, order)
    return spherical_mean(inner, gamma, x, lam, grid, order)


def iterated_kernel(r, lam: float, mu: float, q: float):
    """Kernel ``((lam^2-(r-mu)^2)((r+mu)^2-lam^2))^((q-3)/2) r`` of the reduced form."""
    r = np.asarray(r, dtype=float)
    base = (lam * lam - (r - mu) ** 2) * ((r + mu) ** 2 - lam * lam)
    return np.maximum(base, 0.0) ** (0.5 * (q - 3.0)) * r


def iterated_mean_reduced(
    f,
    gamma,
    x,
    lam: float,
    mu: float,
    grid: SphereGrid | None = None,
    order: int = DEFAULT_SHIFT_ORDER,
    sphere_order: int = DEFAULT_SPHERE_ORDER,
    radial_order: int = DEFAULT_RADIAL_ORDER,
) -> float:
    """Iterated mean as one radial integral of the mean profile over ``[|lam-mu|, lam+mu]``.

    Prefactor ``2 Gamma(q/2) / (sqrt(pi) Gamma((q-1)/2) (2 lam mu)^(q-2))``
    with ``q = n + |gamma|``.  The integral runs in ``w = r^2`` where both
    kernel endpoints become Jacobi exponents ``(q-3)/2``.
    """
    gamma = as_multi_index(gamma)
    grid = _resolve_grid(grid, gamma, sphere_order)
    lam, mu = abs(float(lam)), abs(float(mu))
    if lam == 0.0 or mu == 0.0:
        return spherical_mean(f, gamma, x, lam + mu, grid, order)
    q = len(gamma) + gamma.abs
    lo2 = (lam - mu) ** 2
    span = 4.0 * lam * mu  # (lam+mu)^2 - (lam-mu)^2
    rule = gauss_jacobi_rule(radial_order, 0.5 * (q - 3.0), 0.5 * (q - 3.0))
    w = lo2 + 0.5 * span * (1.0 + rule.nodes)
    profile = spherical_mean(f, gamma, x, np.sqrt(w), grid, order)
    integral = 0.5 * (0.5 * span) ** (q - 2.0) * float(profile @ rule.weights)
    log_pref = (
        math.log(2.0)
        + math.lgamma(0.5 * q)
        - 0.5 * math.log(math.pi)
        - math.lgamma(0.5 * (q - 1.0))
        - (q - 2.0) * math.log(2.0 * lam * mu)
    )
    return math.exp(log_pref) * integral


@dataclass(frozen=True, eq=False)
class RadialCurve:
    """Mean profile ``t -> M_f(center; t)`` sampled at Chebyshev-Lobatto radii."""

    radii: np.ndarray
    values: np.ndarray
    center: np.ndarray
    gamma: MultiIndex
    _interp: BarycentricInterpolator = field(init=False, repr=False)

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        if radii.ndim != 1 or len(radii) < 2 or np.any(np.diff(radii) <= 0) or radii[0] < 0:
            raise ValueError("radii must be a strictly increasing list of nonnegative reals")
        if len(self.values) != len(radii):
            raise ValueError("radii and values differ in length")
        object.__setattr__(self, "_interp", BarycentricInterpolator(radii, np.asarray(self.values, float)))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.radii[0] - 1e-14) or np.any(t > self.radii[-1] + 1e-14):
            raise ValueError("radius outside the sampled profile")
        out = self._interp(t)
        return float(out) if t.ndim == 0 else out


def mean_profile(
    f,
    gamma,
    x,
    t_max: float,
    count: int = 33,
    grid: SphereGrid | None = None,
    order: int = DEFAULT_SHIFT_ORDER,
    sphere_order: int = DEFAULT_SPHERE_ORDER,
) -> RadialCurve:
    """Sample the mean on ``[0, t_max]`` for polynomial interpolation."""
    gamma = as_multi_index(gamma)
    if count < 2 or not t_max > 0:
        raise ValueError("need count >= 2 and t_max > 0")
    k = np.arange(count)
    radii = 0.5 * t_max * (1.0 - np.cos(np.pi * k / (count - 1)))
    values = spherical_mean(f, gamma, x, radii, grid, order, sphere_order)
    return RadialCurve(radii, values, np.asarray(x, dtype=float), gamma)
