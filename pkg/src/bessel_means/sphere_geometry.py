"""Weighted measure on the sphere part and ball part of the positive orthant."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .numerics import gauss_jacobi_rule
from .shift1d import MultiIndex, as_multi_index

DEFAULT_SPHERE_ORDER = 48
DEFAULT_RADIAL_ORDER = 64


def _check_dim(n: int, gamma: MultiIndex) -> None:
    if int(n) < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if len(gamma) != int(n):
        raise ValueError(f"gamma has {len(gamma)} components but dimension is {n}")


def weighted_sphere_area(n: int, gamma) -> float:
    r"""``|S_1^+(n)|_gamma = prod Gamma((g_i+1)/2) / (2^(n-1) Gamma((n+|g|)/2))``."""
    gamma = as_multi_index(gamma)
    _check_dim(n, gamma)
    log_val = sum(math.lgamma(0.5 * (g + 1.0)) for g in gamma)
    log_val -= (n - 1) * math.log(2.0) + math.lgamma(0.5 * (n + gamma.abs))
    return math.exp(log_val)


def weighted_ball_volume(n: int, gamma) -> float:
    gamma = as_multi_index(gamma)
    _check_dim(n, gamma)
    log_val = sum(math.lgamma(0.5 * (g + 1.0)) for g in gamma)
    log_val -= n * math.log(2.0) + math.lgamma(0.5 * (n + gamma.abs) + 1.0)
    return math.exp(log_val)


def simplex_monomial_integral(alpha) -> float:
    """Integral of ``prod y_i^alpha_i`` over the standard simplex."""
    alpha = [float(a) for a in np.atleast_1d(alpha)]
    if any(not a > -1 for a in alpha):
        raise ValueError(f"simplex exponents must exceed -1, got {alpha}")
    n = len(alpha)
    return math.exp(sum(math.lgamma(a + 1.0) for a in alpha) - math.lgamma(sum(alpha) + n + 1.0))


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Tensor quadrature on ``S_1^+(n)``; the weights already carry ``theta^gamma dS``.

    Nodes come from ``u = cos 2 psi`` per angle, so convergence is spectral for
    integrands even in every coordinate and only algebraic otherwise.
    """

    dimension: int
    gamma: MultiIndex
    nodes: np.ndarray  # (N, n)
    weights: np.ndarray  # (N,)
    order: int

    @property
    def node_count(self) -> int:
        return len(self.weights)

    @property
    def area(self) -> float:
        return math.fsum(self.weights)

    def integrate(self, values) -> float:
        return float(np.asarray(values, dtype=float) @ self.weights)

    def integrate_field(self, f, radius: float = 1.0) -> float:
        """``int_{S_1^+} f(radius * theta) theta^gamma dS``."""
        return self.integrate(f(radius * self.nodes))


def _angle_factor(order: int, a: float, b: float):
    """Nodes (cos psi, sin psi) and weights for ``int_0^{pi/2} g cos^a psi sin^b psi dpsi``.

    With ``u = cos 2psi`` the weight is ``2^(-(a+b)/2-1) (1-u)^((b-1)/2) (1+u)^((a-1)/2)``.
    """
    rule = gauss_jacobi_rule(order, 0.5 * (b - 1.0), 0.5 * (a - 1.0))
    cos_psi = np.sqrt(0.5 * (1.0 + rule.nodes))
    sin_psi = np.sqrt(0.5 * (1.0 - rule.nodes))
    return cos_psi, sin_psi, 2.0 ** (-0.5 * (a + b) - 1.0) * rule.weights


def sphere_grid(n: int, gamma, order: int = DEFAULT_SPHERE_ORDER) -> SphereGrid:
    """Hyperspherical grid: ``theta_1 = cos psi_1``, ``theta_2 = sin psi_1 cos psi_2``, ...

    Angle ``j`` (0-based) carries ``cos^{g_j} psi_j sin^{b_j} psi_j`` with
    ``b_j = (n-2-j) + sum_{i>j} g_i``.  ``n = 1`` gives the single point 1.
    """
    gamma = as_multi_index(gamma)
    _check_dim(n, gamma)
    if int(order) < 1:
        raise ValueError("sphere order must be >= 1")
    if n == 1:
        return SphereGrid(1, gamma, np.ones((1, 1)), np.ones(1), int(order))

    g = gamma.array
    factors = []
    for j in range(n - 1):
        b = (n - 2 - j) + float(g[j + 1 :].sum())
        factors.append(_angle_factor(order, float(g[j]), b))

    nodes = np.empty((order ** (n - 1), n))
    weights = np.empty(order ** (n - 1))
    for row, idx in enumerate(itertools.product(range(order), repeat=n - 1)):
        s = 1.0
        w = 1.0
        for j, p in enumerate(idx):
            c_j, s_j, w_j = factors[j]
            nodes[row, j] = s * c_j[p]
            s *= s_j[p]
            w *= w_j[p]
        nodes[row, n - 1] = s
        weights[row] = w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SphereGrid(int(n), gamma, nodes, weights, int(order))


def ball_integral(
    f,
    gamma,
    r: float,
    g=None,
    radial_order: int = DEFAULT_RADIAL_ORDER,
    sphere_order: int = DEFAULT_SPHERE_ORDER,
    grid: SphereGrid | None = None,
) -> float:
    """``int_{B_r^+} g(|x|) f(x) x^gamma dx`` as radial times sphere quadrature."""
    gamma = as_multi_index(gamma)
    n = len(gamma)
    r = float(r)
    if not r > 0:
        raise ValueError("ball radius must be positive")
    grid = grid or sphere_grid(n, gamma, sphere_order)
    q = n + gamma.abs
    rule = gauss_jacobi_rule(radial_order, 0.0, q - 1.0)
    lam = 0.5 * r * (1.0 + rule.nodes)
    pts = lam[:, None, None] * grid.nodes[None, :, :]
    inner = np.asarray(f(pts), dtype=float) @ grid.weights
    if g is not None:
        inner = inner * np.asarray(g(lam), dtype=float)
    return (0.5 * r) ** q * float(inner @ rule.weights)
