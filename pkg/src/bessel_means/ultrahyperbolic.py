"""Solutions of ``Delta_{gamma'} u = Delta_{gamma''} u`` on a split orthant and Asgeirsson-type checks.

Points of the joint field are ``(x, y)`` with ``x`` in the first ``m1``
coordinates and ``y`` in the remaining ``m2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .epd import _delta_many
from .fields import bessel_product
from .means import multidim_shift_many, spherical_mean
from .shift1d import MultiIndex, ScalarField, as_multi_index
from .sphere_geometry import sphere_grid

CHECK_SHIFT_ORDER = 24
CHECK_SPHERE_ORDER = 16


@dataclass(frozen=True)
class SplitGeometry:
    m1: int
    m2: int
    gamma1: MultiIndex
    gamma2: MultiIndex

    def __init__(self, m1: int, m2: int, gamma1, gamma2):
        g1, g2 = as_multi_index(gamma1), as_multi_index(gamma2)
        if len(g1) != int(m1) or len(g2) != int(m2):
            raise ValueError(f"block sizes ({m1}, {m2}) do not match gamma lengths ({len(g1)}, {len(g2)})")
        object.__setattr__(self, "m1", int(m1))
        object.__setattr__(self, "m2", int(m2))
        object.__setattr__(self, "gamma1", g1)
        object.__setattr__(self, "gamma2", g2)

    @property
    def q1(self) -> float:
        return self.m1 + self.gamma1.abs

    @property
    def q2(self) -> float:
        return self.m2 + self.gamma2.abs

    @property
    def asgeirsson_admissible(self) -> bool:
        return abs(self.q1 - self.q2) < 1e-12

    @property
    def dimension(self) -> int:
        return self.m1 + self.m2


def separable_solution(geometry: SplitGeometry, xi1, xi2) -> ScalarField:
    """``j_{gamma'}(x, xi') j_{gamma''}(y, xi'')``, an exact solution when ``|xi'| = |xi''|``."""
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    if abs(np.linalg.norm(xi1) - np.linalg.norm(xi2)) > 1e-12:
        raise ValueError(f"|xi'| = {np.linalg.norm(xi1):.15g} differs from |xi''| = {np.linalg.norm(xi2):.15g}")
    a = bessel_product(geometry.gamma1, xi1)
    b = bessel_product(geometry.gamma2, xi2)
    m1 = geometry.m1

    def func(p):
        return a(p[..., :m1]) * b(p[..., m1:])

    return ScalarField(func, geometry.dimension, name="separable", meta={"xi1": tuple(xi1), "xi2": tuple(xi2)})


def _freeze(u, geometry: SplitGeometry, other, block: int) -> ScalarField:
    """Restrict ``u`` to one block with the other block's coordinates held at ``other``."""
    other = np.asarray(other, dtype=float)
    m = geometry.m1 if block == 1 else geometry.m2

    def func(p):
        rest = np.broadcast_to(other, p.shape[:-1] + other.shape)
        joint = np.concatenate([p, rest] if block == 1 else [rest, p], axis=-1)
        return u(joint)

    return ScalarField(func, m)


def block_mean(u, geometry: SplitGeometry, x, y, r: float, block: int,
               shift_order: int = CHECK_SHIFT_ORDER, sphere_order: int = CHECK_SPHERE_ORDER) -> float:
    """Weighted mean in one block at radius ``r``, the other block frozen."""
    if block == 1:
        g = _freeze(u, geometry, y, 1)
        return spherical_mean(g, geometry.gamma1, x, r, None, shift_order, sphere_order)
    g = _freeze(u, geometry, x, 2)
    return spherical_mean(g, geometry.gamma2, y, r, None, shift_order, sphere_order)


def asgeirsson_check(u, geometry: SplitGeometry, x, y, r: float,
                     shift_order: int = CHECK_SHIFT_ORDER, sphere_order: int = CHECK_SPHERE_ORDER):
    """``(x-block mean, y-block mean)`` at radius ``r``; equal for solutions on admissible geometries."""
    left = block_mean(u, geometry, x, y, r, 1, shift_order, sphere_order)
    right = block_mean(u, geometry, x, y, r, 2, shift_order, sphere_order)
    return left, right


def _double_block_mean(u, geometry, x, y, r, s, shift_order, sphere_order) -> float:
    """``M^{gamma'}_r M^{gamma''}_s u (x, y)`` as one joint shift over the product grid."""
    if r == 0.0 and s == 0.0:
        return float(u(np.concatenate([x, y])))
    if s == 0.0:
        return block_mean(u, geometry, x, y, r, 1, shift_order, sphere_order)
    if r == 0.0:
        return block_mean(u, geometry, x, y, s, 2, shift_order, sphere_order)
    g1 = sphere_grid(geometry.m1, geometry.gamma1, sphere_order)
    g2 = sphere_grid(geometry.m2, geometry.gamma2, sphere_order)
    joint = MultiIndex(geometry.gamma1.components + geometry.gamma2.components)
    n1, n2 = g1.node_count, g2.node_count
    offsets = np.concatenate(
        [np.repeat(r * g1.nodes, n2, axis=0), np.tile(s * g2.nodes, (n1, 1))], axis=1
    )
    center = np.concatenate([x, y])
    vals = multidim_shift_many(u, joint, center, offsets, shift_order).reshape(n1, n2)
    return float(g1.weights @ vals @ g2.weights) / (g1.area * g2.area)


def commuting_means_check(u, geometry: SplitGeometry, x, y, r: float, s: float,
                          shift_order: int = 16, sphere_order: int = 16):
    """``(U(r, s), U(s, r))`` where ``U(a, b) = M^{gamma'}_a M^{gamma''}_b u``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = _double_block_mean(u, geometry, x, y, float(r), float(s), shift_order, sphere_order)
    b = _double_block_mean(u, geometry, x, y, float(s), float(r), shift_order, sphere_order)
    return a, b


def boundary_means_check(u, geometry: SplitGeometry, r: float, sphere_order: int = 32):
    """Normalized weighted means of ``u(r theta, 0)`` over ``S^+(m1)`` and ``u(0, r omega)`` over ``S^+(m2)``.

    The y-block weight uses ``gamma''``.  A warning is raised when
    ``m1 + |gamma'| < 3``, outside the range where equality is asserted.
    """
    if geometry.q1 < 3 or geometry.q2 < 3:
        warnings.warn(
            f"boundary means are only claimed equal for m + |gamma| >= 3 (got {geometry.q1:g}, {geometry.q2:g})",
            RuntimeWarning,
            stacklevel=2,
        )
    r = float(r)
    g1 = sphere_grid(geometry.m1, geometry.gamma1, sphere_order)
    g2 = sphere_grid(geometry.m2, geometry.gamma2, sphere_order)
    zeros2 = np.zeros((g1.node_count, geometry.m2))
    zeros1 = np.zeros((g2.node_count, geometry.m1))
    left = g1.integrate(u(np.concatenate([r * g1.nodes, zeros2], axis=1))) / g1.area
    right = g2.integrate(u(np.concatenate([zeros1, r * g2.nodes], axis=1))) / g2.area
    return left, right


def ultrahyperbolic_residual(u, geometry: SplitGeometry, x, y, h: float) -> float:
    """``|Delta_{gamma'} u - Delta_{gamma''} u|`` at ``(x, y)`` with centered stencils of step ``h``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lx = _delta_many(_freeze(u, geometry, y, 1), geometry.gamma1, x, h)
    ly = _delta_many(_freeze(u, geometry, x, 2), geometry.gamma2, y, h)
    return float(abs(lx - ly))


def asgeirsson_lattice_gap(u, geometry: SplitGeometry, xs, ys, rs,
                           shift_order: int = CHECK_SHIFT_ORDER, sphere_order: int = CHECK_SPHERE_ORDER) -> float:
    """Largest ``|left - right|`` of :func:`asgeirsson_check` over a finite lattice."""
    gap = 0.0
    for x in xs:
        for y in ys:
            for r in rs:
                a, b = asgeirsson_check(u, geometry, x, y, r, shift_order, sphere_order)
                gap = max(gap, abs(a - b))
    return gap


def converse_smoke_test(u, geometry: SplitGeometry, xs, ys, rs, h: float = 1e-2,
                        shift_order: int = CHECK_SHIFT_ORDER, sphere_order: int = CHECK_SPHERE_ORDER) -> dict:
    """Mean-identity gap on a lattice together with the PDE residual at ``h`` and ``h/2``.

    A field with a small gap should also have a residual that drops about
    fourfold when ``h`` halves.
    """
    gap = asgeirsson_lattice_gap(u, geometry, xs, ys, rs, shift_order, sphere_order)
    x0, y0 = np.asarray(xs[0], dtype=float), np.asarray(ys[0], dtype=float)
    r1 = ultrahyperbolic_residual(u, geometry, x0, y0, h)
    r2 = ultrahyperbolic_residual(u, geometry, x0, y0, 0.5 * h)
    ratio = r1 / r2 if r2 > 0 else math.inf
    return {"mean_gap": gap, "residual_h": r1, "residual_h2": r2, "ratio": ratio}
