"""One-dimensional generalized translation generated by the Bessel operator.

For ``gamma > 0`` the shift ``T^y_x f(x)`` is the solution of
``(B_gamma)_x u = (B_gamma)_y u`` with ``u|_{y=0} = f``, ``u_y|_{y=0} = 0``.
Functions act on even fields, so arguments are reflected with ``abs``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .numerics import gauss_2f1, gauss_jacobi_rule

DEFAULT_SHIFT_ORDER = 64


@dataclass(frozen=True)
class MultiIndex:
    """Vector of positive Bessel parameters ``(gamma_1, ..., gamma_n)``."""

    components: tuple[float, ...]

    def __init__(self, components: Sequence[float] | float):
        if np.isscalar(components):
            components = (components,)
        comps = tuple(float(c) for c in components)
        if not comps:
            raise ValueError("MultiIndex needs at least one component")
        if any(not c > 0 for c in comps):
            raise ValueError(f"MultiIndex components must be positive, got {comps}")
        object.__setattr__(self, "components", comps)

    @property
    def abs(self) -> float:
        return math.fsum(self.components)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]


def as_multi_index(gamma) -> MultiIndex:
    return gamma if isinstance(gamma, MultiIndex) else MultiIndex(gamma)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Even function on the closed positive orthant of R^n.

    ``func`` receives an array of shape ``(..., n)`` with nonnegative entries
    and returns shape ``(...)``.  Calls reflect coordinates with ``abs`` so
    consumers may evaluate at ``x - y`` freely.
    """

    func: Callable[[np.ndarray], np.ndarray]
    dimension: int
    support_radius: float = math.inf
    name: str = "field"
    meta: dict = field(default_factory=dict)

    def __call__(self, points) -> np.ndarray:
        pts = np.abs(np.asarray(points, dtype=float))
        if pts.shape[-1] != self.dimension:
            raise ValueError(
                f"{self.name}: expected points with last axis {self.dimension}, got {pts.shape}"
            )
        return np.asarray(self.func(pts), dtype=float)

    def radial(self) -> Callable[[np.ndarray], np.ndarray]:
        """One-variable view of a field with ``dimension == 1``."""
        if self.dimension != 1:
            raise ValueError(f"{self.name} has dimension {self.dimension}, not 1")
        return lambda t: self(np.asarray(t, dtype=float)[..., None])


def as_profile(f) -> Callable[[np.ndarray], np.ndarray]:
    """Turn a 1-D ScalarField or a plain vectorized callable into ``t -> f(|t|)``."""
    if isinstance(f, ScalarField):
        return f.radial()
    return lambda t: np.asarray(f(np.abs(np.asarray(t, dtype=float))), dtype=float)


def shift_constant_c(gamma: float) -> float:
    """Normalizer ``C(gamma) = Gamma((gamma+1)/2) / (sqrt(pi) Gamma(gamma/2))``."""
    gamma = float(gamma)
    if not gamma > 0:
        raise ValueError(f"shift constant needs gamma > 0, got {gamma!r}")
    return math.exp(
        math.lgamma(0.5 * (gamma + 1.0)) - math.lgamma(0.5 * gamma) - 0.5 * math.log(math.pi)
    )


def shift_angular(f, gamma: float, x, y, order: int = DEFAULT_SHIFT_ORDER):
    """Generalized shift in the angular form.

    ``C(gamma) * int_0^pi f(sqrt(x^2 + y^2 - 2xy cos phi)) sin^(gamma-1) phi dphi``
    with ``u = cos phi`` handled by a symmetric Jacobi rule.  ``x`` and ``y``
    broadcast; ``y = 0`` (or ``x = 0``) returns ``f(x)`` (``f(y)``) exactly.
    """
    gamma = float(gamma)
    if not gamma > 0:
        raise ValueError("shift_angular needs gamma > 0; use shift_degenerate for gamma = 0")
    prof = as_profile(f)
    x = np.abs(np.asarray(x, dtype=float))
    y = np.abs(np.asarray(y, dtype=float))
    xb, yb = np.broadcast_arrays(x, y)
    rule = gauss_jacobi_rule(order, 0.5 * gamma - 1.0, 0.5 * gamma - 1.0)
    xs, ys = xb[..., None], yb[..., None]
    rho2 = xs * xs + ys * ys - 2.0 * xs * ys * rule.nodes
    rho = np.sqrt(np.maximum(rho2, 0.0))
    out = shift_constant_c(gamma) * (prof(rho) @ rule.weights)
    out = np.where(yb == 0.0, prof(xb), out)
    out = np.where(xb == 0.0, prof(yb), out)
    return float(out) if out.ndim == 0 else out


def shift_radial(f, gamma: float, x: float, y: float, order: int = DEFAULT_SHIFT_ORDER) -> float:
    """Generalized shift in the radial form.

    ``2^gamma C(gamma) / (4xy)^(gamma-1) * int_{|x-y|}^{x+y} z f(z)
    [(z^2-(x-y)^2)((x+y)^2-z^2)]^(gamma/2-1) dz``, integrated in ``w = z^2``
    so both endpoint factors become the Jacobi weight.
    """
    gamma, x, y = float(gamma), float(x), float(y)
    if not gamma > 0:
        raise ValueError("shift_radial needs gamma > 0")
    if not (x > 0 and y > 0):
        raise ValueError("shift_radial needs x > 0 and y > 0; use shift_angular on the axes")
    prof = as_profile(f)
    a2 = (x - y) ** 2
    span = 4.0 * x * y  # (x+y)^2 - (x-y)^2
    rule = gauss_jacobi_rule(order, 0.5 * gamma - 1.0, 0.5 * gamma - 1.0)
    w = a2 + 0.5 * span * (1.0 + rule.nodes)
    integral = 0.5 * (0.5 * span) ** (gamma - 1.0) * float(prof(np.sqrt(w)) @ rule.weights)
    prefactor = 2.0**gamma * shift_constant_c(gamma) / span ** (gamma - 1.0)
    return prefactor * integral


def shift_degenerate(f, x, y):
    """The gamma = 0 shift of an even function: ``(f(x+y) + f(|x-y|)) / 2``."""
    prof = as_profile(f)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = 0.5 * (prof(x + y) + prof(np.abs(x - y)))
    return float(out) if np.ndim(out) == 0 else out


def shift_power(alpha: float, gamma: float, x: float, y: float) -> float:
    """Closed-form shift of ``t^alpha`` through 2F1.

    ``T^y x^alpha = |x-y|^alpha 2F1(-alpha/2, gamma/2; gamma; -4xy/(x-y)^2)``.
    Raises on the diagonal ``x == y``; use ``shift_angular`` there.
    """
    alpha, gamma, x, y = float(alpha), float(gamma), float(x), float(y)
    if not gamma > 0:
        raise ValueError("shift_power needs gamma > 0")
    if not x > 0 or y < 0:
        raise ValueError("shift_power needs x > 0 and y >= 0")
    if x == y:
        raise ValueError("shift_power is singular at x == y")
    if y == 0.0:
        return x**alpha
    z = -4.0 * x * y / (x - y) ** 2
    return abs(x - y) ** alpha * gauss_2f1(-0.5 * alpha, 0.5 * gamma, gamma, z)


def weighted_halfline_inner(f, g, gamma: float, R: float, order: int = DEFAULT_SHIFT_ORDER) -> float:
    """``int_0^R f(y) g(y) y^gamma dy`` with the power weight in the Jacobi rule."""
    gamma, R = float(gamma), float(R)
    if not gamma > -1:
        raise ValueError("weight exponent must exceed -1")
    if not R > 0:
        raise ValueError("truncation radius must be positive")
    pf, pg = as_profile(f), as_profile(g)
    rule = gauss_jacobi_rule(order, 0.0, gamma)
    y = 0.5 * R * (1.0 + rule.nodes)
    return (0.5 * R) ** (gamma + 1.0) * float((pf(y) * pg(y)) @ rule.weights)
