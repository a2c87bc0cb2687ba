"""Built-in even test fields and the name registry used by the CLI.

Registry names: ``one``, ``radius-squared``, ``gauss``, ``bessel-product:xi1,xi2,...``,
``b-harmonic`` and ``b-biharmonic``.
"""

from __future__ import annotations

import numpy as np

from .numerics import bessel_i_normalized, bessel_j_normalized
from .shift1d import ScalarField, as_multi_index


def constant_field(n: int, value: float = 1.0) -> ScalarField:
    value = float(value)
    return ScalarField(lambda p: np.full(p.shape[:-1], value), n, name="one" if value == 1.0 else "constant")


def radius_squared(n: int) -> ScalarField:
    return ScalarField(lambda p: np.sum(p * p, axis=-1), n, name="radius-squared")


def gauss_field(n: int) -> ScalarField:
    """``exp(-|x|^2)``."""
    return ScalarField(lambda p: np.exp(-np.sum(p * p, axis=-1)), n, name="gauss")


def bessel_product(gamma, xi) -> ScalarField:
    """``j_gamma(x, xi) = prod_i j_{(g_i-1)/2}(x_i xi_i)``; ``Delta_gamma`` eigenvalue ``-|xi|^2``."""
    gamma = as_multi_index(gamma)
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.size != len(gamma):
        raise ValueError(f"xi has {xi.size} entries, gamma has {len(gamma)}")
    if np.any(xi < 0):
        raise ValueError("frequencies must be nonnegative")
    orders = [0.5 * (g - 1.0) for g in gamma]

    def func(p):
        out = np.ones(p.shape[:-1])
        for i, nu in enumerate(orders):
            if xi[i] != 0.0:
                out = out * bessel_j_normalized(nu, p[..., i] * xi[i])
        return out

    label = ",".join(f"{v:g}" for v in xi)
    return ScalarField(func, len(gamma), name=f"bessel-product:{label}", meta={"xi": tuple(xi)})


def b_harmonic_product(gamma) -> ScalarField:
    """``j_{nu_1}(x_1) i_{nu_2}(x_2)``: annihilated by ``Delta_gamma`` (needs ``n >= 2``)."""
    gamma = as_multi_index(gamma)
    if len(gamma) < 2:
        raise ValueError("a non-constant B-harmonic product needs at least two coordinates")
    nu1, nu2 = 0.5 * (gamma[0] - 1.0), 0.5 * (gamma[1] - 1.0)

    def func(p):
        return bessel_j_normalized(nu1, p[..., 0]) * bessel_i_normalized(nu2, p[..., 1])

    return ScalarField(func, len(gamma), name="b-harmonic")


def b_biharmonic_product(gamma) -> ScalarField:
    """``j_{nu_1}(x_1) x_2^2 i_{nu_2+1}(x_2) / (2(nu_2+1))``.

    Its ``Delta_gamma`` is twice ``b_harmonic_product`` so ``Delta_gamma^2`` vanishes.
    """
    gamma = as_multi_index(gamma)
    if len(gamma) < 2:
        raise ValueError("the biharmonic product needs at least two coordinates")
    nu1, nu2 = 0.5 * (gamma[0] - 1.0), 0.5 * (gamma[1] - 1.0)

    def func(p):
        x2 = p[..., 1]
        return (
            bessel_j_normalized(nu1, p[..., 0])
            * x2 * x2 * bessel_i_normalized(nu2 + 1.0, x2) / (2.0 * (nu2 + 1.0))
        )

    return ScalarField(func, len(gamma), name="b-biharmonic")


def builtin_field(name: str, gamma) -> ScalarField:
    """Resolve a registry name against a multi-index."""
    gamma = as_multi_index(gamma)
    n = len(gamma)
    key, _, arg = name.partition(":")
    if key == "one":
        return constant_field(n)
    if key == "radius-squared":
        return radius_squared(n)
    if key == "gauss":
        return gauss_field(n)
    if key == "bessel-product":
        if not arg:
            raise ValueError("bessel-product needs frequencies, e.g. bessel-product:1,1")
        return bessel_product(gamma, [float(v) for v in arg.split(",")])
    if key == "b-harmonic":
        return b_harmonic_product(gamma)
    if key == "b-biharmonic":
        return b_biharmonic_product(gamma)
    raise ValueError(f"unknown field {name!r}")


FIELD_NAMES = ("one", "radius-squared", "gauss", "bessel-product:<xi,...>", "b-harmonic", "b-biharmonic")
