"""Special functions and quadrature primitives.

Everything downstream (shifts, means, EPD solvers) discretizes its integrals
with the Gauss-Jacobi rules built here, and evaluates Bessel-type kernels with
the normalized Bessel function ``j_nu``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "QuadratureRule",
    "gamma_fn",
    "rgamma",
    "bessel_j_normalized",
    "bessel_i_normalized",
    "gauss_2f1",
    "gauss_jacobi_rule",
    "jacobi_weight_integral",
    "bessel_operator_fd",
    "richardson",
]

# Power series is used below this argument, the Hankel asymptotic expansion above.
BESSEL_SERIES_SWITCH = 12.0
_SERIES_MAX_TERMS = 64
_ASYMPTOTIC_MAX_TERMS = 80


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def gamma_fn(x: float) -> float:
    """Euler gamma function; raises ``ValueError`` at the poles 0, -1, -2, ..."""
    x = float(x)
    if _is_nonpositive_integer(x):
        raise ValueError(f"gamma_fn: pole at nonpositive integer {x!r}")
    return math.gamma(x)


def rgamma(x: float) -> float:
    """Reciprocal gamma, entire: zero at the poles of gamma."""
    x = float(x)
    if _is_nonpositive_integer(x):
        return 0.0
    if x > 170.0:
        return math.exp(-math.lgamma(x))
    try:
        return 1.0 / math.gamma(x)
    except OverflowError:
        # next to a pole: 1/Gamma(x) = x (x+1) ... (x+j-1) / Gamma(x+j)
        acc = 1.0
        while x < 0.5:
            acc *= x
            x += 1.0
        return acc / math.gamma(x)


# --------------------------------------------------------------------------
# Bessel functions
# --------------------------------------------------------------------------


def _check_order(nu: float) -> float:
    nu = float(nu)
    if not nu > -1.0:
        raise ValueError(f"Bessel order must exceed -1, got {nu!r}")
    return nu


def _j_series(nu: float, x: np.ndarray) -> np.ndarray:
    q = -0.25 * x * x
    xmax = float(np.max(x)) if x.size else 0.0
    nterms = min(_SERIES_MAX_TERMS, int(16 + 2.2 * xmax))
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, nterms + 1):
        term = term * q / (k * (k + nu))
        total = total + term
    return total


def _hankel_jv(nu: float, x: np.ndarray) -> np.ndarray:
    """Unnormalized J_nu(x) from the Hankel expansion; accurate for small nu."""
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    qsum = np.zeros_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    prev = np.ones_like(x)
    for k in range(1, _ASYMPTOTIC_MAX_TERMS + 1):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.abs(term)
        # stop once past the polynomial roots and the terms start growing
        if (2 * k - 1) ** 2 > mu:
            active &= mag <= prev
        prev = np.where(active, mag, prev)
        sign = -1.0 if (k // 2) % 2 else 1.0
        contrib = np.where(active, sign * term, 0.0)
        if k % 2 == 0:
            p = p + contrib
        else:
            qsum = qsum + contrib
        if not active.any() or float(np.max(np.where(active, mag, 0.0))) < 1e-18:
            break
    omega = x - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(omega) - qsum * np.sin(omega))


def _j_asymptotic(nu: float, x: np.ndarray) -> np.ndarray:
    # Hankel expansion at a base order in [-1/2, 3/2), then forward recurrence
    # J_{s+1} = (2s/x) J_s - J_{s-1}, stable while x exceeds the order.
    steps = max(0, int(math.floor(nu + 0.5)))
    base = nu - steps
    if steps == 0:
        jv = _hankel_jv(nu, x)
    else:
        prev, cur = _hankel_jv(base, x), _hankel_jv(base + 1.0, x)
        for i in range(1, steps):
            s = base + i
            prev, cur = cur, (2.0 * s / x) * cur - prev
        jv = cur
    log_norm = nu * math.log(2.0) + math.lgamma(nu + 1.0)
    return jv * np.exp(log_norm - nu * np.log(x))


def bessel_j_normalized(nu: float, x):
    """Normalized Bessel function ``j_nu(x) = 2^nu Gamma(nu+1) x^-nu J_nu(x)``.

    Even in ``x`` with ``j_nu(0) = 1``.  Accepts scalars or arrays.
    """
    nu = _check_order(nu)
    arr = np.abs(np.asarray(x, dtype=float))
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)
    # forward recurrence needs the argument to dominate the order
    small = arr <= max(BESSEL_SERIES_SWITCH, 1.5 * nu)
    if small.any():
        out[small] = _j_series(nu, arr[small])
    if (~small).any():
        out[~small] = _j_asymptotic(nu, arr[~small])
    return float(out[0]) if scalar else out


def bessel_i_normalized(nu: float, x):
    """Normalized modified Bessel function ``i_nu(x) = j_nu(ix)``.

    Positive-term power series; intended for moderate arguments (|x| < 40).
    """
    nu = _check_order(nu)
    arr = np.abs(np.asarray(x, dtype=float))
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    q = 0.25 * arr * arr
    nterms = int(25 + 1.5 * (float(arr.max()) if arr.size else 0.0))
    term = np.ones_like(arr)
    total = np.ones_like(arr)
    for k in range(1, nterms + 1):
        term = term * q / (k * (k + nu))
        total = total + term
    return float(total[0]) if scalar else total


# --------------------------------------------------------------------------
# Gauss hypergeometric function on z <= 0
# --------------------------------------------------------------------------


def _hyp_series(a: float, b: float, c: float, z: float, max_terms: int = 200_000) -> float:
    term = 1.0
    total = 1.0
    for n in range(max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
        if term == 0.0:
            break
        if abs(term) < 1e-17 * abs(total) and n > 4:
            break
    return total


def _hyp_terminating(a: float, b: float, c: float, z: float) -> float:
    # a is a nonpositive integer: exact polynomial of degree -a
    term = 1.0
    total = 1.0
    for n in range(int(-a)):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
    return total


def _hyp_unit_interval(a: float, b: float, c: float, w: float) -> float:
    """2F1 for 0 <= w < 1."""
    if _is_nonpositive_integer(a):
        return _hyp_terminating(a, b, c, w)
    if _is_nonpositive_integer(b):
        return _hyp_terminating(b, a, c, w)
    if w <= 0.8:
        return _hyp_series(a, b, c, w)
    s = c - a - b
    if float(s).is_integer():
        # logarithmic connection case; the direct series still converges
        return _hyp_series(a, b, c, w)
    v = 1.0 - w
    first = (
        math.gamma(c) * math.gamma(s) * rgamma(c - a) * rgamma(c - b)
        * _hyp_series(a, b, 1.0 - s, v)
    )
    second = (
        v ** s * math.gamma(c) * math.gamma(-s) * rgamma(a) * rgamma(b)
        * _hyp_series(c - a, c - b, 1.0 + s, v)
    )
    return first + second


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z <= 0.

    Terminating cases are summed exactly; otherwise the Pfaff transformation
    maps z into [0, 1) before summation.
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    if _is_nonpositive_integer(c):
        raise ValueError(f"gauss_2f1: c must not be a nonpositive integer, got {c!r}")
    if z > 0:
        raise ValueError(f"gauss_2f1 is implemented for z <= 0 only, got {z!r}")
    if z == 0.0:
        return 1.0
    if _is_nonpositive_integer(a):
        return _hyp_terminating(a, b, c, z)
    if _is_nonpositive_integer(b):
        return _hyp_terminating(b, a, c, z)
    w = z / (z - 1.0)
    return (1.0 - z) ** (-a) * _hyp_unit_interval(a, c - b, c, w)


# --------------------------------------------------------------------------
# Gauss-Jacobi quadrature
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss-Jacobi rule for the weight (1-u)^alpha (1+u)^beta on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]
    jacobi_exponents: tuple[float, float]
    order: int

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))

    def __len__(self) -> int:
        return self.order


def jacobi_weight_integral(alpha: float, beta: float) -> float:
    """Closed form of the integral of (1-u)^alpha (1+u)^beta over [-1, 1]."""
    return math.exp(
        (alpha + beta + 1.0) * math.log(2.0)
        + math.lgamma(alpha + 1.0)
        + math.lgamma(beta + 1.0)
        - math.lgamma(alpha + beta + 2.0)
    )


@lru_cache(maxsize=512)
def _golub_welsch(order: int, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    ab = alpha + beta
    n = np.arange(1, order, dtype=float)
    diag = np.empty(order)
    diag[0] = (beta - alpha) / (ab + 2.0)
    if order > 1:
        s = 2.0 * n + ab
        diag[1:] = (beta * beta - alpha * alpha) / (s * (s + 2.0))
        off = np.empty(order - 1)
        off[0] = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) ** 2 * (3.0 + ab))
        if order > 2:
            m = n[1:]
            sm = 2.0 * m + ab
            off[1:] = (
                4.0 * m * (m + alpha) * (m + beta) * (m + ab)
                / (sm * sm * (sm + 1.0) * (sm - 1.0))
            )
        off = np.sqrt(off)
        nodes, vecs = eigh_tridiagonal(diag, off)
        # squared eigenvector heads drift by ~1e-14 for strongly singular
        # weights; pin the zeroth moment exactly
        weights = vecs[0, :] ** 2
        weights *= jacobi_weight_integral(alpha, beta) / math.fsum(weights)
    else:
        nodes = diag.copy()
        weights = np.array([jacobi_weight_integral(alpha, beta)])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_jacobi_rule(order: int, alpha: float = 0.0, beta: float = 0.0) -> QuadratureRule:
    """Gauss-Jacobi rule via Golub-Welsch; exact to degree ``2*order - 1``.

    ``alpha`` is the exponent at u = +1, ``beta`` at u = -1.
    """
    order = int(order)
    if order < 1:
        raise ValueError(f"quadrature order must be >= 1, got {order}")
    alpha, beta = float(alpha), float(beta)
    if not (alpha > -1.0 and beta > -1.0):
        raise ValueError(f"Jacobi exponents must exceed -1, got ({alpha}, {beta})")
    nodes, weights = _golub_welsch(order, alpha, beta)
    return QuadratureRule(nodes, weights, (-1.0, 1.0), (alpha, beta), order)


# --------------------------------------------------------------------------
# Finite differences
# --------------------------------------------------------------------------


def bessel_operator_fd(u, gamma: float, t: float, h: float) -> float:
    """Central-difference approximation of ``(u'' + gamma/t u')(t)``.

    ``u`` is a vectorized callable of one variable, assumed even.  At ``t = 0``
    the axis limit ``(1 + gamma) u''(0)`` is returned.
    """
    t, h = float(t), float(h)
    if h <= 0:
        raise ValueError("step h must be positive")
    if t == 0.0:
        v = np.asarray(u(np.array([0.0, h])), dtype=float)
        return (1.0 + gamma) * 2.0 * (v[1] - v[0]) / (h * h)
    v = np.asarray(u(np.abs(np.array([t - h, t, t + h]))), dtype=float)
    second = (v[2] - 2.0 * v[1] + v[0]) / (h * h)
    first = (v[2] - v[0]) / (2.0 * h)
    return second + gamma / t * first


def richardson(approx, h: float, levels: int = 3, ratio: float = 2.0):
    """Richardson extrapolation of ``approx(h)`` with an even error expansion.

    ``approx`` is evaluated at ``h, h/ratio, ...`` and may return arrays;
    ``levels=1`` returns the plain value.
    """
    table = [np.asarray(approx(h / ratio**i), dtype=float) for i in range(levels)]
    for j in range(1, levels):
        factor = ratio ** (2 * j)
        table = [
            (factor * table[i + 1] - table[i]) / (factor - 1.0)
            for i in range(len(table) - 1)
        ]
    out = table[0]
    return float(out) if out.ndim == 0 else out
