"""Weighted spherical means on the positive orthant built from Bessel
translation, and the Euler-Poisson-Darboux Cauchy problems they solve."""

from .epd import (
    EpdProblem,
    EpdSolution,
    SolverOptions,
    classify,
    epd_residual,
    solve_epd,
)
from .fields import builtin_field
from .means import (
    iterated_mean_double,
    iterated_mean_reduced,
    mean_profile,
    multidim_shift,
    spherical_mean,
)
from .shift1d import MultiIndex, ScalarField, shift_angular, shift_power, shift_radial
from .sphere_geometry import ball_integral, sphere_grid, weighted_ball_volume, weighted_sphere_area
from .ultrahyperbolic import SplitGeometry, asgeirsson_check, separable_solution

__version__ = "0.1.0"

__all__ = [
    "EpdProblem",
    "EpdSolution",
    "MultiIndex",
    "ScalarField",
    "SolverOptions",
    "SplitGeometry",
    "asgeirsson_check",
    "ball_integral",
    "builtin_field",
    "classify",
    "epd_residual",
    "iterated_mean_double",
    "iterated_mean_reduced",
    "mean_profile",
    "multidim_shift",
    "separable_solution",
    "shift_angular",
    "shift_power",
    "shift_radial",
    "solve_epd",
    "spherical_mean",
    "sphere_grid",
    "weighted_ball_volume",
    "weighted_sphere_area",
]
