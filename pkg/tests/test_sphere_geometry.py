import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bessel_means.sphere_geometry import (
    ball_integral,
    simplex_monomial_integral,
    sphere_grid,
    weighted_ball_volume,
    weighted_sphere_area,
)


def test_area_examples():
    assert weighted_sphere_area(1, [2.3]) == pytest.approx(1.0, rel=1e-15)
    assert weighted_sphere_area(2, [1, 1]) == pytest.approx(0.5, rel=1e-15)
    assert weighted_sphere_area(3, [1, 1, 1]) == pytest.approx(0.125, rel=1e-15)


def test_area_planar_quarter_circle():
    # n=2, gamma=(1,1): int_0^{pi/2} cos psi sin psi dpsi
    ref = float(mpmath.quad(lambda p: mpmath.cos(p) * mpmath.sin(p), [0, mpmath.pi / 2]))
    assert weighted_sphere_area(2, [1, 1]) == pytest.approx(ref, rel=1e-14)


def test_volume_examples():
    assert weighted_ball_volume(2, [1, 1]) == pytest.approx(0.125, rel=1e-15)
    assert weighted_ball_volume(2, [2, 2]) == pytest.approx(math.pi / 96, rel=1e-14)


@pytest.mark.parametrize("gamma", [[0.4], [1, 2.5], [0.3, 0.7, 1.9]])
def test_volume_is_area_over_q(gamma):
    n = len(gamma)
    assert weighted_ball_volume(n, gamma) == pytest.approx(weighted_sphere_area(n, gamma) / (n + sum(gamma)), rel=1e-14)


def test_simplex_examples():
    assert simplex_monomial_integral([1, 0, 0]) == pytest.approx(1 / 24, rel=1e-15)
    with pytest.raises(ValueError):
        simplex_monomial_integral([-1.0, 0.0])


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        weighted_sphere_area(3, [1, 1])


@pytest.mark.parametrize("gamma", [[1, 1], [0.3, 2.7], [1, 1, 1], [0.5, 1.25, 3.1]])
def test_grid_area_matches_closed_form(gamma):
    n = len(gamma)
    grid = sphere_grid(n, gamma)
    assert grid.area == pytest.approx(weighted_sphere_area(n, gamma), rel=1e-12)


def test_grid_nodes_on_unit_sphere_in_orthant():
    grid = sphere_grid(3, [0.4, 1.0, 2.0], order=8)
    assert grid.node_count == 64
    np.testing.assert_allclose(np.sum(grid.nodes**2, axis=1), 1.0, atol=1e-14)
    assert np.all(grid.nodes >= 0) and np.all(grid.weights > 0)


def test_one_dimensional_grid():
    grid = sphere_grid(1, [1.7])
    assert grid.node_count == 1 and grid.nodes[0, 0] == 1.0 and grid.area == 1.0


def test_grid_first_coordinate_squared():
    grid = sphere_grid(2, [1, 1])
    assert grid.integrate_field(lambda p: p[..., 0] ** 2) == pytest.approx(0.25, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(
    gamma=st.lists(st.floats(0.1, 4), min_size=2, max_size=3),
    powers=st.lists(st.integers(0, 3), min_size=3, max_size=3),
)
def test_grid_even_moments(gamma, powers):
    # theta^(2a) shifts every weight exponent by 2a, so the moment is an area ratio
    n = len(gamma)
    a = np.array(powers[:n], dtype=float)
    grid = sphere_grid(n, gamma, order=24)
    val = grid.integrate(np.prod(grid.nodes ** (2 * a), axis=1))
    ref = weighted_sphere_area(n, [g + 2 * ai for g, ai in zip(gamma, a)])
    assert val == pytest.approx(ref, rel=1e-11)


def test_grid_against_direct_angle_quadrature():
    g1, g2 = 0.6, 1.8
    f = lambda c, s: mpmath.exp(c * c) * mpmath.cos(3 * s * s)
    ref = mpmath.quad(lambda p: f(mpmath.cos(p), mpmath.sin(p)) * mpmath.cos(p) ** g1 * mpmath.sin(p) ** g2, [0, mpmath.pi / 2])
    grid = sphere_grid(2, [g1, g2])
    val = grid.integrate(np.exp(grid.nodes[:, 0] ** 2) * np.cos(3 * grid.nodes[:, 1] ** 2))
    assert val == pytest.approx(float(ref), rel=1e-12)


def test_grid_order_doubling():
    f = lambda p: np.exp(-np.sum(p * p, axis=-1)) * np.cos(p[..., 0] ** 2)
    for gamma in ([1, 1, 1], [0.3, 2.2, 0.9]):
        a = sphere_grid(3, gamma, 24).integrate_field(f, 1.3)
        b = sphere_grid(3, gamma, 48).integrate_field(f, 1.3)
        assert a == pytest.approx(b, rel=1e-12)


def test_ball_examples():
    one = lambda p: np.ones(p.shape[:-1])
    for r in (0.5, 1.0, 2.0):
        assert ball_integral(one, [1, 1], r) == pytest.approx(r**4 * 0.125, rel=1e-13)
    gamma = [0.7, 1.6]
    q = 2 + sum(gamma)
    sq = lambda p: np.sum(p * p, axis=-1)
    assert ball_integral(sq, gamma, 1.0) == pytest.approx(weighted_sphere_area(2, gamma) / (q + 2), rel=1e-13)
    mono = lambda p: p[..., 0] ** 2 * p[..., 1] ** 2
    assert ball_integral(mono, [1, 1], 1.0) == pytest.approx(1 / 96, rel=1e-13)


def test_ball_radial_weight():
    one = lambda p: np.ones(p.shape[:-1])
    gamma = [1.0, 2.0]
    q = 2 + sum(gamma)
    val = ball_integral(one, gamma, 1.0, g=lambda r: r**2)
    assert val == pytest.approx(weighted_sphere_area(2, gamma) / (q + 2), rel=1e-13)


def test_ball_rejects_bad_radius():
    with pytest.raises(ValueError):
        ball_integral(lambda p: p[..., 0], [1, 1], 0.0)
