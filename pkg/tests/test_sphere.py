import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wulffkit.sphere import SPHERE_AREA, make_grid, parameter_samples, seed_directions, tangent_frames


def test_circle_grid_shape_and_area():
    grid = make_grid(1, 256)
    assert len(grid) == 256
    assert grid.weights.sum() == pytest.approx(2 * np.pi, rel=1e-14)


def test_sphere_grid_shape_and_area():
    grid = make_grid(2, 64)
    assert len(grid) == 64 * 128
    assert abs(grid.weights.sum() - 4 * np.pi) <= 1e-12 * 4 * np.pi


@pytest.mark.parametrize("n, res", [(1, 8), (1, 100), (2, 8), (2, 33)])
def test_nodes_unit_and_weights_positive(n, res):
    grid = make_grid(n, res)
    np.testing.assert_allclose(np.linalg.norm(grid.nodes, axis=1), 1.0, atol=1e-12)
    assert np.all(grid.weights > 0)
    assert grid.integrate(np.ones(len(grid))) == pytest.approx(SPHERE_AREA[n], rel=1e-10)


def test_polynomial_moments_exact():
    grid = make_grid(2, 16)
    x, y, z = grid.nodes.T
    # int z^2 = 4 pi / 3, int x^2 y^2 = 4 pi / 15
    assert grid.integrate(z**2) == pytest.approx(4 * np.pi / 3, rel=1e-13)
    assert grid.integrate(x**2 * y**2) == pytest.approx(4 * np.pi / 15, rel=1e-13)
    circle = make_grid(1, 16)
    assert circle.integrate(circle.nodes[:, 0] ** 4) == pytest.approx(3 * np.pi / 4, rel=1e-13)


def test_invalid_grids():
    with pytest.raises(ValueError):
        make_grid(2, 7)
    with pytest.raises(ValueError):
        make_grid(3, 16)


@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_tangent_frames_right_handed_orthonormal(v):
    nu = np.asarray(v) / np.linalg.norm(v)
    t = tangent_frames(nu[None])[0]
    basis = np.column_stack([t, nu])
    np.testing.assert_allclose(basis.T @ basis, np.eye(3), atol=1e-12)
    assert np.linalg.det(basis) == pytest.approx(1.0, abs=1e-12)


def test_parameter_samples_and_seeds_are_unit():
    for n in (1, 2):
        for pts in (parameter_samples(n, 20), seed_directions(n, 500)):
            np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-14)
    assert parameter_samples(2, 20).shape == (20 * 40, 3)
