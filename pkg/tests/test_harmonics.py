import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wulffkit.harmonics import HarmonicTerm, harmonic_jet, harmonic_series_jet, radial_power_jet
from wulffkit.sphere import make_grid

SPHERE_MODES = [(l, m) for l in range(5) for m in range(-l, l + 1)]
CIRCLE_MODES = [(0, 0)] + [(l, s) for l in range(1, 5) for s in (1, -1)]


@pytest.mark.parametrize("n, modes", [(2, SPHERE_MODES), (1, CIRCLE_MODES)])
def test_orthonormal_under_quadrature(n, modes):
    grid = make_grid(n, 64)
    values = np.stack([harmonic_jet(n, l, m).evaluate(grid.nodes)[0] for l, m in modes])
    gram = (values * grid.weights) @ values.T
    np.testing.assert_allclose(gram, np.eye(len(modes)), atol=1e-12)


@pytest.mark.parametrize("degree, order", [(2, 0), (3, 1), (4, -3), (1, -1)])
def test_solid_harmonic_is_harmonic_and_homogeneous(degree, order, rng):
    jet = harmonic_jet(2, degree, order)
    x = rng.normal(size=(50, 3))
    val, grad, hess = jet.evaluate(x)
    np.testing.assert_allclose(np.trace(hess, axis1=1, axis2=2), 0.0, atol=1e-12)
    # Euler: <x, grad P> = degree * P
    np.testing.assert_allclose(np.einsum("ma,ma->m", x, grad), degree * val, atol=1e-12)


def test_known_low_modes(rng):
    u = rng.normal(size=(20, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    y00 = harmonic_jet(2, 0, 0).evaluate(u)[0]
    np.testing.assert_allclose(y00, 0.5 / np.sqrt(np.pi))
    y20 = harmonic_jet(2, 2, 0).evaluate(u)[0]
    np.testing.assert_allclose(y20, np.sqrt(5 / (16 * np.pi)) * (3 * u[:, 2] ** 2 - 1), atol=1e-14)
    phi = np.linspace(0, 2 * np.pi, 13)
    circle = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    np.testing.assert_allclose(harmonic_jet(1, 3, -1).evaluate(circle)[0], np.sin(3 * phi) / np.sqrt(np.pi), atol=1e-14)


def test_invalid_modes():
    with pytest.raises(ValueError):
        harmonic_jet(2, 2, 3)
    with pytest.raises(ValueError):
        harmonic_jet(1, 0, -1)
    with pytest.raises(ValueError):
        harmonic_jet(3, 1, 0)


@given(power=st.floats(-2.0, 2.0), seed=st.integers(0, 2**32 - 1))
def test_radial_power_jet_matches_finite_differences(power, seed):
    rng = np.random.default_rng(seed)
    jet = harmonic_jet(2, 3, 2)
    x = rng.normal(size=3)
    x *= 1.5 / np.linalg.norm(x)

    def f(y):
        return radial_power_jet(*jet.evaluate(y[None]), y[None], power)[0][0]

    _, grad, hess = radial_power_jet(*jet.evaluate(x[None]), x[None], power)
    h = 1e-5
    fd = np.array([(f(x + h * e) - f(x - h * e)) / (2 * h) for e in np.eye(3)])
    np.testing.assert_allclose(grad[0], fd, rtol=1e-6, atol=1e-8)
    fdh = np.empty((3, 3))
    for i, j in itertools.product(range(3), repeat=2):
        ei, ej = np.eye(3)[i] * h, np.eye(3)[j] * h
        fdh[i, j] = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h * h)
    np.testing.assert_allclose(hess[0], fdh, rtol=1e-4, atol=1e-5)


def test_series_is_zero_homogeneous(rng):
    terms = [HarmonicTerm(2, 0, 0.3), HarmonicTerm(3, -2, -0.1)]
    x = rng.normal(size=(10, 3))
    v1 = harmonic_series_jet(2, terms, x)[0]
    v2 = harmonic_series_jet(2, terms, 3.7 * x)[0]
    np.testing.assert_allclose(v1, v2, rtol=1e-13)
    grad = harmonic_series_jet(2, terms, x)[1]
    np.testing.assert_allclose(np.einsum("ma,ma->m", grad, x), 0.0, atol=1e-13)


def test_term_round_trip():
    term = HarmonicTerm(3, -1, 0.25)
    assert HarmonicTerm.from_dict(term.to_dict()) == term
