"""Quadrature grids and tangent frames on S^1 and S^2."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

SPHERE_AREA = {1: 2.0 * np.pi, 2: 4.0 * np.pi}


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Quadrature nodes and weights on the unit sphere S^n.

    Attributes
    ----------
    nodes : ndarray, shape (N, n+1)
        Unit vectors.
    weights : ndarray, shape (N,)
        Positive weights summing to the area of S^n.
    n : int
        Sphere dimension.
    resolution : int
        Number of nodes for n=1, number of polar nodes for n=2.
    """

    nodes: np.ndarray
    weights: np.ndarray
    n: int
    resolution: int
    frames: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.nodes.shape[0]

    @property
    def dim(self) -> int:
        return self.n + 1

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


def tangent_frames(nu: np.ndarray) -> np.ndarray:
    """Orthonormal bases of the tangent planes ``nu^perp``.

    Returns an array of shape ``(..., d, n)`` whose columns span ``nu^perp``.
    For ``d = 3`` the frame ``(t1, t2, nu)`` is right-handed.
    """
    nu = np.asarray(nu, dtype=float)
    d = nu.shape[-1]
    if d == 2:
        t = np.stack([-nu[..., 1], nu[..., 0]], axis=-1)
        return t[..., None]
    if d != 3:
        raise ValueError(f"ambient dimension must be 2 or 3, got {d}")
    k = np.argmin(np.abs(nu), axis=-1)
    a = np.zeros_like(nu)
    np.put_along_axis(a, k[..., None], 1.0, axis=-1)
    t1 = a - np.sum(a * nu, axis=-1, keepdims=True) * nu
    t1 /= np.linalg.norm(t1, axis=-1, keepdims=True)
    t2 = np.cross(nu, t1)
    return np.stack([t1, t2], axis=-1)


@lru_cache(maxsize=32)
def make_grid(n: int, resolution: int) -> SphereGrid:
    """Product quadrature on S^n.

    n=1: ``resolution`` equispaced nodes (trapezoidal rule, spectrally
    accurate for smooth periodic integrands).  n=2: Gauss-Legendre in
    ``cos(theta)`` with ``resolution`` nodes times ``2*resolution``
    equispaced longitudes.
    """
    if n not in (1, 2):
        raise ValueError(f"unsupported sphere dimension n={n}")
    if resolution < 8:
        raise ValueError(f"resolution must be >= 8, got {resolution}")
    if n == 1:
        phi = 2.0 * np.pi * np.arange(resolution) / resolution
        nodes = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        weights = np.full(resolution, 2.0 * np.pi / resolution)
    else:
        t, wt = np.polynomial.legendre.leggauss(resolution)
        n_phi = 2 * resolution
        phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
        st = np.sqrt(1.0 - t**2)
        nodes = np.stack(
            [
                np.outer(st, np.cos(phi)),
                np.outer(st, np.sin(phi)),
                np.outer(t, np.ones(n_phi)),
            ],
            axis=-1,
        ).reshape(-1, 3)
        weights = np.outer(wt, np.full(n_phi, 2.0 * np.pi / n_phi)).ravel()
        weights *= SPHERE_AREA[2] / weights.sum()
    nodes /= np.linalg.norm(nodes, axis=-1, keepdims=True)
    for arr in (nodes, weights):
        arr.setflags(write=False)
    frames = tangent_frames(nodes)
    frames.setflags(write=False)
    return SphereGrid(nodes, weights, n, resolution, frames)


def parameter_samples(n: int, resolution: int) -> np.ndarray:
    """Points uniform in the angular parameters (cell midpoints in theta).

    Used for dense resampling, not for quadrature.
    """
    if n == 1:
        phi = 2.0 * np.pi * np.arange(resolution) / resolution
        return np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    if n != 2:
        raise ValueError(f"unsupported sphere dimension n={n}")
    theta = np.pi * (np.arange(resolution) + 0.5) / resolution
    phi = 2.0 * np.pi * np.arange(2 * resolution) / (2 * resolution)
    st = np.sin(theta)
    return np.stack(
        [
            np.outer(st, np.cos(phi)),
            np.outer(st, np.sin(phi)),
            np.outer(np.cos(theta), np.ones(phi.size)),
        ],
        axis=-1,
    ).reshape(-1, 3)


def seed_directions(n: int, count: int) -> np.ndarray:
    """Near-uniform unit vectors: equispaced on S^1, Fibonacci lattice on S^2."""
    if n == 1:
        phi = 2.0 * np.pi * (np.arange(count) + 0.5) / count
        return np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    if n != 2:
        raise ValueError(f"unsupported sphere dimension n={n}")
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    golden = np.pi * (3.0 - np.sqrt(5.0))
    phi = golden * i
    r = np.sqrt(1.0 - z**2)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)
