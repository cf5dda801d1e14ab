"""Closed hypersurfaces parametrised over S^n and their sampled geometry.

Each surface family is a map ``X: S^n -> R^{n+1}`` given through its
0-homogeneous extension to ``R^{n+1} \\ {0}``.  Around a node ``u`` the chart
``s -> X(u + sum_i s_i t_i)`` (``t_i`` an orthonormal frame of ``u^perp``)
is regular and has no pole singularities, and its derivatives are the
ambient derivatives of the extension along the frame.

Orientation
-----------
``normals`` are inward and ``S v = grad_v N`` for the inward ``N``, so the
unit sphere has ``S = -I`` and ``H = H_gamma = 1``.  ``gamma`` and
``A_gamma`` are evaluated at the outward normal ``-N``; for centrally
symmetric anisotropies this is the same as evaluating at ``N``, and for the
others it is what keeps the Wulff shape (rather than its reflection) at
constant ``H_gamma = 1/R`` and the integral identities intact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import ClassVar, Sequence

import numpy as np

from .anisotropy import Anisotropy, TangentOperator, anisotropy_from_dict
from .harmonics import HarmonicTerm, harmonic_series_jet
from .sphere import SphereGrid, make_grid, parameter_samples, tangent_frames

DEFAULT_RESOLUTION = 128


class DegenerateSurfaceError(ValueError):
    """The immersion is not regular at some node (``det g <= 0``)."""


def _center(center, d: int) -> np.ndarray:
    if center is None:
        return np.zeros(d)
    c = np.asarray(center, dtype=float)
    if c.shape != (d,):
        raise ValueError(f"center must have shape ({d},), got {c.shape}")
    return c


def _sphere_map_jet(u: np.ndarray, t: np.ndarray):
    """Derivatives of ``x -> x/|x|`` at unit ``u`` along frame ``t``."""
    n = t.shape[-1]
    w = u
    dw = t
    ddw = -np.eye(n)[None, None, :, :] * u[:, :, None, None]
    return w, dw, ddw


class SurfaceSpec:
    """Base class for the analytic surface families."""

    kind: ClassVar[str] = ""

    def jet(self, u: np.ndarray, t: np.ndarray, gamma: Anisotropy):
        """Return ``X``, ``dX`` (N, d, n) and ``ddX`` (N, d, n, n) at nodes ``u``."""
        raise NotImplementedError

    def positions(self, u: np.ndarray, gamma: Anisotropy) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def _terms(terms) -> tuple:
    return tuple(t if isinstance(t, HarmonicTerm) else HarmonicTerm.from_dict(t) for t in terms)


def _radial_factor(n: int, base: float, terms: Sequence[HarmonicTerm], u, t):
    """``r(u)`` and its derivatives along the frame for ``r = base + series``."""
    val, grad, hess = harmonic_series_jet(n, terms, u, power=0.0)
    r = base + val
    dr = np.einsum("ma,mai->mi", grad, t)
    ddr = np.einsum("mai,mab,mbj->mij", t, hess, t)
    return r, dr, ddr


@dataclass(frozen=True, eq=False)
class WulffShape(SurfaceSpec):
    """``X(nu) = center + scale * (1 + sum c_k Y_k(nu)) * xi(nu)``.

    ``perturbation`` is empty for the Wulff shape itself.  ``anisotropy``
    fixes whose Wulff shape this is; by default the anisotropy passed to
    :func:`sample_surface`.
    """

    scale: float = 1.0
    center: np.ndarray | None = None
    perturbation: tuple = ()
    anisotropy: Anisotropy | None = None
    kind: ClassVar[str] = "wulff"

    def __post_init__(self):
        if self.scale <= 0.0:
            raise ValueError(f"scale must be > 0, got {self.scale}")
        object.__setattr__(self, "perturbation", _terms(self.perturbation))

    def _gamma(self, gamma: Anisotropy) -> Anisotropy:
        return self.anisotropy if self.anisotropy is not None else gamma

    def positions(self, u, gamma):
        g = self._gamma(gamma)
        c = _center(self.center, u.shape[-1])
        rho = 1.0 + harmonic_series_jet(g.n, self.perturbation, u)[0]
        return c + self.scale * rho[:, None] * g.gradient(u)

    def jet(self, u, t, gamma):
        g = self._gamma(gamma)
        n = t.shape[-1]
        c = _center(self.center, u.shape[-1])
        _, xi, hess = g.jet(u)
        a_t = np.einsum("mab,mbi->mai", hess, t)  # D^2 gamma t_i
        # D^3 gamma [t_i, t_j] by central differences of the analytic Hessian
        third = np.stack([g.third_directional(u, t[:, :, i]) for i in range(n)], axis=-1)
        d3 = np.einsum("mabi,mbj->maij", third, t)
        rho, drho, ddrho = _radial_factor(g.n, 1.0, self.perturbation, u, t)
        s = self.scale
        x = c + s * rho[:, None] * xi
        dx = s * (xi[:, :, None] * drho[:, None, :] + rho[:, None, None] * a_t)
        ddx = s * (
            xi[:, :, None, None] * ddrho[:, None, :, :]
            + a_t[:, :, :, None] * drho[:, None, None, :]
            + a_t[:, :, None, :] * drho[:, None, :, None]
            + rho[:, None, None, None] * d3
        )
        return x, dx, ddx

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "scale": self.scale}
        if self.center is not None:
            out["center"] = np.asarray(self.center, dtype=float).tolist()
        if self.perturbation:
            out["perturbation"] = [term.to_dict() for term in self.perturbation]
        if self.anisotropy is not None:
            out["anisotropy"] = self.anisotropy.to_dict()
        return out


@dataclass(frozen=True, eq=False)
class RoundSphere(SurfaceSpec):
    radius: float = 1.0
    center: np.ndarray | None = None
    kind: ClassVar[str] = "sphere"

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError(f"radius must be > 0, got {self.radius}")

    def positions(self, u, gamma):
        return _center(self.center, u.shape[-1]) + self.radius * u

    def jet(self, u, t, gamma):
        w, dw, ddw = _sphere_map_jet(u, t)
        return self.positions(u, gamma), self.radius * dw, self.radius * ddw

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "radius": self.radius}
        if self.center is not None:
            out["center"] = np.asarray(self.center, dtype=float).tolist()
        return out


@dataclass(frozen=True, eq=False)
class EllipsoidSurface(SurfaceSpec):
    semi_axes: tuple = (2.0, 1.0, 1.0)
    center: np.ndarray | None = None
    kind: ClassVar[str] = "ellipsoid"

    def __post_init__(self):
        axes = tuple(float(a) for a in self.semi_axes)
        if min(axes) <= 0.0:
            raise ValueError(f"semi-axes must be > 0, got {axes}")
        object.__setattr__(self, "semi_axes", axes)

    def _axes(self, d: int) -> np.ndarray:
        if len(self.semi_axes) != d:
            raise ValueError(f"need {d} semi-axes, got {len(self.semi_axes)}")
        return np.asarray(self.semi_axes)

    def positions(self, u, gamma):
        return _center(self.center, u.shape[-1]) + self._axes(u.shape[-1]) * u

    def jet(self, u, t, gamma):
        a = self._axes(u.shape[-1])
        w, dw, ddw = _sphere_map_jet(u, t)
        return self.positions(u, gamma), a[None, :, None] * dw, a[None, :, None, None] * ddw

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "semi_axes": list(self.semi_axes)}
        if self.center is not None:
            out["center"] = np.asarray(self.center, dtype=float).tolist()
        return out


@dataclass(frozen=True, eq=False)
class RadialGraph(SurfaceSpec):
    """``X(u) = center + (base_radius + sum c_k Y_k(u)) u``."""

    base_radius: float = 1.0
    terms: tuple = ()
    center: np.ndarray | None = None
    kind: ClassVar[str] = "radial_graph"

    def __post_init__(self):
        if self.base_radius <= 0.0:
            raise ValueError(f"base_radius must be > 0, got {self.base_radius}")
        object.__setattr__(self, "terms", _terms(self.terms))

    def radius(self, u: np.ndarray, n: int) -> np.ndarray:
        return self.base_radius + harmonic_series_jet(n, self.terms, u)[0]

    def positions(self, u, gamma):
        n = u.shape[-1] - 1
        return _center(self.center, u.shape[-1]) + self.radius(u, n)[:, None] * u

    def jet(self, u, t, gamma):
        n = t.shape[-1]
        r, dr, ddr = _radial_factor(n, self.base_radius, self.terms, u, t)
        if np.any(r <= 0.0):
            k = int(np.argmin(r))
            raise DegenerateSurfaceError(f"radial function non-positive at node {k} (u={u[k].tolist()})")
        w, dw, ddw = _sphere_map_jet(u, t)
        x = _center(self.center, u.shape[-1]) + r[:, None] * w
        dx = w[:, :, None] * dr[:, None, :] + r[:, None, None] * dw
        ddx = (
            w[:, :, None, None] * ddr[:, None, :, :]
            + dw[:, :, :, None] * dr[:, None, None, :]
            + dw[:, :, None, :] * dr[:, None, :, None]
            + r[:, None, None, None] * ddw
        )
        return x, dx, ddx

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "base_radius": self.base_radius,
            "terms": [term.to_dict() for term in self.terms],
        }
        if self.center is not None:
            out["center"] = np.asarray(self.center, dtype=float).tolist()
        return out


SURFACE_KINDS = {cls.kind: cls for cls in (WulffShape, RoundSphere, EllipsoidSurface, RadialGraph)}


def surface_from_dict(data: dict) -> SurfaceSpec:
    data = dict(data)
    kind = data.pop("kind", None)
    if kind not in SURFACE_KINDS:
        raise ValueError(f"unknown surface kind {kind!r}; choose from {sorted(SURFACE_KINDS)}")
    cls = SURFACE_KINDS[kind]
    allowed = {f for f in cls.__dataclass_fields__ if f != "kind"}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown field(s) for surface {kind}: {sorted(unknown)}")
    if "anisotropy" in data and data["anisotropy"] is not None:
        data["anisotropy"] = anisotropy_from_dict(data["anisotropy"])
    if "center" in data and data["center"] is not None:
        data["center"] = np.asarray(data["center"], dtype=float)
    return cls(**data)


@dataclass(frozen=True, eq=False)
class SampledSurface:
    """Per-node geometry of a surface on a quadrature grid.

    Operator arrays are expressed in the orthonormal tangent ``frames``
    (columns), one ``(n, n)`` matrix per node.
    """

    spec: SurfaceSpec
    anisotropy: Anisotropy
    grid: SphereGrid
    positions: np.ndarray
    normals: np.ndarray  # inward unit normals
    area_weights: np.ndarray
    frames: np.ndarray
    shape_operators: np.ndarray
    aniso_shape: np.ndarray
    H: np.ndarray
    H_gamma: np.ndarray
    gamma_N: np.ndarray  # gamma at the outward normal
    s_gamma_frobenius: np.ndarray
    metric_det: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.positions.shape[0]

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def resolution(self) -> int:
        return self.grid.resolution

    @property
    def outer_normals(self) -> np.ndarray:
        return -self.normals

    def shape_operator(self, i: int) -> TangentOperator:
        return TangentOperator(self.outer_normals[i], self.shape_operators[i], self.frames[i])

    def aniso_operator(self, i: int) -> TangentOperator:
        return TangentOperator(self.outer_normals[i], self.aniso_shape[i], self.frames[i])

    def translated(self, v) -> "SampledSurface":
        v = np.asarray(v, dtype=float)
        out = object.__new__(SampledSurface)
        for name in self.__dataclass_fields__:
            object.__setattr__(out, name, getattr(self, name))
        object.__setattr__(out, "positions", self.positions + v)
        return out

    def to_csv(self, path) -> None:
        """One row per node: position, inward normal, H, H_gamma, |S_gamma|, area weight."""
        d = self.positions.shape[1]
        axes = "xyz"[:d]
        header = (
            [f"X_{a}" for a in axes]
            + [f"N_{a}" for a in axes]
            + ["H", "H_gamma", "S_gamma_frobenius", "area_weight"]
        )
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for i in range(len(self)):
                writer.writerow(
                    [repr(float(v)) for v in self.positions[i]]
                    + [repr(float(v)) for v in self.normals[i]]
                    + [repr(float(self.H[i])), repr(float(self.H_gamma[i])),
                       repr(float(self.s_gamma_frobenius[i])), repr(float(self.area_weights[i]))]
                )


def _outer_normal(dx: np.ndarray) -> np.ndarray:
    if dx.shape[-1] == 1:
        e = dx[:, :, 0]
        nrm = np.stack([e[:, 1], -e[:, 0]], axis=-1)
    else:
        nrm = np.cross(dx[:, :, 0], dx[:, :, 1])
    return nrm / np.linalg.norm(nrm, axis=-1, keepdims=True)


def sample_surface(spec: SurfaceSpec, gamma: Anisotropy, grid: SphereGrid | None = None) -> SampledSurface:
    """Sample position, normal, shape operators and curvatures at every node."""
    if grid is None:
        grid = make_grid(gamma.n, DEFAULT_RESOLUTION)
    if grid.n != gamma.n:
        raise ValueError(f"grid is on S^{grid.n} but the anisotropy is on S^{gamma.n}")
    u, t = grid.nodes, grid.frames
    n = grid.n
    x, dx, ddx = spec.jet(u, t, gamma)
    g = np.einsum("mai,maj->mij", dx, dx)
    det = np.linalg.det(g)
    bad = np.flatnonzero(~(det > 0.0))
    if bad.size:
        k = int(bad[0])
        raise DegenerateSurfaceError(
            f"degenerate metric at node {k} (u={u[k].tolist()}, det g={det[k]:.3e})"
        )
    outer = _outer_normal(dx)
    # every family is a positively oriented chart over S^n; a sign change
    # means the chart folds (e.g. the Wulff map of a non-convex gamma)
    folded = np.flatnonzero(~(np.einsum("ma,ma->m", outer, u) > 0.0))
    if folded.size:
        k = int(folded[0])
        raise DegenerateSurfaceError(f"chart folds over at node {k} (u={u[k].tolist()})")
    inner = -outer
    h = np.einsum("maij,ma->mij", ddx, inner)
    chol = np.linalg.cholesky(g)
    linv = np.linalg.inv(chol)
    frames = np.einsum("mai,mji->maj", dx, linv)  # dX L^{-T}
    shape = -np.einsum("mik,mkl,mjl->mij", linv, h, linv)
    shape = 0.5 * (shape + np.swapaxes(shape, 1, 2))
    g_out, _, hess_out = gamma.jet(outer)
    a_mat = np.einsum("mai,mab,mbj->mij", frames, hess_out, frames)
    a_mat = 0.5 * (a_mat + np.swapaxes(a_mat, 1, 2))
    aniso = np.einsum("mik,mkj->mij", a_mat, shape)
    H = -np.trace(shape, axis1=1, axis2=2) / n
    H_gamma = -np.trace(aniso, axis1=1, axis2=2) / n
    frob = np.sqrt(np.einsum("mij,mij->m", aniso, aniso))
    weights = grid.weights * np.sqrt(det)
    arrays = (x, inner, weights, frames, shape, aniso, H, H_gamma, g_out, frob, det)
    for arr in arrays:
        arr.setflags(write=False)
    return SampledSurface(spec, gamma, grid, *arrays)


def surface_energy(s: SampledSurface) -> float:
    """Anisotropic surface energy ``F = int gamma(N)``."""
    return float(np.dot(s.gamma_N, s.area_weights))


def area(s: SampledSurface) -> float:
    return float(np.sum(s.area_weights))


def lp_norm(s: SampledSurface, f, p: float) -> float:
    """``((1/F) int |f|^p gamma(N))^(1/p)``; ``p = inf`` gives ``max |f|``."""
    f = np.asarray(f, dtype=float)
    if f.shape != (len(s),):
        raise ValueError(f"f must have one value per node ({len(s)}), got shape {f.shape}")
    if np.isinf(p):
        return float(np.max(np.abs(f)))
    if p < 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    mu = s.gamma_N * s.area_weights
    return float((np.dot(np.abs(f) ** p, mu) / mu.sum()) ** (1.0 / p))


def center_of_mass(s: SampledSurface) -> np.ndarray:
    """Area-weighted mean position (not weighted by gamma)."""
    return s.area_weights @ s.positions / s.area_weights.sum()


def dense_positions(spec: SurfaceSpec, gamma: Anisotropy, resolution: int) -> np.ndarray:
    """Positions on a grid uniform in the angular parameters."""
    return spec.positions(parameter_samples(gamma.n, resolution), gamma)


def frames_are_orthonormal(s: SampledSurface, tol: float = 1e-10) -> bool:
    gram = np.einsum("mai,maj->mij", s.frames, s.frames)
    ortho = np.abs(gram - np.eye(s.n)).max()
    normal_dot = np.abs(np.einsum("mai,ma->mi", s.frames, s.normals)).max()
    return bool(ortho <= tol and normal_dot <= 1e-8)


__all__ = [
    "DegenerateSurfaceError",
    "EllipsoidSurface",
    "RadialGraph",
    "RoundSphere",
    "SampledSurface",
    "SurfaceSpec",
    "WulffShape",
    "area",
    "center_of_mass",
    "dense_positions",
    "lp_norm",
    "sample_surface",
    "surface_energy",
    "surface_from_dict",
    "tangent_frames",
]
