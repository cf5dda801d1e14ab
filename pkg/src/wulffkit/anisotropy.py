"""Anisotropy functions gamma on S^n, their Wulff shapes and dual norms.

Every family is evaluated through its 1-homogeneous extension
``gamma(x) = |x| gamma(x/|x|)`` with analytic gradient and Hessian.  The
operator ``A_gamma(nu) = Hess^{S^n} gamma + gamma I`` is the restriction of
the ambient Hessian to ``nu^perp``, and the Wulff map ``xi(nu)`` is the
ambient gradient at ``nu``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, NamedTuple

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .harmonics import HarmonicTerm, harmonic_series_jet
from .sphere import SphereGrid, make_grid, seed_directions, tangent_frames

FD_STEP = 1e-5


class ConvexityError(ValueError):
    """Raised when A_gamma fails to be positive definite on a sampled grid."""

    def __init__(self, message: str, min_eigenvalue: float, witness: np.ndarray):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
        self.witness = witness


def _as_points(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != d:
        raise ValueError(f"expected vectors in R^{d}, got shape {x.shape}")
    return x


class Anisotropy:
    """Base class for smooth positive anisotropies on S^n.

    Subclasses implement ``_jet(x)`` returning value, gradient and Hessian
    of the 1-homogeneous extension at points ``x`` of shape ``(..., n+1)``.
    """

    family: ClassVar[str] = ""
    n: int

    @property
    def dim(self) -> int:
        return self.n + 1

    def _jet(self, x: np.ndarray):
        raise NotImplementedError

    def value(self, x) -> np.ndarray:
        x = _as_points(x, self.dim)
        if np.any(np.linalg.norm(x, axis=-1) == 0.0):
            raise ValueError("gamma is undefined at the zero vector")
        return self._jet(x)[0]

    def gradient(self, x) -> np.ndarray:
        return self._jet(_as_points(x, self.dim))[1]

    def hessian(self, x) -> np.ndarray:
        return self._jet(_as_points(x, self.dim))[2]

    def jet(self, x):
        return self._jet(_as_points(x, self.dim))

    def third_directional(self, x, v) -> np.ndarray:
        """``D^3 gamma(x)[v]`` as a matrix, by central differences of the Hessian."""
        x = _as_points(x, self.dim)
        v = _as_points(v, self.dim)
        h = FD_STEP * np.maximum(1.0, np.linalg.norm(x, axis=-1))[..., None]
        return (self.hessian(x + h * v) - self.hessian(x - h * v)) / (2.0 * h[..., None])

    def to_dict(self) -> dict:
        raise NotImplementedError

    @property
    def centrally_symmetric(self) -> bool:
        return True


@dataclass(frozen=True)
class Isotropic(Anisotropy):
    n: int = 2
    family: ClassVar[str] = "isotropic"

    def _jet(self, x):
        r = np.linalg.norm(x, axis=-1)
        u = x / r[..., None]
        eye = np.eye(x.shape[-1])
        hess = (eye - u[..., :, None] * u[..., None, :]) / r[..., None, None]
        return r, u, hess

    def to_dict(self) -> dict:
        return {"family": self.family, "n": self.n}


@dataclass(frozen=True, eq=False)
class Ellipsoid(Anisotropy):
    """``gamma(x) = sqrt(x^T Q x)`` for symmetric positive-definite ``Q``."""

    Q: np.ndarray
    n: int = 2
    family: ClassVar[str] = "ellipsoid"

    def __post_init__(self):
        q = np.array(self.Q, dtype=float)
        if q.shape != (self.n + 1, self.n + 1):
            raise ValueError(f"Q must be {(self.n + 1,) * 2}, got {q.shape}")
        if not np.allclose(q, q.T, rtol=0, atol=1e-14 * np.abs(q).max()):
            raise ValueError("Q must be symmetric")
        if np.linalg.eigvalsh(q)[0] <= 0.0:
            raise ValueError("Q must be positive definite")
        q.setflags(write=False)
        object.__setattr__(self, "Q", q)

    def _jet(self, x):
        qx = x @ self.Q
        g = np.sqrt(np.einsum("...i,...i->...", x, qx))
        grad = qx / g[..., None]
        hess = self.Q / g[..., None, None] - grad[..., :, None] * grad[..., None, :] / g[..., None, None]
        return g, grad, hess

    def closed_form_dual(self, x) -> np.ndarray:
        """``sqrt(x^T Q^{-1} x)``; an independent check on :func:`dual_norm`."""
        x = _as_points(x, self.dim)
        return np.sqrt(np.einsum("...i,...i->...", x, np.linalg.solve(self.Q, x[..., None])[..., 0]))

    def to_dict(self) -> dict:
        return {"family": self.family, "n": self.n, "Q": self.Q.tolist()}


@dataclass(frozen=True)
class SmoothedLp(Anisotropy):
    """``gamma(x) = (sum_i (x_i^2 + delta^2 |x|^2 / (n+1))^(m/2))^(1/m)``."""

    exponent: float = 4.0
    regularizer: float = 0.05
    n: int = 2
    family: ClassVar[str] = "smoothed_lp"

    def __post_init__(self):
        if self.exponent < 2.0:
            raise ValueError(f"exponent must be >= 2, got {self.exponent}")
        if self.regularizer <= 0.0:
            raise ValueError(f"regularizer must be > 0, got {self.regularizer}")

    def _jet(self, x):
        d = x.shape[-1]
        m = self.exponent
        c = self.regularizer**2 / d
        eye = np.eye(d)
        r2 = np.einsum("...i,...i->...", x, x)
        u = x**2 + c * r2[..., None]  # (..., d) entries u_i
        du = 2.0 * (x[..., :, None] * eye + c * x[..., None, :])  # du[i, :] = grad u_i
        half = m / 2.0
        upow = u ** (half - 1.0)
        s = np.sum(u**half, axis=-1)
        ds = np.einsum("...i,...ij->...j", half * upow, du)
        d2s = np.einsum("...i,...ij,...ik->...jk", half * (half - 1.0) * u ** (half - 2.0), du, du)
        d2s = d2s + 2.0 * np.einsum("...i,ij,ik->...jk", half * upow, eye, eye)
        d2s = d2s + (2.0 * c * np.sum(half * upow, axis=-1))[..., None, None] * eye
        g = s ** (1.0 / m)
        a1 = (1.0 / m) * s ** (1.0 / m - 1.0)
        a2 = (1.0 / m) * (1.0 / m - 1.0) * s ** (1.0 / m - 2.0)
        grad = a1[..., None] * ds
        hess = a2[..., None, None] * ds[..., :, None] * ds[..., None, :] + a1[..., None, None] * d2s
        return g, grad, hess

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "exponent": self.exponent,
            "regularizer": self.regularizer,
        }


@dataclass(frozen=True)
class HarmonicPerturbation(Anisotropy):
    """``gamma(nu) = base_radius + amplitude * Y_{degree,order}(nu)``."""

    base_radius: float = 1.0
    amplitude: float = 0.0
    degree: int = 2
    order: int = 0
    n: int = 2
    family: ClassVar[str] = "harmonic"

    def __post_init__(self):
        if self.base_radius <= 0.0:
            raise ValueError(f"base_radius must be > 0, got {self.base_radius}")

    def _jet(self, x):
        r = np.linalg.norm(x, axis=-1)
        u = x / r[..., None]
        eye = np.eye(x.shape[-1])
        val = self.base_radius * r
        grad = self.base_radius * u
        hess = self.base_radius * (eye - u[..., :, None] * u[..., None, :]) / r[..., None, None]
        if self.amplitude != 0.0:
            term = HarmonicTerm(self.degree, self.order, self.amplitude)
            v, g, h = harmonic_series_jet(self.n, [term], x, power=1.0)
            val, grad, hess = val + v, grad + g, hess + h
        return val, grad, hess

    @property
    def centrally_symmetric(self) -> bool:
        return self.amplitude == 0.0 or self.degree % 2 == 0

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "base_radius": self.base_radius,
            "amplitude": self.amplitude,
            "degree": self.degree,
            "order": self.order,
        }


FAMILIES = {cls.family: cls for cls in (Isotropic, Ellipsoid, SmoothedLp, HarmonicPerturbation)}

# alias used throughout the docs
AnisotropySpec = Anisotropy


def anisotropy_from_dict(data: dict) -> Anisotropy:
    """Build an anisotropy from its JSON form; unknown fields are errors."""
    data = dict(data)
    family = data.pop("family", None)
    if family not in FAMILIES:
        raise ValueError(f"unknown anisotropy family {family!r}; choose from {sorted(FAMILIES)}")
    cls = FAMILIES[family]
    allowed = {f for f in cls.__dataclass_fields__ if f != "family"}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown field(s) for {family}: {sorted(unknown)}")
    if "n" in data:
        data["n"] = int(data["n"])
        if data["n"] not in (1, 2):
            raise ValueError(f"n must be 1 or 2, got {data['n']}")
    if family == "ellipsoid":
        if "Q" not in data:
            raise ValueError("ellipsoid anisotropy requires field 'Q'")
        data["Q"] = np.asarray(data["Q"], dtype=float)
        data.setdefault("n", data["Q"].shape[0] - 1)
    return cls(**data)


# ---------------------------------------------------------------------------
# pointwise operations


@dataclass(frozen=True, eq=False)
class TangentOperator:
    """A symmetric operator on ``nu^perp`` in the orthonormal ``basis``."""

    base_direction: np.ndarray
    matrix: np.ndarray
    basis: np.ndarray  # (d, n) columns

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def ambient(self) -> np.ndarray:
        return self.basis @ self.matrix @ self.basis.T


def gamma_value(spec: Anisotropy, x) -> np.ndarray | float:
    """1-homogeneous extension of gamma; raises on the zero vector."""
    out = spec.value(x)
    return float(out) if np.ndim(out) == 0 else out


def _unit(nu, d: int) -> np.ndarray:
    nu = _as_points(nu, d)
    if np.any(np.abs(np.linalg.norm(nu, axis=-1) - 1.0) > 1e-10):
        raise ValueError("direction must be a unit vector (|nu| = 1 within 1e-10)")
    return nu


def a_gamma_matrices(spec: Anisotropy, nu: np.ndarray, frames: np.ndarray) -> np.ndarray:
    """``frames^T D^2 gamma(nu) frames``, symmetrised; shape ``(..., n, n)``."""
    hess = spec.hessian(nu)
    m = np.einsum("...ai,...ab,...bj->...ij", frames, hess, frames)
    return 0.5 * (m + np.swapaxes(m, -1, -2))


def a_gamma(spec: Anisotropy, nu) -> TangentOperator:
    nu = _unit(nu, spec.dim)
    basis = tangent_frames(nu)
    return TangentOperator(nu, a_gamma_matrices(spec, nu, basis), basis)


def wulff_point(spec: Anisotropy, nu) -> np.ndarray:
    """``xi(nu) = gamma(nu) nu + grad^{S^n} gamma(nu)``, i.e. the ambient gradient."""
    return spec.gradient(_unit(nu, spec.dim))


class ConvexityCertificate(NamedTuple):
    min_eigenvalue: float
    witness: np.ndarray
    min_gamma: float

    @property
    def convex(self) -> bool:
        return self.min_eigenvalue > 0.0 and self.min_gamma > 0.0


def check_convexity(spec: Anisotropy, grid: SphereGrid | None = None) -> ConvexityCertificate:
    """Smallest eigenvalue of A_gamma over the grid nodes, with its witness.

    A positive value is a sampled certificate only; failure is reported,
    not raised.
    """
    if grid is None:
        grid = make_grid(spec.n, 64)
    if grid.n != spec.n:
        raise ValueError(f"grid is on S^{grid.n}, anisotropy on S^{spec.n}")
    if len(grid) == 0:
        raise ValueError("empty grid")
    vals, _, hess = spec.jet(grid.nodes)
    m = np.einsum("nai,nab,nbj->nij", grid.frames, hess, grid.frames)
    eig = np.linalg.eigvalsh(0.5 * (m + np.swapaxes(m, -1, -2)))[:, 0]
    k = int(np.argmin(eig))
    return ConvexityCertificate(float(eig[k]), grid.nodes[k].copy(), float(vals.min()))


def _min_eig_at(spec: Anisotropy, nu: np.ndarray) -> float:
    nu = nu / np.linalg.norm(nu)
    basis = tangent_frames(nu)
    return float(np.linalg.eigvalsh(a_gamma_matrices(spec, nu, basis))[0])


def lambda_min(spec: Anisotropy, grid: SphereGrid | None = None) -> float:
    """Global minimum of ``<A_gamma(nu) u, u>`` over unit ``nu`` and ``u perp nu``.

    Grid sweep followed by local refinement around the discrete minimiser.
    """
    cert = check_convexity(spec, grid)
    if not cert.convex:
        raise ConvexityError(
            f"A_gamma not positive definite: min eigenvalue {cert.min_eigenvalue:.3e} "
            f"at nu={cert.witness.tolist()}",
            cert.min_eigenvalue,
            cert.witness,
        )
    nu0 = cert.witness
    basis = tangent_frames(nu0)

    def objective(s):
        return _min_eig_at(spec, nu0 + basis @ s)

    res = minimize(objective, np.zeros(spec.n), method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 2000})
    return float(min(res.fun, cert.min_eigenvalue))


def fd_gradient(spec: Anisotropy, x: np.ndarray) -> np.ndarray:
    """Central-difference gradient of gamma (cross-validation only)."""
    x = _as_points(x, spec.dim)
    h = FD_STEP * max(1.0, float(np.linalg.norm(x)))
    eye = np.eye(spec.dim)
    return np.array([(spec.value(x + h * e) - spec.value(x - h * e)) / (2 * h) for e in eye])


def fd_hessian(spec: Anisotropy, x: np.ndarray) -> np.ndarray:
    """Central-difference Hessian from analytic gradients (cross-validation only)."""
    x = _as_points(x, spec.dim)
    h = FD_STEP * max(1.0, float(np.linalg.norm(x)))
    eye = np.eye(spec.dim)
    cols = [(spec.gradient(x + h * e) - spec.gradient(x - h * e)) / (2 * h) for e in eye]
    return np.stack(cols, axis=-1)


# ---------------------------------------------------------------------------
# dual (Minkowski) norm

SEED_COUNT = {1: 1024, 2: 4096}
N_SEEDS = 8
NEWTON_TOL = 1e-12
NEWTON_MAXITER = 50


class _SeedTable(NamedTuple):
    directions: np.ndarray
    inv_gamma: np.ndarray


_seed_cache: dict = {}


def _seed_table(spec: Anisotropy) -> _SeedTable:
    key = id(spec)
    hit = _seed_cache.get(key)
    if hit is not None and hit[0] is spec:
        return hit[1]
    dirs = seed_directions(spec.n, SEED_COUNT[spec.n])
    table = _SeedTable(dirs, 1.0 / spec.value(dirs))
    if len(_seed_cache) > 64:
        _seed_cache.clear()
    _seed_cache[key] = (spec, table)
    return table


def _ascent(spec: Anisotropy, x: np.ndarray, y: np.ndarray):
    """Projected Newton ascent of ``f(y) = <x, y> / gamma(y)`` on the sphere.

    ``x`` and ``y`` have shape ``(m, d)``; rows of ``y`` are unit starting
    directions.  Returns the final directions, values and convergence mask.
    """
    m, d = x.shape
    n = d - 1
    y = y.copy()
    active = np.ones(m, dtype=bool)
    converged = np.zeros(m, dtype=bool)

    def evaluate(xs, ys):
        g, dg, d2g = spec.jet(ys)
        xy = np.einsum("ij,ij->i", xs, ys)
        f = xy / g
        grad = xs / g[:, None] - (xy / g**2)[:, None] * dg
        outer = xs[:, :, None] * dg[:, None, :]
        hess = (
            -(outer + np.swapaxes(outer, 1, 2)) / (g**2)[:, None, None]
            - (xy / g**2)[:, None, None] * d2g
            + (2.0 * xy / g**3)[:, None, None] * dg[:, :, None] * dg[:, None, :]
        )
        return f, grad, hess

    f_all = np.einsum("ij,ij->i", x, y) / spec.value(y)
    for _ in range(NEWTON_MAXITER):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xs, ys = x[idx], y[idx]
        f, grad, hess = evaluate(xs, ys)
        t = tangent_frames(ys)
        rg = np.einsum("mai,ma->mi", t, grad)
        gnorm = np.linalg.norm(rg, axis=-1)
        done = gnorm <= NEWTON_TOL * np.maximum(np.abs(f), 1e-300)
        converged[idx[done]] = True
        f_all[idx] = f
        rh = np.einsum("mai,mab,mbj->mij", t, hess, t)
        if n == 1:
            curv = rh[:, 0, 0]
            neg_def = curv < 0.0
            step = np.where(neg_def, -rg[:, 0] / np.where(neg_def, curv, -1.0), 0.0)[:, None]
        else:
            det = rh[:, 0, 0] * rh[:, 1, 1] - rh[:, 0, 1] ** 2
            neg_def = (rh[:, 0, 0] < 0.0) & (det > 0.0)
            safe = np.where(neg_def, det, 1.0)
            s0 = -(rh[:, 1, 1] * rg[:, 0] - rh[:, 0, 1] * rg[:, 1]) / safe
            s1 = -(-rh[:, 0, 1] * rg[:, 0] + rh[:, 0, 0] * rg[:, 1]) / safe
            step = np.where(neg_def[:, None], np.stack([s0, s1], axis=-1), 0.0)
        # gradient step where the Hessian is not negative definite
        fallback = ~neg_def
        if np.any(fallback):
            step[fallback] = rg[fallback] / np.maximum(np.abs(f[fallback]), 1e-300)[:, None] * 0.5
        slen = np.linalg.norm(step, axis=-1)
        clip = slen > 0.5
        step[clip] *= (0.5 / slen[clip])[:, None]
        # backtracking: accept the first halving that does not decrease f
        accepted = np.zeros(idx.size, dtype=bool)
        y_new = ys.copy()
        f_new = f.copy()
        for _ in range(30):
            pending = ~accepted
            if not np.any(pending):
                break
            trial = ys[pending] + np.einsum("mai,mi->ma", t[pending], step[pending])
            trial /= np.linalg.norm(trial, axis=-1, keepdims=True)
            ft = np.einsum("ij,ij->i", xs[pending], trial) / spec.value(trial)
            ok = ft >= f[pending] - 4e-16 * np.abs(f[pending])
            pidx = np.flatnonzero(pending)
            sel = pidx[ok]
            y_new[sel] = trial[ok]
            f_new[sel] = ft[ok]
            accepted[sel] = True
            step[pidx[~ok]] *= 0.5
        y[idx] = np.where(done[:, None], ys, y_new)
        f_all[idx] = np.where(done, f, f_new)
        stalled = ~accepted & ~done
        converged[idx[stalled]] = True  # at the rounding floor
        active[idx[done | stalled]] = False
    return y, f_all, converged


class DualSolution(NamedTuple):
    value: np.ndarray
    direction: np.ndarray
    converged: np.ndarray
    multiple: np.ndarray


def _distinct_basins(table: _SeedTable, top: np.ndarray, n: int):
    """Starting directions: the best seed plus any top seed far from it.

    Top seeds clustered around the best one lie in the same basin and would
    converge to the same maximiser; only far-away seeds start extra runs.
    """
    spacing = np.sqrt(4.0 * np.pi / len(table.directions)) if n == 2 else 2.0 * np.pi / len(table.directions)
    dirs = table.directions[top]  # (m, k, d)
    cosang = np.einsum("mkd,md->mk", dirs, dirs[:, 0])
    far = cosang < np.cos(4.0 * spacing)
    far[:, 0] = True
    rows, cols = np.nonzero(far)
    return dirs[rows, cols], rows


def dual_norm_solve(spec: Anisotropy, x, *, n_seeds: int = N_SEEDS, start=None) -> DualSolution:
    """Batch solver behind :func:`dual_norm` and :func:`dual_norm_gradient`.

    ``start`` (unit directions, same leading shape as ``x``) replaces the
    grid seeding with a single warm start per point.
    """
    x = _as_points(x, spec.dim)
    shape = x.shape[:-1]
    xf = x.reshape(-1, spec.dim)
    m = xf.shape[0]
    value = np.zeros(m)
    direction = np.zeros_like(xf)
    converged = np.ones(m, dtype=bool)
    multiple = np.zeros(m, dtype=bool)
    nz = np.flatnonzero(np.linalg.norm(xf, axis=-1) > 0.0)
    if nz.size:
        xs = xf[nz]
        if start is not None:
            y0 = np.asarray(start, dtype=float).reshape(-1, spec.dim)[nz]
            y0 = y0 / np.linalg.norm(y0, axis=-1, keepdims=True)
            owner = np.arange(nz.size)
        else:
            table = _seed_table(spec)
            top = kernels.seed_topk(xs, table.directions, table.inv_gamma, n_seeds)
            y0, owner = _distinct_basins(table, top, spec.n)
        y, f, conv = _ascent(spec, xs[owner], y0)
        # best run per point; ties between far-apart maximisers flag non-uniqueness
        order = np.lexsort((-f, owner))
        first = np.ones(order.size, dtype=bool)
        first[1:] = owner[order[1:]] != owner[order[:-1]]
        lead = order[first]
        value[nz] = f[lead]
        direction[nz] = y[lead]
        converged[nz] = conv[lead]
        extra = order[~first]
        if extra.size:
            o = owner[extra]
            tie = f[extra] >= value[nz][o] * (1.0 - 1e-12)
            far = np.linalg.norm(y[extra] - direction[nz][o], axis=-1) > 1e-6
            multiple[nz[o[tie & far]]] = True
    return DualSolution(
        value.reshape(shape),
        direction.reshape(shape + (spec.dim,)),
        converged.reshape(shape),
        multiple.reshape(shape),
    )


def dual_norm(spec: Anisotropy, x, **kwargs):
    """Minkowski norm ``gamma*(x) = sup_{|nu|=1} <x, nu> / gamma(nu)``."""
    out = dual_norm_solve(spec, x, **kwargs).value
    return float(out) if np.ndim(out) == 0 else out


class DualGradient(NamedTuple):
    direction: np.ndarray  # maximising unit normal nu*
    gradient: np.ndarray  # nu* / gamma(nu*)
    multiple: np.ndarray  # True where the maximiser looked non-unique


def dual_norm_gradient(spec: Anisotropy, x, **kwargs) -> DualGradient:
    x = _as_points(x, spec.dim)
    if np.any(np.linalg.norm(x, axis=-1) == 0.0):
        raise ValueError("gamma* is not differentiable at the zero vector")
    sol = dual_norm_solve(spec, x, **kwargs)
    grad = sol.direction / spec.value(sol.direction)[..., None]
    return DualGradient(sol.direction, grad, sol.multiple)


def fenchel_gap(spec: Anisotropy, x, y) -> np.ndarray | float:
    """``gamma*(x) gamma(y) - <x, y>``, nonnegative by the Fenchel inequality."""
    x = _as_points(x, spec.dim)
    y = _as_points(y, spec.dim)
    out = dual_norm(spec, x) * spec.value(y) - np.einsum("...i,...i->...", x, y)
    return float(out) if np.ndim(out) == 0 else out


def brute_force_dual(spec: Anisotropy, x: np.ndarray, n_nodes: int = 100_000,
                     refine: int = 3) -> np.ndarray:
    """Grid-maximisation oracle for gamma*, independent of the Newton solver.

    Dense near-uniform sphere sampling followed by ``refine`` rounds of
    shrinking local grids around the best node.
    """
    x = np.atleast_2d(_as_points(x, spec.dim))
    dirs = seed_directions(spec.n, n_nodes)
    inv_g = 1.0 / spec.value(dirs)
    out = np.empty(x.shape[0])
    spacing = np.sqrt(4.0 * np.pi / n_nodes) if spec.n == 2 else 2.0 * np.pi / n_nodes
    local = np.linspace(-1.0, 1.0, 41)
    for i, xi in enumerate(x):
        scores = (dirs @ xi) * inv_g
        j = int(np.argmax(scores))
        best_val, best_dir = scores[j], dirs[j]
        width = 2.0 * spacing
        for _ in range(refine):
            t = tangent_frames(best_dir)
            if spec.n == 1:
                offs = local[:, None] * width
            else:
                a, b = np.meshgrid(local, local, indexing="ij")
                offs = np.stack([a.ravel(), b.ravel()], axis=-1) * width
            cand = best_dir + offs @ t.T
            cand /= np.linalg.norm(cand, axis=-1, keepdims=True)
            sc = (cand @ xi) / spec.value(cand)
            k = int(np.argmax(sc))
            if sc[k] > best_val:
                best_val, best_dir = sc[k], cand[k]
            width *= 0.1
        out[i] = best_val
    return out


def positive_on_sphere(spec: Anisotropy, count: int = 20_000) -> bool:
    return bool(np.min(spec.value(seed_directions(spec.n, count))) > 0.0)


def random_spd(rng: np.random.Generator, d: int, max_condition: float = 16.0) -> np.ndarray:
    """Random SPD matrix with condition number at most ``max_condition``."""
    q, _ = np.linalg.qr(rng.normal(size=(d, d)))
    eig = np.exp(rng.uniform(0.0, np.log(max_condition), size=d))
    eig /= eig.min()
    return (q * eig) @ q.T
