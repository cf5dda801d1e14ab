"""Checkable identities, inequalities and stability quantities for a (gamma, surface) pair.

All ``L^p`` norms are taken against the probability measure
``gamma(N) dA / F(Sigma)`` (see :func:`wulffkit.surface.lp_norm`).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .anisotropy import Anisotropy, lambda_min
from .radius import RadiusSolution, extrinsic_radius, hull_distance
from .sphere import make_grid, parameter_samples
from .surface import (
    SampledSurface,
    SurfaceSpec,
    WulffShape,
    dense_positions,
    lp_norm,
    sample_surface,
    surface_energy,
)

SCHEMA_VERSION = 1
# pointwise accuracy limit set by the finite-difference third derivatives of
# gamma in the Wulff parametrization; errors below it carry no order information
NUMERICAL_FLOOR = 1e-9
HAUSDORFF_OVERSAMPLING = 4

# thresholds applied by :func:`violations`
TOLERANCES = {
    "hk_product_min": 1.0 - 1e-6,
    "pinching_epsilon_min": -1e-8,
    "hm_residual_max": 1e-6,
    "equality_gap_max": 1e-5,
    "wulff_curvature_max": 1e-5,
    "certificate_max": 1e-4,
}


def hsiung_minkowski_residual(s: SampledSurface, x0=None) -> float:
    """``|(1/F) int (gamma(N) + H_gamma <X - x0, N>)|`` with ``N`` inward."""
    x0 = np.zeros(s.positions.shape[1]) if x0 is None else np.asarray(x0, dtype=float)
    support = np.einsum("ma,ma->m", s.positions - x0, s.normals)
    integrand = s.gamma_N + s.H_gamma * support
    return abs(float(np.dot(integrand, s.area_weights))) / surface_energy(s)


def hk_products(s: SampledSurface, gamma: Anisotropy, sol: RadiusSolution) -> dict:
    """``l2 = |H_g|_2 |g*(X - X0)|_2`` and ``inf = |H_g|_inf R_ext``."""
    del gamma  # sol.values already holds gamma*(X - X0)
    h2 = lp_norm(s, s.H_gamma, 2.0)
    return {
        "l2": h2 * lp_norm(s, sol.values, 2.0),
        "inf": lp_norm(s, s.H_gamma, math.inf) * sol.radius,
    }


def pinching_epsilon(s: SampledSurface, gamma: Anisotropy, sol: RadiusSolution, p: float) -> float:
    """Smallest ``eps`` with ``|H_g|_p |g*(X - X0)|_2 <= 1 + eps``."""
    del gamma
    if not p > 2.0:
        raise ValueError(f"pinching exponent p must be > 2, got {p}")
    return lp_norm(s, s.H_gamma, p) * lp_norm(s, sol.values, 2.0) - 1.0


def radius_deviation(s: SampledSurface, gamma: Anisotropy, sol: RadiusSolution) -> float:
    """``|H_g|_2 * max |g*(X - X0) - 1/|H_g|_2|`` (dimensionless)."""
    del gamma
    h2 = lp_norm(s, s.H_gamma, 2.0)
    return h2 * float(np.max(np.abs(sol.values - 1.0 / h2)))


def mc_deviation(s: SampledSurface, r: float, p: float = math.inf, *, absolute: bool = False) -> float:
    """``|H_g - |H_g|_2|_r / |H_g|_2``; with ``absolute`` the deviation of ``|H_g|``."""
    if not 1.0 <= r < p:
        raise ValueError(f"r must lie in [1, p) = [1, {p}), got {r}")
    h2 = lp_norm(s, s.H_gamma, 2.0)
    h = np.abs(s.H_gamma) if absolute else s.H_gamma
    return lp_norm(s, h - h2, r) / h2


def exponents(n: int, q: float) -> dict:
    """``beta = n q / (2 (q - n))`` and ``alpha = 1 / (2 (1 + beta))``."""
    if not q > n:
        raise ValueError(f"q must exceed n={n}, got q={q}")
    if math.isinf(q):
        beta = n / 2.0
    else:
        beta = n * q / (2.0 * (q - n))
    return {"beta": beta, "alpha": 1.0 / (2.0 * (1.0 + beta))}


def sg_bound(s: SampledSurface, q: float) -> float:
    """``F(Sigma)^(1/n) * |S_gamma|_q`` with the Frobenius norm per node."""
    return surface_energy(s) ** (1.0 / s.n) * lp_norm(s, s.s_gamma_frobenius, q)


def holder_chain_gap(values: np.ndarray, s: SampledSurface, p: float) -> float:
    """``|f|_1^(1-2/p) |f|_2^(2/p) - |f|_(p/(p-1))``; nonnegative for ``p > 2``."""
    f = np.asarray(values, dtype=float)
    lhs = lp_norm(s, f, p / (p - 1.0))
    return lp_norm(s, f, 1.0) ** (1.0 - 2.0 / p) * lp_norm(s, f, 2.0) ** (2.0 / p) - lhs


def _dense_grid(points: np.ndarray, n: int, resolution: int) -> np.ndarray:
    if n == 1:
        return points.reshape(resolution, -1)
    return points.reshape(resolution, 2 * resolution, -1)


def sampling_spacing(points: np.ndarray, n: int, resolution: int) -> float:
    """Largest distance between neighbouring samples of a parameter-uniform cloud."""
    grid = _dense_grid(points, n, resolution)
    if n == 1:
        return float(np.max(np.linalg.norm(np.roll(grid, -1, axis=0) - grid, axis=-1)))
    along = np.linalg.norm(np.roll(grid, -1, axis=1) - grid, axis=-1).max()
    across = np.linalg.norm(np.diff(grid, axis=0), axis=-1).max()
    return float(max(along, across))


@dataclass(frozen=True)
class HausdorffResult:
    distance: float
    h: float  # sampling spacing of the coarser of the two clouds
    resolution: int


def hausdorff_distance(s: SampledSurface, gamma: Anisotropy, scale: float, center,
                       oversampling: int = HAUSDORFF_OVERSAMPLING) -> HausdorffResult:
    """Symmetric Hausdorff distance between ``s`` and ``scale * W_gamma + center``.

    Both shapes are resampled uniformly in their angular parameters at
    ``oversampling`` times the geometry resolution.
    """
    if scale <= 0.0:
        raise ValueError(f"scale must be > 0, got {scale}")
    res = oversampling * s.resolution
    a = dense_positions(s.spec, s.anisotropy, res)
    u = parameter_samples(gamma.n, res)
    b = np.asarray(center, dtype=float) + scale * gamma.gradient(u)
    ab = kernels.directed_max_min(a, b)[0]
    ba = kernels.directed_max_min(b, a)[0]
    h = max(sampling_spacing(a, gamma.n, res), sampling_spacing(b, gamma.n, res))
    return HausdorffResult(max(ab, ba), h, res)


def wulff_curvature_error(s: SampledSurface) -> float | None:
    """``max |H_g - 1/R|`` when ``s`` samples an unperturbed Wulff shape of its own gamma."""
    spec = s.spec
    if not isinstance(spec, WulffShape) or spec.perturbation:
        return None
    if spec.anisotropy is not None and spec.anisotropy.to_dict() != s.anisotropy.to_dict():
        return None
    return float(np.max(np.abs(s.H_gamma - 1.0 / spec.scale)))


@dataclass(frozen=True)
class VerificationReport:
    """Scalar diagnostics for one (gamma, surface) pair at one resolution."""

    anisotropy: dict
    surface: dict
    n: int
    resolution: int
    p: float
    q: float
    hm_residual: float
    hk_product_l2: float
    hk_product_inf: float
    pinching_p: float
    pinching_epsilon: float
    radius: float
    center: list
    radius_converged: bool
    radius_certificate: float
    radius_deviation: float
    mc_deviation_r: dict
    mc_deviation_abs_r: dict
    sg_bound: float
    sg_bound_limit: float | None
    sg_bound_exceeds_limit: bool | None
    beta: float
    alpha: float
    hausdorff: float
    hausdorff_h: float
    hausdorff_resolution: int
    holder_chain_gap: float
    surface_energy: float
    wulff_curvature_error: float | None
    pointwise_bound_margin: float
    quadrature_error: dict
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCES))
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=True) + "\n"


def _core(s: SampledSurface, gamma: Anisotropy, p: float, r_values) -> dict:
    sol = extrinsic_radius(s, gamma)
    hk = hk_products(s, gamma, sol)
    return {
        "sol": sol,
        "hm_residual": hsiung_minkowski_residual(s, sol.center),
        "hk_product_l2": hk["l2"],
        "hk_product_inf": hk["inf"],
        "pinching_epsilon": pinching_epsilon(s, gamma, sol, p),
        "radius_deviation": radius_deviation(s, gamma, sol),
        "mc_deviation_r": {str(r): mc_deviation(s, r, p) for r in r_values},
        "mc_deviation_abs_r": {str(r): mc_deviation(s, r, p, absolute=True) for r in r_values},
    }


def full_report(gamma: Anisotropy, surface: SurfaceSpec, p: float = 3.0, q: float = 4.0,
                r_values=(1.0, 2.0), resolution: int = 128, *, lam: float | None = None,
                sg_limit: float | None = None) -> VerificationReport:
    """Assemble every diagnostic; quadrature errors come from a half-resolution rerun.

    ``lam`` is the minimum eigenvalue of ``A_gamma`` used by the pointwise
    bound ``|H| <= |S_gamma| / lam``; it is computed when omitted.
    """
    ex = exponents(gamma.n, q)  # validates q before the expensive work
    if not p > 2.0:
        raise ValueError(f"pinching exponent p must be > 2, got {p}")
    r_values = [float(r) for r in r_values]
    for r in r_values:
        if not 1.0 <= r < p:
            raise ValueError(f"r must lie in [1, p) = [1, {p}), got {r}")
    s = sample_surface(surface, gamma, make_grid(gamma.n, resolution))
    fine = _core(s, gamma, p, r_values)
    coarse_res = max(8, resolution // 2)
    coarse = _core(sample_surface(surface, gamma, make_grid(gamma.n, coarse_res)), gamma, p, r_values)
    quad = {
        key: abs(fine[key] - coarse[key])
        for key in ("hm_residual", "hk_product_l2", "hk_product_inf", "pinching_epsilon", "radius_deviation")
    }
    quad["coarse_resolution"] = coarse_res

    sol: RadiusSolution = fine["sol"]
    h2 = lp_norm(s, s.H_gamma, 2.0)
    haus = hausdorff_distance(s, gamma, 1.0 / h2, sol.center)
    lam = lambda_min(gamma) if lam is None else lam
    margin = float(np.min(s.s_gamma_frobenius / lam - np.abs(s.H)))
    bound = sg_bound(s, q)
    return VerificationReport(
        anisotropy=gamma.to_dict(),
        surface=surface.to_dict(),
        n=gamma.n,
        resolution=resolution,
        p=float(p),
        q=float(q),
        hm_residual=fine["hm_residual"],
        hk_product_l2=fine["hk_product_l2"],
        hk_product_inf=fine["hk_product_inf"],
        pinching_p=float(p),
        pinching_epsilon=fine["pinching_epsilon"],
        radius=sol.radius,
        center=sol.center.tolist(),
        radius_converged=sol.converged,
        radius_certificate=_certificate(sol, gamma),
        radius_deviation=fine["radius_deviation"],
        mc_deviation_r=fine["mc_deviation_r"],
        mc_deviation_abs_r=fine["mc_deviation_abs_r"],
        sg_bound=bound,
        sg_bound_limit=sg_limit,
        sg_bound_exceeds_limit=None if sg_limit is None else bool(bound > sg_limit),
        beta=ex["beta"],
        alpha=ex["alpha"],
        hausdorff=haus.distance,
        hausdorff_h=haus.h,
        hausdorff_resolution=haus.resolution,
        holder_chain_gap=holder_chain_gap(sol.values, s, p),
        surface_energy=surface_energy(s),
        wulff_curvature_error=wulff_curvature_error(s),
        pointwise_bound_margin=margin,
        quadrature_error=quad,
    )


CERTIFICATE_SAMPLE = 2048


def _certificate(sol: RadiusSolution, gamma: Anisotropy) -> float:
    """Hull distance of the active subgradients (evenly thinned when many are active)."""
    g = sol.subgradients(gamma)
    if g.shape[0] > CERTIFICATE_SAMPLE:
        g = g[np.linspace(0, g.shape[0] - 1, CERTIFICATE_SAMPLE).astype(int)]
    return hull_distance(g)


def violations(report: VerificationReport, tolerances: dict | None = None) -> list[tuple[str, float, str]]:
    """Hard invariants that fail, as ``(field, value, requirement)`` triples."""
    tol = dict(TOLERANCES)
    tol.update(tolerances or {})
    out = []

    def need(name, value, ok, requirement):
        if not ok:
            out.append((name, value, requirement))

    lo = tol["hk_product_min"]
    need("hk_product_l2", report.hk_product_l2, report.hk_product_l2 >= lo, f">= {lo!r}")
    need("hk_product_inf", report.hk_product_inf, report.hk_product_inf >= lo, f">= {lo!r}")
    eps_lo = tol["pinching_epsilon_min"]
    need("pinching_epsilon", report.pinching_epsilon, report.pinching_epsilon >= eps_lo, f">= {eps_lo!r}")
    hm = tol["hm_residual_max"]
    need("hm_residual", report.hm_residual, report.hm_residual <= hm, f"<= {hm!r}")
    need("pointwise_bound_margin", report.pointwise_bound_margin,
         report.pointwise_bound_margin >= -1e-8, ">= -1e-08")
    cert = tol["certificate_max"]
    need("radius_certificate", report.radius_certificate, report.radius_certificate <= cert, f"<= {cert!r}")
    if report.wulff_curvature_error is not None:
        gap = tol["equality_gap_max"]
        for name in ("hk_product_l2", "hk_product_inf"):
            value = getattr(report, name)
            need(name, value, abs(value - 1.0) <= gap, f"within {gap!r} of 1 (Wulff shape)")
        wc = tol["wulff_curvature_max"]
        need("wulff_curvature_error", report.wulff_curvature_error,
             report.wulff_curvature_error <= wc, f"<= {wc!r}")
    return out


def observed_orders(resolutions, errors, floor: float = 0.0) -> list:
    """Observed convergence orders between consecutive refinements.

    An entry is ``None`` (reported as "n/a") when the error does not
    decrease or either error is at or below ``floor``.
    """
    orders = []
    for (r0, e0), (r1, e1) in zip(zip(resolutions, errors), zip(resolutions[1:], errors[1:])):
        if e0 is None or e1 is None or not (e0 > e1 > floor) or e0 <= floor:
            orders.append(None)
        else:
            orders.append(math.log(e0 / e1) / math.log(r1 / r0))
    return orders


__all__ = [
    "HausdorffResult",
    "NUMERICAL_FLOOR",
    "SCHEMA_VERSION",
    "TOLERANCES",
    "VerificationReport",
    "exponents",
    "full_report",
    "hausdorff_distance",
    "hk_products",
    "holder_chain_gap",
    "hsiung_minkowski_residual",
    "mc_deviation",
    "observed_orders",
    "pinching_epsilon",
    "radius_deviation",
    "sampling_spacing",
    "sg_bound",
    "violations",
    "wulff_curvature_error",
]
