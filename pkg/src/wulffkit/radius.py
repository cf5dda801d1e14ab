"""Anisotropic extrinsic radius: ``min_{x0} max_p gamma*(X_p - x0)``.

The objective is a maximum of convex functions of ``x0``.  It is solved in
epigraph form (minimise ``t`` subject to ``gamma*(X_p - x0) <= t``) by SLSQP
over a working set of nodes that is grown by exchange: after each solve
every node is re-evaluated and the worst violators join the working set.
A plain subgradient loop over the working set is the fallback when an
SQP step fails to lower the working-set maximum.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .anisotropy import Anisotropy, dual_norm_solve
from .surface import SampledSurface, center_of_mass

logger = logging.getLogger(__name__)

ACTIVE_TOL = 1e-7
EXCHANGE_BATCH = 24
MAX_ROUNDS = 60
SUBGRADIENT_BUDGET = 10_000


@dataclass(frozen=True, eq=False)
class RadiusSolution:
    """Minimising center ``X0`` and the anisotropic extrinsic radius."""

    center: np.ndarray
    radius: float
    active_nodes: np.ndarray
    iterations: int
    final_step: float
    converged: bool
    values: np.ndarray  # gamma*(X_p - X0) at every node
    directions: np.ndarray  # maximising normals nu*(X_p - X0)

    def subgradients(self, gamma: Anisotropy) -> np.ndarray:
        """``-grad gamma*(X_p - X0)`` at the active nodes."""
        nu = self.directions[self.active_nodes]
        return -nu / gamma.value(nu)[:, None]


def _evaluate(gamma, points, x0, start=None):
    sol = dual_norm_solve(gamma, points - x0, start=start)
    return sol.value, sol.direction


def _epigraph_solve(gamma, pts, x0, t0, dirs0):
    """SLSQP on ``min t  s.t.  t - gamma*(pts - x) >= 0``; returns (x, t, nit).

    The SLSQP status is not trusted: callers judge the step by the true
    working-set maximum.
    """
    d = pts.shape[1]
    cache = {}
    warm = [dirs0]

    def values(z):
        key = z[:d].tobytes()
        if key not in cache:
            cache.clear()
            sol = dual_norm_solve(gamma, pts - z[:d], start=warm[0])
            warm[0] = sol.direction
            grad = sol.direction / gamma.value(sol.direction)[:, None]
            cache[key] = (sol.value, grad)
        return cache[key]

    def cons(z):
        return z[d] - values(z)[0]

    def cons_jac(z):
        _, grad = values(z)
        return np.hstack([grad, np.ones((pts.shape[0], 1))])

    z0 = np.append(x0, t0)
    res = minimize(
        lambda z: z[d],
        z0,
        jac=lambda z: np.eye(d + 1)[d],
        constraints=[{"type": "ineq", "fun": cons, "jac": cons_jac}],
        method="SLSQP",
        options={"ftol": 1e-15, "maxiter": 200},
    )
    return res.x[:d], float(res.x[d]), int(res.nit)


def _subgradient(gamma, pts, x0, scale, budget):
    """Diminishing-step subgradient descent on ``max_p gamma*(pts_p - x)``."""
    x = x0.copy()
    best_x, best_f = x.copy(), np.inf
    step = 0.1 * scale
    for k in range(1, budget + 1):
        vals, dirs = _evaluate(gamma, pts, x)
        i = int(np.argmax(vals))
        if vals[i] < best_f:
            best_f, best_x = float(vals[i]), x.copy()
        g = -dirs[i] / gamma.value(dirs[i])
        gn = np.linalg.norm(g)
        if gn == 0.0:
            break
        x = x - (step / np.sqrt(k)) * g / gn
    return best_x, best_f


def minimax_center(points, gamma: Anisotropy, start=None, tol: float = 1e-12) -> RadiusSolution:
    """Minimise ``x0 -> max_p gamma*(points_p - x0)`` over ``x0``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("need a nonempty (N, d) point array")
    if pts.shape[1] != gamma.dim:
        raise ValueError(f"points live in R^{pts.shape[1]}, anisotropy in R^{gamma.dim}")
    shift = pts.mean(axis=0)
    local = pts - shift
    scale = float(np.max(np.linalg.norm(local, axis=1))) or 1.0
    local = local / scale
    x = (np.asarray(start, dtype=float) - shift) / scale if start is not None else np.zeros(gamma.dim)

    vals, dirs = _evaluate(gamma, local, x)
    order = np.argsort(-vals, kind="stable")
    spread = np.unique(np.linspace(0, len(local) - 1, min(len(local), 64)).astype(int))
    work = np.unique(np.concatenate([order[:EXCHANGE_BATCH], spread]))
    t = float(vals.max())
    converged = False
    iterations = 0
    final_step = np.inf
    for _ in range(MAX_ROUNDS):
        t_work = float(vals[work].max())
        x_new, _, nit = _epigraph_solve(gamma, local[work], x, t, dirs[work])
        iterations += nit
        t_new = float(_evaluate(gamma, local[work], x_new, start=dirs[work])[0].max())
        if not t_new <= t_work + tol:
            logger.debug("SQP step did not descend on %d working nodes; subgradient fallback",
                         work.size)
            x_new, t_new = _subgradient(gamma, local[work], x, 0.01, SUBGRADIENT_BUDGET // 10)
            iterations += SUBGRADIENT_BUDGET // 10
            if not t_new <= t_work + tol:
                break
        final_step = float(np.linalg.norm(x_new - x)) * scale
        x = x_new
        vals, dirs = _evaluate(gamma, local, x, start=dirs)
        worst = float(vals.max())
        if worst <= t_new + tol:
            converged = True
            break
        t = worst
        viol = np.flatnonzero(vals > t_new + tol)
        viol = viol[np.argsort(-vals[viol], kind="stable")][:EXCHANGE_BATCH]
        work = np.union1d(work, viol)

    center = x * scale + shift
    # final values recomputed from fresh seeds, not warm starts
    sol = dual_norm_solve(gamma, pts - center)
    radius = float(sol.value.max())
    active = np.flatnonzero(sol.value >= radius * (1.0 - ACTIVE_TOL))
    return RadiusSolution(center, radius, active, iterations, final_step, converged,
                          sol.value, sol.direction)


def extrinsic_radius(s: SampledSurface, gamma: Anisotropy | None = None) -> RadiusSolution:
    """Anisotropic extrinsic radius of a sampled surface, started at its center of mass."""
    gamma = s.anisotropy if gamma is None else gamma
    return minimax_center(s.positions, gamma, start=center_of_mass(s))


def inclusion_check(s: SampledSurface | np.ndarray, gamma: Anisotropy, x0, scale: float) -> bool:
    """True iff every node lies strictly inside ``scale * W_gamma + x0``."""
    if scale <= 0.0:
        raise ValueError(f"scale must be > 0, got {scale}")
    pts = s.positions if isinstance(s, SampledSurface) else np.asarray(s, dtype=float)
    vals = dual_norm_solve(gamma, pts - np.asarray(x0, dtype=float)).value
    return bool(vals.max() < scale)


def hull_distance(vectors: np.ndarray) -> float:
    """Distance from the origin to the convex hull of the rows of ``vectors``."""
    from scipy.optimize import nnls

    g = np.asarray(vectors, dtype=float)
    k = g.shape[0]
    big = 1e3 * max(1.0, float(np.abs(g).max()))
    a = np.vstack([g.T, big * np.ones((1, k))])
    b = np.zeros(g.shape[1] + 1)
    b[-1] = big
    lam, _ = nnls(a, b, maxiter=50 * k)
    lam = lam / lam.sum()
    return float(np.linalg.norm(lam @ g))
