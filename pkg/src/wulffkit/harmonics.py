"""Real spherical harmonics as homogeneous harmonic polynomials.

A harmonic term of degree ``l`` is carried as the solid harmonic ``P(x)``,
a homogeneous polynomial of degree ``l`` with ``P(u) = Y(u)`` on the unit
sphere.  Every 0- or 1-homogeneous function built from such terms then has
closed-form ambient derivatives (see :func:`radial_power_jet`).

Normalisation is orthonormal with respect to the standard measure on the
circle (n = 1) or the 2-sphere (n = 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
import sympy


@dataclass(frozen=True)
class Polynomial:
    """Sparse polynomial ``sum_k c_k prod_i x_i**e_ki`` in ``d`` variables."""

    exponents: np.ndarray  # (K, d) int
    coefficients: np.ndarray  # (K,)

    @property
    def dim(self) -> int:
        return self.exponents.shape[1]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.exponents.shape[0] == 0:
            return np.zeros(x.shape[:-1])
        out = np.zeros(x.shape[:-1])
        for e, c in zip(self.exponents, self.coefficients):
            term = np.full(x.shape[:-1], c)
            for i, k in enumerate(e):
                if k:
                    term = term * x[..., i] ** k
            out = out + term
        return out

    def derivative(self, axis: int) -> "Polynomial":
        e = self.exponents
        keep = e[:, axis] > 0
        new_e = e[keep].copy()
        new_c = self.coefficients[keep] * new_e[:, axis]
        new_e[:, axis] -= 1
        return Polynomial(new_e, new_c)

    @classmethod
    def from_sympy(cls, expr, symbols) -> "Polynomial":
        poly = sympy.Poly(sympy.expand(expr), *symbols)
        terms = poly.terms()
        if not terms:
            return cls(np.zeros((0, len(symbols)), dtype=int), np.zeros(0))
        exps = np.array([t[0] for t in terms], dtype=int)
        coefs = np.array([float(t[1]) for t in terms])
        return cls(exps, coefs)


@dataclass(frozen=True)
class PolynomialJet:
    """A polynomial with its gradient and Hessian polynomials precomputed."""

    value: Polynomial
    gradient: tuple
    hessian: tuple  # tuple of tuples

    @classmethod
    def of(cls, p: Polynomial) -> "PolynomialJet":
        d = p.dim
        grads = tuple(p.derivative(i) for i in range(d))
        hess = tuple(tuple(grads[i].derivative(j) for j in range(d)) for i in range(d))
        return cls(p, grads, hess)

    def evaluate(self, x: np.ndarray):
        """Return ``(P, grad P, Hess P)`` at points ``x`` of shape ``(..., d)``."""
        d = self.value.dim
        val = self.value(x)
        grad = np.stack([g(x) for g in self.gradient], axis=-1)
        hess = np.empty(x.shape[:-1] + (d, d))
        for i in range(d):
            for j in range(i, d):
                hij = self.hessian[i][j](x)
                hess[..., i, j] = hij
                hess[..., j, i] = hij
        return val, grad, hess


def _circle_harmonic(degree: int, order: int) -> Polynomial:
    x, y = sympy.symbols("x y", real=True)
    z = sympy.expand((x + sympy.I * y) ** degree)
    part = sympy.re(z) if order >= 0 else sympy.im(z)
    norm = 1.0 / math.sqrt(2.0 * math.pi) if degree == 0 else 1.0 / math.sqrt(math.pi)
    return Polynomial.from_sympy(sympy.expand(part) * norm, (x, y))


def _sphere_harmonic(degree: int, order: int) -> Polynomial:
    x, y, z, t = sympy.symbols("x y z t", real=True)
    l, m = degree, abs(order)
    dm = sympy.Poly(sympy.diff(sympy.legendre(l, t), t, m), t)
    r2 = x**2 + y**2 + z**2
    q = 0
    for (k,), c in dm.terms():
        q += c * z**k * r2 ** ((l - m - k) // 2)
    w = sympy.expand((x + sympy.I * y) ** m)
    if order > 0:
        azimuth = sympy.sqrt(2) * sympy.re(w)
    elif order < 0:
        azimuth = sympy.sqrt(2) * sympy.im(w)
    else:
        azimuth = 1
    k_lm = sympy.sqrt(
        sympy.Rational(2 * l + 1, 1) / (4 * sympy.pi)
        * sympy.factorial(l - m) / sympy.factorial(l + m)
    )
    expr = sympy.expand(k_lm * azimuth * q)
    return Polynomial.from_sympy(sympy.N(expr, 30), (x, y, z))


@lru_cache(maxsize=None)
def harmonic_jet(n: int, degree: int, order: int) -> PolynomialJet:
    """Solid harmonic of the given degree/order on S^n, with derivatives.

    For ``n = 1`` the term is ``cos(degree*phi)`` (``order >= 0``) or
    ``sin(degree*phi)`` (``order < 0``), orthonormalised.
    """
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    if n == 1:
        if degree == 0 and order < 0:
            raise ValueError("sin(0*phi) vanishes identically")
        poly = _circle_harmonic(degree, order)
    elif n == 2:
        if abs(order) > degree:
            raise ValueError(f"|order| must not exceed degree, got ({degree}, {order})")
        poly = _sphere_harmonic(degree, order)
    else:
        raise ValueError(f"unsupported hypersurface dimension n={n}")
    return PolynomialJet.of(poly)


def radial_power_jet(p_val, p_grad, p_hess, x: np.ndarray, power: float):
    """Value, gradient and Hessian of ``f(x) = P(x) * |x|**power``.

    ``p_*`` are the polynomial's value/gradient/Hessian at ``x``.
    """
    rho2 = np.einsum("...i,...i->...", x, x)
    rho = np.sqrt(rho2)
    rk = rho**power
    rk2 = rho ** (power - 2.0)
    rk4 = rho ** (power - 4.0)
    val = p_val * rk
    grad = p_grad * rk[..., None] + (power * p_val * rk2)[..., None] * x
    eye = np.eye(x.shape[-1])
    outer_gx = p_grad[..., :, None] * x[..., None, :]
    hess = (
        p_hess * rk[..., None, None]
        + (power * rk2)[..., None, None] * (outer_gx + np.swapaxes(outer_gx, -1, -2))
        + (power * p_val * rk2)[..., None, None] * eye
        + (power * (power - 2.0) * p_val * rk4)[..., None, None]
        * (x[..., :, None] * x[..., None, :])
    )
    return val, grad, hess


@dataclass(frozen=True)
class HarmonicTerm:
    """One coefficient times a real spherical harmonic ``Y_{degree, order}``."""

    degree: int
    order: int
    coefficient: float

    def to_dict(self) -> dict:
        return {"degree": self.degree, "order": self.order, "coefficient": self.coefficient}

    @classmethod
    def from_dict(cls, data: dict) -> "HarmonicTerm":
        return cls(int(data["degree"]), int(data["order"]), float(data["coefficient"]))


def harmonic_series_jet(n: int, terms: Sequence[HarmonicTerm], x: np.ndarray, power: float = 0.0):
    """Jet of ``|x|**power * sum_k c_k Y_k(x/|x|)``.

    With ``power = 0`` this is the 0-homogeneous extension of the series.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    val = np.zeros(x.shape[:-1])
    grad = np.zeros(x.shape)
    hess = np.zeros(x.shape + (d,))
    for term in terms:
        if term.coefficient == 0.0:
            continue
        jet = harmonic_jet(n, term.degree, term.order)
        pv, pg, ph = jet.evaluate(x)
        v, g, h = radial_power_jet(pv, pg, ph, x, power - term.degree)
        val += term.coefficient * v
        grad += term.coefficient * g
        hess += term.coefficient * h
    return val, grad, hess
