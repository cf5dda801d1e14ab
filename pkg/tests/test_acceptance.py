"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import time

import numpy as np
import pytest
from conftest import family_examples
from oracles import smallest_enclosing_ball

from wulffkit.anisotropy import (
    Ellipsoid,
    HarmonicPerturbation,
    Isotropic,
    brute_force_dual,
    check_convexity,
    dual_norm,
    fenchel_gap,
    lambda_min,
    random_spd,
    wulff_point,
)
from wulffkit.harmonics import HarmonicTerm
from wulffkit.radius import extrinsic_radius, minimax_center
from wulffkit.sphere import make_grid
from wulffkit.surface import (
    DegenerateSurfaceError,
    EllipsoidSurface,
    RadialGraph,
    RoundSphere,
    WulffShape,
    sample_surface,
)
from wulffkit.verify import (
    NUMERICAL_FLOOR,
    exponents,
    full_report,
    hk_products,
    hsiung_minkowski_residual,
    observed_orders,
)

Q = np.diag([4.0, 1.0, 1.0])
FAMILIES = family_examples()


def verdict(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_criterion_01_equality_on_wulff_shapes(capsys):
    start = time.perf_counter()
    worst = 0.0
    for g in (Isotropic(), Ellipsoid(Q), HarmonicPerturbation(1.0, 0.1, 3, 1)):
        grid = make_grid(2, 128)
        for scale in (0.5, 1.0, 3.0):
            s = sample_surface(WulffShape(scale), g, grid)
            hk = hk_products(s, g, extrinsic_radius(s))
            worst = max(worst, abs(hk["l2"] - 1.0), abs(hk["inf"] - 1.0))
    elapsed = time.perf_counter() - start
    verdict(capsys, 1, worst <= 1e-5 and elapsed <= 30.0,
            f"max |hk - 1| = {worst:.2e} (<= 1e-5), {elapsed:.1f} s (<= 30 s)")


def _random_pair(rng):
    while True:
        g = Ellipsoid(random_spd(rng, 3, 16.0))
        if not check_convexity(g).convex:
            continue
        terms = []
        for _ in range(int(rng.integers(1, 3))):
            degree = int(rng.integers(1, 5))
            terms.append(HarmonicTerm(degree, int(rng.integers(-degree, degree + 1)), float(rng.uniform(-0.3, 0.3))))
        try:
            return g, sample_surface(RadialGraph(1.0, terms), g, make_grid(2, 32))
        except DegenerateSurfaceError:
            continue


def test_criterion_02_inequality_suite(capsys):
    rng = np.random.default_rng(7)
    pairs = 60
    failures = 0
    lowest = np.inf
    for _ in range(pairs):
        g, s = _random_pair(rng)
        value = hk_products(s, g, extrinsic_radius(s))["l2"]
        lowest = min(lowest, value)
        failures += not value >= 1.0 - 1e-6
    verdict(capsys, 2, failures == 0,
            f"{pairs} pairs, {failures} violations, min hk_l2 = {lowest:.6f} (>= 1 - 1e-6)")


def test_criterion_03_hsiung_minkowski(capsys):
    problems = []
    worst = 0.0
    for g in FAMILIES:
        axes = (3.0, 1.0, 0.5) if g.n == 2 else (3.0, 0.5)
        for spec in (WulffShape(1.0), WulffShape(2.0, np.ones(g.n + 1)), EllipsoidSurface(axes)):
            res = [32, 64, 128]
            errs = [hsiung_minkowski_residual(sample_surface(spec, g, make_grid(g.n, r))) for r in res]
            worst = max(worst, errs[-1])
            orders = observed_orders(res, errs)
            for k, order in enumerate(orders):
                # past the numerical floor the error no longer depends on resolution
                if errs[k + 1] > NUMERICAL_FLOOR and not (order is not None and order >= 2.0):
                    problems.append(f"{g.family}-n{g.n} {spec.kind}: {errs}")
            if errs[-1] > 1e-6:
                problems.append(f"{g.family}-n{g.n} {spec.kind}: residual {errs[-1]:.2e}")
    verdict(capsys, 3, not problems,
            f"max residual at 128 = {worst:.2e} (<= 1e-6), order >= 2 above floor {NUMERICAL_FLOOR:g}"
            + ("" if not problems else "; " + "; ".join(problems)))


def test_criterion_04_wulff_curvature(capsys):
    worst = 0.0
    for g in FAMILIES:
        grid = make_grid(g.n, 128)
        for scale in (0.5, 1.0, 3.0):
            s = sample_surface(WulffShape(scale), g, grid)
            worst = max(worst, float(np.max(np.abs(s.H_gamma - 1.0 / scale))))
    verdict(capsys, 4, worst <= 1e-5, f"max |H_gamma - 1/R| = {worst:.2e} (<= 1e-5)")


def test_criterion_05_dual_norm_oracles(capsys):
    rng = np.random.default_rng(5)
    g = Ellipsoid(Q)
    x = rng.normal(size=(1000, 3))
    closed = g.closed_form_dual(x)
    rel_closed = float(np.max(np.abs(dual_norm(g, x) - closed) / closed))
    rel_brute = 0.0
    for fam in FAMILIES:
        y = rng.normal(size=(100, fam.dim))
        ref = brute_force_dual(fam, y)
        rel_brute = max(rel_brute, float(np.max(np.abs(dual_norm(fam, y) - ref) / ref)))
    verdict(capsys, 5, rel_closed <= 1e-6 and rel_brute <= 1e-4,
            f"closed form rel {rel_closed:.1e} (<= 1e-6), brute force rel {rel_brute:.1e} (<= 1e-4)")


def test_criterion_06_radius_recovery(capsys):
    rng = np.random.default_rng(6)
    rel, shift = 0.0, 0.0
    for g in FAMILIES:
        grid = make_grid(g.n, 64)
        for scale in (1.0, 3.0):
            c = rng.uniform(-2.0, 2.0, size=g.n + 1)
            sol = extrinsic_radius(sample_surface(WulffShape(scale, c), g, grid))
            rel = max(rel, abs(sol.radius - scale) / scale)
            shift = max(shift, float(np.linalg.norm(sol.center - c)) / scale)
    seb = 0.0
    for d, count in ((2, 64), (2, 17), (3, 20), (3, 12)):
        pts = rng.normal(size=(count, d))
        r_ref, _ = smallest_enclosing_ball(pts)
        seb = max(seb, abs(minimax_center(pts, Isotropic(n=d - 1)).radius - r_ref))
    verdict(capsys, 6, rel <= 1e-6 and shift <= 1e-5 and seb <= 1e-7,
            f"radius rel {rel:.1e} (<= 1e-6), |X0 - c|/s {shift:.1e} (<= 1e-5), "
            f"ball oracle {seb:.1e} (<= 1e-7)")


DELTAS = (0.16, 0.08, 0.04, 0.02, 0.01)
TREND_FIELDS = ("pinching_epsilon", "radius_deviation", "mc_deviation", "hausdorff")


def _trend_value(report, field):
    return report.mc_deviation_r["1.0"] if field == "mc_deviation" else getattr(report, field)


def _floor(report, base, field):
    """Sampling floor: the value on the unperturbed shape, its quadrature error, or the grid spacing."""
    if field == "hausdorff":
        return report.hausdorff_h
    quad = report.quadrature_error.get(field, 0.0)
    return max(abs(_trend_value(base, field)), quad)


def _trend_problems(label, reports, base):
    problems = []
    for field in TREND_FIELDS:
        values = [_trend_value(r, field) for r in reports]
        for k in range(len(values) - 1):
            if values[k] > 10 * _floor(reports[k], base, field) and not values[k + 1] < values[k]:
                problems.append(f"{label} {field}: {values}")
                break
    return problems


def test_criterion_07_stability_trend(capsys):
    start = time.perf_counter()
    cases = (
        ("isotropic", Isotropic(), lambda d: RadialGraph(1.0, [HarmonicTerm(2, 0, d)])),
        ("ellipsoid", Ellipsoid(Q), lambda d: WulffShape(1.0, perturbation=[HarmonicTerm(2, 0, d)])),
    )
    problems = []
    for label, g, make in cases:
        lam = lambda_min(g)
        base = full_report(g, make(0.0), r_values=(1.0,), lam=lam)
        reports = [full_report(g, make(d), r_values=(1.0,), lam=lam) for d in DELTAS]
        problems += _trend_problems(label, reports, base)
    elapsed = time.perf_counter() - start
    verdict(capsys, 7, not problems and elapsed <= 120.0,
            f"{len(TREND_FIELDS)} sequences x {len(cases)} families decreasing, {elapsed:.1f} s (<= 120 s)"
            + ("" if not problems else "; " + "; ".join(problems)))


def _suite_surfaces(g):
    axes = (2.0, 1.0, 0.7) if g.n == 2 else (2.0, 0.7)
    yield WulffShape(1.0)
    yield WulffShape(1.0, perturbation=[HarmonicTerm(2, 0, 0.1)])
    yield RoundSphere(1.0)
    yield EllipsoidSurface(axes)
    yield RadialGraph(1.0, [HarmonicTerm(2, 0, 0.2), HarmonicTerm(3, 1 if g.n == 2 else 0, -0.1)])


def test_criterion_08_pointwise_bound(capsys):
    margin = np.inf
    count = 0
    for g in FAMILIES:
        lam = lambda_min(g)
        for spec in _suite_surfaces(g):
            s = sample_surface(spec, g, make_grid(g.n, 48))
            margin = min(margin, float(np.min(s.s_gamma_frobenius / lam + 1e-8 - np.abs(s.H))))
            count += len(s)
    verdict(capsys, 8, margin >= 0.0, f"{count} nodes, min |S_gamma|/lam + 1e-8 - |H| = {margin:.3e} (>= 0)")


def test_criterion_09_exponents(capsys):
    a = exponents(2, 4)
    b = exponents(1, 2)
    ok = a == {"beta": 2.0, "alpha": 1.0 / 6.0} and b == {"beta": 1.0, "alpha": 0.25}
    verdict(capsys, 9, ok, f"exponents(2,4) = {a}, exponents(1,2) = {b}")


def test_criterion_10_fenchel(capsys):
    rng = np.random.default_rng(10)
    low, equality = np.inf, 0.0
    for g in FAMILIES:
        x = rng.normal(size=(10_000, g.dim))
        y = rng.normal(size=(10_000, g.dim))
        low = min(low, float(np.min(fenchel_gap(g, x, y))))
        nu = rng.normal(size=(1000, g.dim))
        nu /= np.linalg.norm(nu, axis=1, keepdims=True)
        equality = max(equality, float(np.max(np.abs(fenchel_gap(g, wulff_point(g, nu), nu)))))
    verdict(capsys, 10, low >= -1e-10 and equality <= 1e-8,
            f"min gap {low:.2e} (>= -1e-10), max gap at (xi(nu), nu) {equality:.2e} (<= 1e-8)")
