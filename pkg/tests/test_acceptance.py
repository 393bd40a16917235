"""Acceptance gate: one pass/fail line per criterion.

Each test records a line in ``RESULTS`` before asserting; ``conftest.py``
prints the collected lines at the end of the pytest run. Run this file
directly for the summary alone.
"""
import math
import sys
import time

import numpy as np
import pytest

from oracles import polynomial_D_formula, radical_exact
from twocross.bilinear import bilinear_zeros
from twocross.cli import parse_model
from twocross.codim2 import (
    ATTRACTING,
    REPELLING,
    SLIDING,
    continue_equilibrium,
    jacobian_D0,
    ratio_regime_stability,
    sliding_verdict,
    slow_manifold_equilibria,
)
from twocross.fields import CUBIC, IDENTITY, SIGNS, PiecewiseField, SmoothField3, convex_weight
from twocross.filippov import SLIDING as SLIDING1, classify_codim1, sliding_field_codim1
from twocross.integrator import (
    CROSS,
    PIN_SIGMA00,
    SLIDE_ENTER,
    convergence_probe,
    integrate_piecewise,
    integrate_regularized,
)
from twocross.kernels import rk4_quadratic
from twocross.quadratic import (
    QuadSystem,
    affine_normalize,
    bifurcation_region,
    equilibria_quadratic,
    bt_family_unfolding,
    return_map,
)
from twocross.regularization import POINTWISE, BilinearXY, Regime, reduced_bilinear_system, regularized_eval

from conftest import model_path

RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> bool:
    RESULTS[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[n])
    return ok


def _model(name):
    return parse_model(model_path(name))


def _rel(a, b):
    return abs(a - b) / abs(b)


# ---------------------------------------------------------------- 1
def test_criterion_01_d_indicator_golden():
    pw = _model("polynomial")
    t0 = time.perf_counter()
    pts = slow_manifold_equilibria(pw, 0.0, 1.0, POINTWISE)
    P = min(pts, key=lambda p: math.hypot(*p))
    J = jacobian_D0(pw, P, 0.0, 1.0, POINTWISE)
    elapsed = time.perf_counter() - t0
    tr, det = float(np.trace(J)), float(np.linalg.det(J))
    D = tr * det
    ok = (math.hypot(*P) < 1e-9 and _rel(D, -84) < 1e-9 and _rel(tr, -7) < 1e-9
          and _rel(det, 12) < 1e-9 and elapsed < 1.0)
    assert record(1, ok, f"D={D:.12g} trace={tr:.12g} det={det:.12g} time={elapsed:.3f}s")


# ---------------------------------------------------------------- 2
def test_criterion_02_d_along_branch():
    pw = _model("polynomial")
    worst, parts = 0.0, []
    for sign in (-1, 1):
        zs = sign * np.linspace(0.0, 0.1, 21)[1:]
        for z, _, D in continue_equilibrium(pw, (0.0, 0.0), zs, 1.0, POINTWISE):
            if min(abs(abs(z) - 0.05), abs(abs(z) - 0.1)) < 1e-12:
                r = _rel(D, polynomial_D_formula(z))
                worst = max(worst, r)
                parts.append(f"z={z:+.2f}:{r:.1e}")
    assert record(2, worst < 1e-5, f"max relative mismatch {worst:.2e} ({', '.join(parts)}); tol 1e-5")


# ---------------------------------------------------------------- 3
SEWING_EVENTS = [
    (450 / 59, (395 / 236, 0.0)),
    (458100 / 36757, (0.0, -395 / 1246)),
    (1779300 / 140066, (0.0, 0.0)),
]


def test_criterion_03_trajectory_golden():
    pw = _model("sewing_slide")
    t0 = time.perf_counter()
    tr = integrate_piecewise(pw, (0.5, 0.5, 0.0), 13.0, step=1e-3, event_tol=1e-10)
    elapsed = time.perf_counter() - t0
    got = [e for e in tr.events if e.kind in (CROSS, SLIDE_ENTER, PIN_SIGMA00)]
    kinds_ok = [e.kind for e in got] == [CROSS, SLIDE_ENTER, PIN_SIGMA00]
    err = max(max(abs(e.time - t), abs(e.point[0] - p[0]), abs(e.point[1] - p[1]))
              for e, (t, p) in zip(got, SEWING_EVENTS)) if kinds_ok else math.inf
    sf = sliding_field_codim1(pw, (0.0, -0.2, 0.0)).field_value
    sf_err = float(np.max(np.abs(sf - np.array([0.0, 1187 / 900, 1.0]))))
    ok = kinds_ok and err < 1e-6 and sf_err < 1e-12 and elapsed < 1.0
    assert record(3, ok, f"event error {err:.1e}, sliding field error {sf_err:.1e}, time={elapsed:.3f}s")


# ---------------------------------------------------------------- 4
def test_criterion_04_regime_stability():
    pw = _model("radical")
    b = reduced_bilinear_system(pw)
    _, _, radicals = radical_exact()
    exact = tuple(float(v.evalf(30)) for v in radicals)
    pts = slow_manifold_equilibria(pw)
    P = min(pts, key=lambda p: math.hypot(p[0] - exact[0], p[1] - exact[1]))
    resid = abs(P[0] * P[1] - 191 / 450)
    near = max(abs(P[0] - 0.69395), abs(P[1] - 0.61158)) < 1e-4
    radical_err = max(abs(P[0] - exact[0]), abs(P[1] - exact[1]))
    regimes = [Regime("fixed", 1.0), Regime("to_infinity"), Regime("to_zero")]
    stab = [ratio_regime_stability(b, P, r) for r in regimes]
    verdicts = [sliding_verdict(pw, r).tag for r in regimes]
    ok = (resid < 1e-9 and near and radical_err < 1e-9
          and stab == [ATTRACTING, ATTRACTING, REPELLING] and verdicts == [SLIDING] * 3)
    assert record(4, ok, f"P=({P[0]:.7f}, {P[1]:.7f}) residual {resid:.1e}; stabilities {stab}; verdicts {verdicts}")


# ---------------------------------------------------------------- 5
def test_criterion_05_bt_degeneracy():
    pw = _model("bt_family")
    pts = slow_manifold_equilibria(pw)
    unique = len(pts) == 1 and max(abs(pts[0][0] - 2 / 3), abs(pts[0][1] - 2 / 3)) < 1e-9
    J = jacobian_D0(pw, (2 / 3, 2 / 3))
    degenerate = abs(np.trace(J)) < 1e-9 and abs(np.linalg.det(J)) < 1e-9
    mu0, nu0 = bt_family_unfolding(0.0, 0.0)
    mu, nu = bt_family_unfolding(-0.06, 0.04)
    unfold = (mu0, nu0) == (0.0, 0.0) and abs(mu - 0.0372) < 1e-12 and abs(nu + 0.18) < 1e-12
    region = bifurcation_region(-0.06, 0.04)
    ok = unique and degenerate and unfold and region == "III"
    assert record(5, ok, f"unique={unique} double-zero={degenerate} (mu,nu)=({mu:.4g},{nu:.4g}) "
                         f"region(-0.06,0.04)={region} (expected III)")


# ---------------------------------------------------------------- 6
def test_criterion_06_one_saddle():
    rng = np.random.default_rng(2024)
    n = fails = 0
    while n < 1000:
        b = BilinearXY(tuple(rng.normal(size=4)), tuple(rng.normal(size=4)))
        pts = bilinear_zeros(b.eqx, b.eqy).points
        if len(pts) != 2 or math.hypot(pts[0][0] - pts[1][0], pts[0][1] - pts[1][1]) < 1e-6:
            continue
        dets = [np.linalg.det(b.jacobian(*p)) for p in pts]
        fails += sum(d < 0 for d in dets) != 1
        n += 1
    assert record(6, fails == 0, f"{n} systems, {fails} failures")


# ---------------------------------------------------------------- 7
def _random_case(rng, case):
    A, B, C, D = rng.uniform(0.3, 2, 4) * rng.choice([-1, 1], 4)
    a, b, c, d = rng.uniform(-2, 2, 4)
    if case == "II":
        d = b
    if case == "III":
        c = a
    return QuadSystem(A, B, C, D, a, b, c, d)


def test_criterion_07_affine_equivalence():
    rng = np.random.default_rng(7)
    h, steps = 1e-3, 1000
    worst_res = worst_conj = 0.0
    tags_ok = True
    compared = 0
    for case in ("I", "II", "III"):
        for _ in range(200):
            q = _random_case(rng, case)
            m = affine_normalize(q)
            tags_ok &= m.case_tag == case
            worst_res = max(worst_res, m.residual(q))
            X0 = rng.uniform(-0.2, 0.2, 2)
            x0 = np.array(m.to_original(*X0))
            orig = rk4_quadratic(q.coeffs(), x0, h, steps, 1e6)
            norm = rk4_quadratic(m.normalized.coeffs(), X0, m.kappa * h, steps, 1e6)
            if len(orig) < steps + 1 or len(norm) < steps + 1:
                continue  # finite-time blow-up before the horizon
            mapped = np.array([m.to_normalized(*p) for p in orig])
            worst_conj = max(worst_conj, float(np.max(np.abs(mapped - norm))))
            compared += 1
    ok = tags_ok and worst_res < 1e-10 and worst_conj < 1e-8 and compared >= 500
    assert record(7, ok, f"600 systems: max residual {worst_res:.1e}; {compared} bounded orbits, "
                         f"max conjugacy residual {worst_conj:.1e}")


# ---------------------------------------------------------------- 8
def test_criterion_08_center():
    q = QuadSystem.normal_form("II", B=-2.0, D=-1.0)
    pts = equilibria_quadratic(q).points
    eq_ok = len(pts) == 1 and max(abs(pts[0][0] - 2), abs(pts[0][1] + 1)) < 1e-12
    ev = np.sort_complex(np.linalg.eigvals(q.jacobian(2.0, -1.0)))
    ev_err = float(np.max(np.abs(ev - np.array([-1j, 1j]))))
    disp = {r0: abs(return_map(q, (2.0, -1.0), r0, tol=1e-10) - r0) for r0 in (0.01, 0.05, 0.1)}
    ok = eq_ok and ev_err < 1e-10 and all(d < 1e-5 for d in disp.values())
    shown = ", ".join(f"r0={r}:{d:.1e}" for r, d in disp.items())
    assert record(8, ok, f"equilibrium ok={eq_ok}, eigenvalue error {ev_err:.1e}, return displacement {shown}; tol 1e-5")


# ---------------------------------------------------------------- 9
LADDER = [(0.1, 0.1), (0.05, 0.05), (0.01, 0.01)]


def test_criterion_09_convergence_probe():
    d61 = [r.distance for r in convergence_probe(_model("relay"), IDENTITY, (1, 1, 0), LADDER, 5.0)]
    d1 = [r.distance for r in convergence_probe(_model("bt_family_region1"), IDENTITY, (0.05, 0.05, 0), LADDER, 5.0)]
    decreasing = all(a > b for a, b in zip(d61, d61[1:]))
    within = all(d <= e for d, (e, _) in zip(d61, LADDER))
    bounded = min(d1) > 0.05
    ok = decreasing and within and bounded
    assert record(9, ok, "sliding " + ", ".join(f"{d:.1e}" for d in d61)
                  + "; region I " + ", ".join(f"{d:.3f}" for d in d1))


# ---------------------------------------------------------------- 10
def _drift_field():
    c = SmoothField3.constant
    return PiecewiseField({
        (1, 1): SmoothField3.from_text("-1", "1 + x1", "1"),
        (-1, 1): SmoothField3.from_text("3", "1 + x1", "1"),
        (1, -1): c(-1, 1, 1),
        (-1, -1): c(3, 1, 1),
    })


def test_criterion_10_invariants():
    rng = np.random.default_rng(10)
    # partition of unity
    pu = max(abs(sum(convex_weight(s, u, v) for s in SIGNS) - 1.0) for u, v in rng.uniform(-1, 1, (2000, 2)))
    # outside-band exactness
    pw = _model("sewing_slide")
    exact = True
    for p in rng.uniform(-2, 2, (500, 3)):
        eps, eta = rng.uniform(0.01, 0.5, 2)
        if abs(p[0]) < eps or abs(p[1]) < eta:
            continue
        s = (1 if p[0] > 0 else -1, 1 if p[1] > 0 else -1)
        for phi in (IDENTITY, CUBIC):
            exact &= bool(np.array_equal(regularized_eval(pw, phi, eps, eta, p), pw.eval(s, p)))
    # sliding-field tangency on random constant fields
    tang = 0.0
    for _ in range(500):
        vals = rng.uniform(-2, 2, (4, 3))
        f = PiecewiseField.constant({s: tuple(vals[i]) for i, s in enumerate(SIGNS)})
        for p in ((0.0, 0.7, 0.0), (0.4, 0.0, 0.0)):
            if classify_codim1(f, p).tag == SLIDING1:
                v = sliding_field_codim1(f, p).field_value
                tang = max(tang, abs(v[0] if p[0] == 0.0 else v[1]))
    # regularized vs Filippov drift: error should scale with eps
    dpw = _drift_field()
    x0, T = (0.3, 0.5, 0.0), 1.0
    ref = integrate_piecewise(dpw, x0, T, step=1e-3).final.position[1]
    errs = []
    for eps in (1e-2, 1e-3):
        reg = integrate_regularized(dpw, IDENTITY, eps, eps, x0, T, step=min(1e-3, eps / 10))
        errs.append(abs(reg.final.position[1] - ref))
    ratio = errs[0] / errs[1]
    ok = pu <= 1e-14 and exact and tang <= 1e-12 and 10 / 3 <= ratio <= 30
    assert record(10, ok, f"partition {pu:.1e}, outside-band exact={exact}, tangency {tang:.1e}, "
                          f"drift errors {errs[0]:.2e}/{errs[1]:.2e} ratio {ratio:.2f}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
