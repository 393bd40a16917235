"""Planar quadratic systems ``x' = A(x-a)(y-b) - B``, ``y' = C(x-c)(y-d) - D``.

Covers the affine normal forms (cases I-VI), closed-form equilibria, the
center condition for cases II/III, the Bogdanov-Takens reduction of case I
and the local bifurcation diagram of the two-parameter example family.

Planar quadratic fields are handled as 12-vectors: the coefficients of the
monomials ``1, x, y, x^2, xy, y^2`` in the first equation, then the second.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bilinear import bilinear_zeros
from .codim2 import SADDLE, classify_equilibrium
from .kernels import rk4_quadratic

CASES = ("I", "II", "III", "IV", "V", "VI")


class ClassificationError(ValueError):
    pass


# --------------------------------------------------------------------------
# monomial algebra

def _lin_mul(a, b) -> np.ndarray:
    """Product of two affine forms ``a0 + a1 X + a2 Y`` as a 6-vector."""
    return np.array([
        a[0] * b[0],
        a[0] * b[1] + a[1] * b[0],
        a[0] * b[2] + a[2] * b[0],
        a[1] * b[1],
        a[1] * b[2] + a[2] * b[1],
        a[2] * b[2],
    ])


def compose_affine(p6, l1, l2) -> np.ndarray:
    """``p(l1(X, Y), l2(X, Y))`` for a quadratic ``p`` and affine forms ``l1``, ``l2``."""
    one = np.array([1.0, 0, 0, 0, 0, 0])
    L1 = np.array([l1[0], l1[1], l1[2], 0, 0, 0], dtype=float)
    L2 = np.array([l2[0], l2[1], l2[2], 0, 0, 0], dtype=float)
    return (p6[0] * one + p6[1] * L1 + p6[2] * L2
            + p6[3] * _lin_mul(l1, l1) + p6[4] * _lin_mul(l1, l2) + p6[5] * _lin_mul(l2, l2))


def pullback(coeffs12, M, t, kappa: float = 1.0) -> np.ndarray:
    """Field in coordinates ``X`` where ``x = M X + t`` and ``T = kappa * time``."""
    M = np.asarray(M, dtype=float)
    t = np.asarray(t, dtype=float)
    c = np.asarray(coeffs12, dtype=float)
    l1 = (t[0], M[0, 0], M[0, 1])
    l2 = (t[1], M[1, 0], M[1, 1])
    f = compose_affine(c[:6], l1, l2)
    g = compose_affine(c[6:], l1, l2)
    Minv = np.linalg.inv(M)
    return np.concatenate([Minv[0, 0] * f + Minv[0, 1] * g, Minv[1, 0] * f + Minv[1, 1] * g]) / kappa


def eval_coeffs(c, x: float, y: float) -> tuple[float, float]:
    m = (1.0, x, y, x * x, x * y, y * y)
    return (sum(c[i] * m[i] for i in range(6)), sum(c[6 + i] * m[i] for i in range(6)))


def jac_coeffs(c, x: float, y: float) -> np.ndarray:
    return np.array([
        [c[1] + 2 * c[3] * x + c[4] * y, c[2] + c[4] * x + 2 * c[5] * y],
        [c[7] + 2 * c[9] * x + c[10] * y, c[8] + c[10] * x + 2 * c[11] * y],
    ])


# --------------------------------------------------------------------------
# system and normal forms

@dataclass(frozen=True)
class QuadSystem:
    A: float
    B: float
    C: float
    D: float
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if self.A == 0 or self.C == 0:
            raise ValueError("A and C must be nonzero")

    def bilinear(self):
        A, B, C, D, a, b, c, d = self.A, self.B, self.C, self.D, self.a, self.b, self.c, self.d
        return (A * a * b - B, -A * b, -A * a, A), (C * c * d - D, -C * d, -C * c, C)

    def coeffs(self) -> np.ndarray:
        fx, fy = self.bilinear()
        return np.array([fx[0], fx[1], fx[2], 0, fx[3], 0, fy[0], fy[1], fy[2], 0, fy[3], 0], dtype=float)

    def rhs(self, x: float, y: float) -> tuple[float, float]:
        return (self.A * (x - self.a) * (y - self.b) - self.B,
                self.C * (x - self.c) * (y - self.d) - self.D)

    def jacobian(self, x: float, y: float) -> np.ndarray:
        return np.array([[self.A * (y - self.b), self.A * (x - self.a)],
                         [self.C * (y - self.d), self.C * (x - self.c)]])

    @classmethod
    def normal_form(cls, case: str, B: float = 0.0, C: float = 1.0, D: float = 0.0) -> "QuadSystem":
        if case == "I":
            return cls(1.0, B, C, D, 0.0, 0.0, 1.0, 1.0)
        if case == "II":
            return cls(1.0, B, 1.0, D, 0.0, 0.0, 1.0, 0.0)
        if case == "III":
            return cls(1.0, B, 1.0, D, 0.0, 0.0, 0.0, 1.0)
        if case == "IV":
            return cls(1.0, B, 1.0, D, 0.0, 0.0, 0.0, 0.0)
        if case == "V":
            return cls(1.0, 0.0, C, D, 0.0, 0.0, 0.0, 0.0)
        if case == "VI":
            return cls(1.0, 0.0, C, 0.0, 0.0, 0.0, 0.0, 0.0)
        raise ValueError(f"unknown case {case!r}")


def _same(p: float, q: float, tol: float) -> bool:
    return abs(p - q) <= tol * max(1.0, abs(p), abs(q))


def affine_classify(q: QuadSystem, tol: float = 1e-9) -> str:
    ac = _same(q.a, q.c, tol)
    bd = _same(q.b, q.d, tol)
    if not ac and not bd:
        return "I"
    if not ac:
        return "II"
    if not bd:
        return "III"
    if abs(q.B) > tol:
        return "IV"
    if abs(q.D) > tol:
        return "V"
    return "VI"


@dataclass(frozen=True)
class AffineNormalization:
    """Map ``x = u X + v``, ``y = w Y + r`` and time ``T = kappa t`` onto a normal form."""

    case_tag: str
    params: dict
    u: float
    v: float
    w: float
    r: float
    kappa: float

    @property
    def normalized(self) -> QuadSystem:
        return QuadSystem.normal_form(self.case_tag, **self.params)

    def to_normalized(self, x: float, y: float) -> tuple[float, float]:
        return (x - self.v) / self.u, (y - self.r) / self.w

    def to_original(self, X: float, Y: float) -> tuple[float, float]:
        return self.u * X + self.v, self.w * Y + self.r

    def transformed(self, q: QuadSystem) -> np.ndarray:
        """Coefficients of ``q`` after applying this map (should equal the normal form)."""
        return pullback(q.coeffs(), np.diag([self.u, self.w]), (self.v, self.r), self.kappa)

    def residual(self, q: QuadSystem) -> float:
        """Largest coefficient mismatch, relative to the largest normal-form coefficient (at least 1)."""
        target = self.normalized.coeffs()
        scale = max(1.0, float(np.max(np.abs(target))))
        return float(np.max(np.abs(self.transformed(q) - target))) / scale


def affine_normalize(q: QuadSystem, tol: float = 1e-9) -> AffineNormalization:
    case = affine_classify(q, tol)
    A, B, C, D = q.A, q.B, q.C, q.D
    v, r = q.a, q.b
    if case == "I":
        u, w = q.c - q.a, q.d - q.b
        kappa = A * w
        params = {"B": B / (u * kappa), "C": C * u / kappa, "D": D / (w * kappa)}
    elif case == "II":
        u = q.c - q.a
        kappa = C * u
        w = kappa / A
        params = {"B": B / (u * kappa), "D": D / (w * kappa)}
    elif case == "III":
        w = q.d - q.b
        kappa = A * w
        u = kappa / C
        params = {"B": B / (u * kappa), "D": D / (w * kappa)}
    elif case == "IV":
        if B == 0:
            raise ClassificationError("case IV requires B != 0")
        w = math.sqrt(abs(B * C)) / abs(A)
        kappa = A * w
        u = kappa / C
        params = {"B": B / (u * kappa), "D": D / (w * kappa)}
    elif case == "V":
        if D == 0:
            raise ClassificationError("case V requires D != 0")
        u = 1.0
        w = math.sqrt(abs(D / A))
        kappa = A * w
        params = {"C": C * u / kappa, "D": D / (w * kappa)}
    else:
        u = w = 1.0
        kappa = A
        params = {"C": C / A}
    if u == 0 or w == 0 or kappa == 0:
        raise ClassificationError(f"degenerate map for case {case}")
    return AffineNormalization(case, params, u, v, w, r, kappa)


# --------------------------------------------------------------------------
# equilibria and centers

@dataclass
class EquilibriumSet:
    points: list[tuple[float, float]] = field(default_factory=list)
    # ('x', c) means the line x = c; ('y', c) the line y = c
    lines: list[tuple[str, float]] = field(default_factory=list)


def equilibria_quadratic(q: QuadSystem) -> EquilibriumSet:
    fx, fy = q.bilinear()
    roots = bilinear_zeros(fx, fy)
    out = EquilibriumSet(list(roots.points), [("y", c) for c in roots.lines])
    if roots.degenerate or not (roots.points or roots.lines):
        swap = lambda c: (c[0], c[2], c[1], c[3])  # noqa: E731
        alt = bilinear_zeros(swap(fx), swap(fy))
        for c in alt.lines:
            out.lines.append(("x", c))
        if roots.degenerate:
            out.points = [(y, x) for x, y in alt.points]
    return out


def center_check(case_tag: str, B: float, D: float, tol: float = 1e-10) -> bool:
    """Center condition of the normalized case II/III systems."""
    if case_tag == "II":
        return D < 0 and abs(B - (D - math.sqrt(-D))) <= tol
    if case_tag == "III":
        return B < 0 and abs(D - (B - math.sqrt(-B))) <= tol
    raise ValueError("center_check applies to cases II and III only")


def return_map(q: QuadSystem, P, r0: float, tol: float = 1e-10, tmax: float = 200.0) -> float:
    """Radius of first return to the ray ``{y = P_y, x > P_x}`` starting at ``P + (r0, 0)``."""
    from scipy.integrate import solve_ivp

    px, py = float(P[0]), float(P[1])

    def f(t, s):
        return q.rhs(s[0], s[1])

    x0 = (px + r0, py)
    direction = math.copysign(1.0, q.rhs(*x0)[1])
    # leave the section before arming the event
    period_guess = 2 * math.pi / math.sqrt(max(abs(np.linalg.det(q.jacobian(px, py))), 1e-12))
    t1 = 0.25 * period_guess
    first = solve_ivp(f, (0.0, t1), x0, method="DOP853", rtol=tol, atol=tol)

    def section(t, s):
        return s[1] - py if s[0] > px else direction * 1.0

    section.terminal = True
    section.direction = direction
    second = solve_ivp(f, (t1, tmax), first.y[:, -1], method="DOP853", rtol=tol, atol=tol, events=section)
    if not second.t_events[0].size:
        raise ArithmeticError("orbit did not return to the section")
    xr = second.y_events[0][0]
    return float(xr[0] - px)


# --------------------------------------------------------------------------
# Bogdanov-Takens reduction of case I

@dataclass(frozen=True)
class BTCoefficients:
    """``x' = y``, ``y' = b00 + b01 y + b20 x^2 + b11 x y + y^2`` (up to cubic terms)."""

    b00: float
    b01: float
    b20: float
    b11: float
    residual: float = 0.0


def bt_chain(C: float, B1: float, D1: float) -> np.ndarray:
    """Run the case-I coordinate chain; returns the final 12 coefficients."""
    if C in (-1.0, 0.0, 1.0):
        raise ValueError("C must differ from -1, 0 and 1")
    B = B1 + C * C / (1 + C) ** 2
    D = D1 + C / (1 + C) ** 2
    c = QuadSystem.normal_form("I", B=B, C=C, D=D).coeffs()
    c0 = C / (1 + C)
    # move the degenerate equilibrium to the origin and rescale time
    c = pullback(c, np.eye(2), (c0, c0), C / (1 + C))
    # Jordan basis of the linear part
    c = pullback(c, [[1.0, 1.0 / (1 + C)], [-1.0, C / (1 + C)]], (0.0, 0.0))
    k = (B1 * C - D1) / C
    c = pullback(c, np.eye(2), (0.0, k))
    alpha1 = -(C + 1) ** 2 / C
    alpha2 = (C - 1.0 / C) * k
    c = pullback(c, np.eye(2), (-alpha2 / (2 * alpha1), 0.0))
    return c


def bt_normal_form(C: float, B1: float, D1: float) -> BTCoefficients:
    """Normal-form coefficients near the double-zero point of case I.

    ``B = B1 + C^2/(1+C)^2`` and ``D = D1 + C/(1+C)^2``; at ``B1 = D1 = 0``
    the equilibrium ``(C/(1+C), C/(1+C))`` has a double zero eigenvalue.
    All coefficients are read off the transformed system; ``residual``
    is the largest deviation from the announced shape (``x' = y`` exactly,
    no ``x`` term and unit ``y^2`` term in the second equation).
    """
    c = bt_chain(C, B1, D1)
    first = c[:6] - np.array([0, 0, 1.0, 0, 0, 0])
    resid = max(float(np.max(np.abs(first))), abs(c[7]), abs(c[11] - 1.0))
    return BTCoefficients(b00=float(c[6]), b01=float(c[8]), b20=float(c[9]), b11=float(c[10]), residual=resid)


def bt_family_unfolding(alpha: float, beta: float) -> tuple[float, float]:
    """Unfolding parameters ``(mu, nu)`` of the example family."""
    mu = (-1.5 * beta + 9 / 8 * alpha**2 - 9 / 8 * alpha * beta + 9 / 32 * beta**2 - 1.5 * alpha)
    nu = 9 / 4 * (alpha - beta / 2)
    return mu, nu


# --------------------------------------------------------------------------
# bifurcation regions of the example family

REGIONS = ("I", "S", "II", "H", "III", "C_approx", "IV", "BT_origin")


def bt_family_system(alpha: float, beta: float) -> QuadSystem:
    """Reduced xy-system of the example family at ``eps = eta``."""
    return QuadSystem(1.0, 4 / 9 + alpha, 2.0, 2 / 9 + beta, 0.0, 0.0, 1.0, 1.0)


def saddle_node_discriminant(alpha: float, beta: float) -> float:
    return 36 * alpha**2 - 36 * alpha * beta + 9 * beta**2 - 48 * alpha - 48 * beta


def detect_repelling_cycle(q: QuadSystem, focus, window: float = 200.0, step: float = 1e-2,
                           radius: float = 1e-3, bound: float = 10.0) -> str:
    """Backward-time probe around an attracting focus.

    Returns ``'cycle'`` when the backward orbit settles on a closed curve
    (successive section radii within ``radius``), ``'escape'`` when it
    leaves the ``bound`` box, ``'inconclusive'`` otherwise.
    """
    px, py = focus
    n = int(round(window / step))
    orbit = rk4_quadratic(-q.coeffs(), (px + 1e-2, py), step, n, bound)
    if len(orbit) < n + 1:
        return "escape"
    rel = orbit - np.array([px, py])
    # crossings of the ray {y = py, x > px}
    s = rel[:, 1]
    idx = np.nonzero((s[:-1] < 0) & (s[1:] >= 0) & (rel[:-1, 0] > 0))[0]
    if idx.size < 4:
        return "inconclusive"
    th = s[idx] / (s[idx] - s[idx + 1])
    radii = rel[idx, 0] + th * (rel[idx + 1, 0] - rel[idx, 0])
    steps = np.abs(np.diff(radii[-4:]))
    # a slowly unwinding spiral also has small steps, but they grow
    if steps[-1] < radius and np.all(np.diff(steps) < 0):
        return "cycle"
    return "inconclusive"


def bifurcation_region(alpha: float, beta: float, tol: float = 1e-9) -> str:
    if abs(alpha) <= tol and abs(beta) <= tol:
        return "BT_origin"
    delta = saddle_node_discriminant(alpha, beta)
    if delta < -tol:
        return "I"
    if abs(delta) <= tol:
        return "S"
    q = bt_family_system(alpha, beta)
    eqs = equilibria_quadratic(q).points
    tags = [classify_equilibrium(q.jacobian(*p), tol) for p in eqs]
    others = [(p, t) for p, t in zip(eqs, tags) if t != SADDLE]
    if len(eqs) != 2 or len(others) != 1:
        return "C_approx"
    P, _ = others[0]
    tr = float(np.trace(q.jacobian(*P)))
    if abs(tr) <= tol:
        return "H"
    if tr > 0:
        return "II"
    probe = detect_repelling_cycle(q, P)
    if probe == "cycle":
        return "III"
    if probe == "escape":
        return "IV"
    return "C_approx"
