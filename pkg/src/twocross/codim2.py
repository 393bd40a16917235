"""Sliding on the codimension-2 stratum ``{x1 = x2 = 0}``.

The reduced fast system inside the blow-up box ``[-1, 1]^2`` decides
sliding: hyperbolic equilibria there persist as invariant manifolds of the
regularized field, and those manifolds collapse onto the stratum.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .bilinear import bilinear_zeros
from .fields import IDENTITY, SIGNS, PiecewiseField, SmoothField3, TransitionFunction, convex_weight
from .regularization import (
    POINTWISE,
    UNNORMALIZED,
    STRICT,
    BilinearXY,
    Regime,
    blowup_slow_eval,
    reduced_bilinear_system,
)

SADDLE = "saddle"
STABLE_NODE = "stable_node"
UNSTABLE_NODE = "unstable_node"
STABLE_FOCUS = "stable_focus"
UNSTABLE_FOCUS = "unstable_focus"
CENTER_BOUNDARY = "center_boundary"
DEGENERATE = "degenerate"

ATTRACTING = "attracting"
REPELLING = "repelling"
UNDECIDED = "undecided"

SLIDING = "SLIDING"
NO_EQUILIBRIUM = "NO_EQUILIBRIUM"
UNDETERMINED = "UNDETERMINED"

BOX_TOL = 1e-9


class UndefinedDrift(ValueError):
    pass


@dataclass(frozen=True)
class EquilibriumReport:
    location: tuple[float, float]
    jacobian: np.ndarray
    trace: float
    det: float
    type_tag: str
    in_unit_square: bool

    @classmethod
    def build(cls, location, jacobian, tol: float = 1e-9) -> "EquilibriumReport":
        J = np.asarray(jacobian, dtype=float)
        x, y = (float(v) for v in location)
        inside = abs(x) < 1.0 - BOX_TOL and abs(y) < 1.0 - BOX_TOL
        return cls((x, y), J, float(np.trace(J)), float(np.linalg.det(J)),
                   classify_equilibrium(J, tol), inside)


@dataclass
class SlidingVerdict:
    tag: str
    equilibria: list[EquilibriumReport] = field(default_factory=list)
    regime: Regime | None = None
    stabilities: list[str] = field(default_factory=list)
    criterion: str = ""
    indicator: list[float] = field(default_factory=list)
    note: str = ""

    @property
    def attracting(self) -> EquilibriumReport | None:
        for eq, st in zip(self.equilibria, self.stabilities):
            if st == ATTRACTING and eq.in_unit_square:
                return eq
        return None


# --------------------------------------------------------------------------
# linear classification

def classify_equilibrium(J, tol: float = 1e-9) -> str:
    J = np.asarray(J, dtype=float)
    tr = J[0, 0] + J[1, 1]
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    if det < -tol:
        return SADDLE
    if det <= tol:
        return DEGENERATE
    if abs(tr) <= tol:
        return CENTER_BOUNDARY
    focus = tr * tr - 4.0 * det < 0
    if tr < 0:
        return STABLE_FOCUS if focus else STABLE_NODE
    return UNSTABLE_FOCUS if focus else UNSTABLE_NODE


def stability_of(tag: str) -> str:
    if tag in (STABLE_NODE, STABLE_FOCUS):
        return ATTRACTING
    if tag in (UNSTABLE_NODE, UNSTABLE_FOCUS):
        return REPELLING
    if tag == SADDLE:
        return SADDLE
    return UNDECIDED


def ratio_regime_stability(b: BilinearXY, P, regime: Regime, tol: float = 1e-9) -> str:
    """Stability of equilibrium ``P`` of the reduced system under ``regime``.

    Limit regimes are probed on a ratio ladder; an answer is given only when
    all rungs agree.
    """
    answers = {stability_of(classify_equilibrium(b.jacobian(P[0], P[1], r), tol * min(1.0, r)))
               for r in regime.ladder}
    if len(answers) != 1:
        return UNDECIDED
    return answers.pop()


# --------------------------------------------------------------------------
# slow manifold of the blown-up system

def _slow_xy(pw, phi, K, x3, mode):
    def F(x, y):
        v = blowup_slow_eval(pw, phi, K, (x, y, x3), mode=mode, scaling=UNNORMALIZED)
        return np.array([v[0], v[1]])
    return F


def _fd_jacobian(F, x: float, y: float) -> np.ndarray:
    J = np.empty((2, 2))
    hx = 1e-6 * (1.0 + abs(x))
    hy = 1e-6 * (1.0 + abs(y))
    J[:, 0] = (F(x + hx, y) - F(x - hx, y)) / (2 * hx)
    J[:, 1] = (F(x, y + hy) - F(x, y - hy)) / (2 * hy)
    return J


def _fd_step(c: float) -> float:
    # stay inside the box: the transition function has kinks at +-1
    edge = 1.0 - abs(c)
    return min(1e-3, 0.5 * edge) if edge > 2e-6 else 1e-6


def _richardson_jacobian(F, x: float, y: float) -> np.ndarray:
    """Central differences at h and h/2 combined to fourth order."""
    def central(hx, hy):
        J = np.empty((2, 2))
        J[:, 0] = (F(x + hx, y) - F(x - hx, y)) / (2 * hx)
        J[:, 1] = (F(x, y + hy) - F(x, y - hy)) / (2 * hy)
        return J

    hx, hy = _fd_step(x), _fd_step(y)
    return (4.0 * central(0.5 * hx, 0.5 * hy) - central(hx, hy)) / 3.0


def _newton(F, x0: float, y0: float, maxit: int = 60):
    x, y = x0, y0
    r = F(x, y)
    nr = float(np.linalg.norm(r))
    for _ in range(maxit):
        if nr < 1e-13:
            break
        J = _fd_jacobian(F, x, y)
        try:
            dx, dy = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        while lam > 1e-4:
            xn, yn = x + lam * dx, y + lam * dy
            if abs(xn) <= 1.0 and abs(yn) <= 1.0:
                rn = F(xn, yn)
                nrn = float(np.linalg.norm(rn))
                if nrn < nr:
                    break
            lam *= 0.5
        else:
            break
        x, y, r, nr = xn, yn, rn, nrn
    return (x, y, nr)


def _box_filter(points, tol=BOX_TOL):
    return [(x, y) for x, y in points if abs(x) <= 1.0 + tol and abs(y) <= 1.0 + tol]


def slow_manifold_equilibria(
    pw: PiecewiseField,
    x3: float = 0.0,
    K: float = 1.0,
    mode: str = STRICT,
    phi: TransitionFunction = IDENTITY,
) -> list[tuple[float, float]]:
    """Zeros of the blown-up fast components in ``[-1, 1]^2`` at fixed ``x3``.

    Constant quadrant fields (or strict mode, where fields are frozen at the
    axis) give a bilinear system solved in closed form under the identity
    transition; otherwise damped Newton runs from a 9x9 seed grid.
    """
    if not K > 0:
        raise ValueError("K must be positive")
    frozen = pw.is_constant or mode == STRICT
    if frozen and phi.tag == "clamped-identity":
        if pw.is_constant:
            b = reduced_bilinear_system(pw)
        else:
            b = reduced_bilinear_system(constant_approximation(pw, (0.0, 0.0, x3))[0])
        roots = bilinear_zeros(b.eqx, b.eqy)
        return _box_filter(roots.points)
    F = _slow_xy(pw, phi, K, x3, mode)
    found: list[tuple[float, float]] = []
    for x0, y0 in itertools.product(np.linspace(-1, 1, 9), repeat=2):
        res = _newton(F, float(x0), float(y0))
        if res is None:
            continue
        x, y, nr = res
        if nr >= 1e-10 or abs(x) > 1.0 or abs(y) > 1.0:
            continue
        if all(np.hypot(x - a, y - b) > 1e-7 for a, b in found):
            found.append((x, y))
    found.sort()
    return found


def jacobian_D0(
    pw: PiecewiseField,
    point,
    x3: float = 0.0,
    K: float = 1.0,
    mode: str = STRICT,
    phi: TransitionFunction = IDENTITY,
) -> np.ndarray:
    """Jacobian of the unnormalized ``(X1, X2)`` with respect to ``(x1, x2)``."""
    x, y = float(point[0]), float(point[1])
    if (pw.is_constant or mode == STRICT) and phi.tag == "clamped-identity" and abs(x) < 1 and abs(y) < 1:
        fields = pw if pw.is_constant else constant_approximation(pw, (0.0, 0.0, x3))[0]
        b = reduced_bilinear_system(fields, Regime("fixed", 1.0 / K))
        return b.jacobian(x, y)
    return _richardson_jacobian(_slow_xy(pw, phi, K, x3, mode), x, y)


def sliding_indicator_D(
    pw: PiecewiseField,
    x3: float = 0.0,
    K: float = 1.0,
    mode: str = STRICT,
    phi: TransitionFunction = IDENTITY,
) -> list[tuple[tuple[float, float], float]]:
    """``trace * det`` of the slow Jacobian at each equilibrium; nonzero certifies sliding."""
    out = []
    for P in slow_manifold_equilibria(pw, x3, K, mode, phi):
        J = jacobian_D0(pw, P, x3, K, mode, phi)
        out.append((P, float(np.trace(J) * np.linalg.det(J))))
    return out


def indicator_at(pw, point, x3=0.0, K=1.0, mode=STRICT, phi=IDENTITY) -> float:
    J = jacobian_D0(pw, point, x3, K, mode, phi)
    return float(np.trace(J) * np.linalg.det(J))


def continue_equilibrium(pw, start, x3_values, K=1.0, mode=STRICT, phi=IDENTITY):
    """Follow one equilibrium branch through ``x3_values`` by Newton continuation.

    Returns ``[(x3, (x1*, x2*), D), ...]``.
    """
    x, y = (float(v) for v in start)
    out = []
    for z in x3_values:
        F = _slow_xy(pw, phi, K, float(z), mode)
        res = _newton(F, x, y)
        if res is None or res[2] >= 1e-10:
            raise ArithmeticError(f"continuation lost the branch at x3={z}")
        x, y, _ = res
        J = jacobian_D0(pw, (x, y), float(z), K, mode, phi)
        out.append((float(z), (x, y), float(np.trace(J) * np.linalg.det(J))))
    return out


# --------------------------------------------------------------------------
# verdicts

def sliding_verdict(pw: PiecewiseField, regime: Regime = Regime(), tol: float = 1e-9) -> SlidingVerdict:
    """Decide sliding on the whole codim-2 axis for constant quadrant fields."""
    if not pw.is_constant:
        raise ValueError("sliding_verdict needs constant fields; use constant_approximation first")
    _, _, c = pw.constant_arrays()
    if np.any(np.abs(c) <= tol):
        raise ValueError("third components must be nonzero constants")
    b = reduced_bilinear_system(pw, regime)
    roots = bilinear_zeros(b.eqx, b.eqy)
    reports = [EquilibriumReport.build(P, b.jacobian(*P), tol) for P in roots.points]
    stabs = [ratio_regime_stability(b, r.location, regime, tol) for r in reports]
    verdict = SlidingVerdict(UNDETERMINED, reports, regime, stabs, criterion="reduced equilibria")
    if roots.degenerate or roots.lines:
        verdict.note = "reduced system has a continuum of equilibria"
        return verdict
    on_edge = [r for r in reports
               if abs(abs(r.location[0]) - 1) <= BOX_TOL and abs(r.location[1]) <= 1 + BOX_TOL
               or abs(abs(r.location[1]) - 1) <= BOX_TOL and abs(r.location[0]) <= 1 + BOX_TOL]
    if on_edge:
        verdict.note = "equilibrium on the boundary of the blow-up box"
        return verdict
    inside = [i for i, r in enumerate(reports) if r.in_unit_square]
    if len(inside) == 2:
        verdict.tag = SLIDING
        verdict.note = "two equilibria in the box; one is a saddle"
    elif len(inside) == 1:
        st = stabs[inside[0]]
        if st in (ATTRACTING, REPELLING):
            verdict.tag = SLIDING
            verdict.note = f"single {st} hyperbolic equilibrium"
        else:
            verdict.note = f"single equilibrium is {reports[inside[0]].type_tag} ({st})"
    else:
        verdict.tag = NO_EQUILIBRIUM
        verdict.note = "no equilibrium in the box; no sliding certified"
    return verdict


def constant_approximation(pw: PiecewiseField, p0, tol: float = 1e-9) -> tuple[PiecewiseField, bool]:
    """Freeze every quadrant field at ``p0``.

    The flag is true when all frozen fields have nonzero components, the
    condition under which the frozen system has the same sliding region.
    """
    vals = pw.values_at(p0)
    frozen = PiecewiseField({s: SmoothField3.constant(*map(float, vals[s])) for s in SIGNS})
    valid = all(abs(vals[s][i]) > tol for s in SIGNS for i in range(3))
    return frozen, valid


def codim2_drift(pw: PiecewiseField, x3: float, regime: Regime = Regime(), verdict: SlidingVerdict | None = None) -> float:
    """``x3`` rate on the codim-2 axis: convex-weighted ``h_s`` at the attracting equilibrium."""
    frozen, _ = constant_approximation(pw, (0.0, 0.0, x3))
    if verdict is None:
        verdict = sliding_verdict(frozen, regime)
    eq = verdict.attracting
    if verdict.tag != SLIDING or eq is None:
        raise UndefinedDrift("no attracting equilibrium of the reduced system")
    u, v = eq.location
    return float(sum(convex_weight(s, u, v) * pw[s].comp3(0.0, 0.0, x3) for s in SIGNS))


def axis_verdict(
    pw: PiecewiseField,
    x3: float = 0.0,
    regime: Regime = Regime(),
    K: float = 1.0,
    mode: str = STRICT,
    phi: TransitionFunction = IDENTITY,
    tol: float = 1e-9,
) -> SlidingVerdict:
    """Sliding verdict at ``(0, 0, x3)`` for any piecewise field.

    Constant fields go straight to :func:`sliding_verdict`. Otherwise the
    fields are frozen at the point; when the frozen system is a valid
    stand-in its verdict is returned, else the trace-det indicator of the
    slow system decides (any equilibrium with ``D != 0`` certifies sliding).
    """
    if pw.is_constant:
        v = sliding_verdict(pw, regime, tol)
        v.indicator = [r.trace * r.det for r in v.equilibria]
        return v
    frozen, valid = constant_approximation(pw, (0.0, 0.0, x3), tol)
    if valid:
        v = sliding_verdict(frozen, regime, tol)
        v.criterion = "frozen constant fields"
        v.indicator = [r.trace * r.det for r in v.equilibria]
        return v
    entries = sliding_indicator_D(pw, x3, K, mode, phi)
    reports = [EquilibriumReport.build(P, jacobian_D0(pw, P, x3, K, mode, phi), tol) for P, _ in entries]
    v = SlidingVerdict(UNDETERMINED, reports, regime, [stability_of(r.type_tag) for r in reports],
                       criterion="trace-det indicator", indicator=[D for _, D in entries])
    hits = [D for (P, D) in entries if abs(D) > tol and max(abs(P[0]), abs(P[1])) < 1.0 - BOX_TOL]
    if hits:
        v.tag = SLIDING
        v.note = "equilibrium of the slow system with nonzero trace*det"
    elif not entries:
        v.tag = NO_EQUILIBRIUM
        v.note = "slow system has no equilibrium in the box; no sliding certified"
    else:
        v.note = "indicator vanishes at every equilibrium"
    return v
