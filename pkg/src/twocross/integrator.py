"""Event-driven Filippov integration, regularized integration and the convergence probe."""
from __future__ import annotations

import csv
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .codim2 import SLIDING, UndefinedDrift, codim2_drift, constant_approximation, sliding_verdict
from .fields import CUBIC, IDENTITY, PiecewiseField, Stratum, TransitionFunction
from .filippov import (
    EXIT_MINUS,
    EXIT_PLUS,
    SEWING,
    SLIDING as SLIDING1,
    TangencyError,
    adjacent_pair,
    classify_codim1,
)
from .kernels import rk4_regularized_constant
from .regularization import Regime, regularized_eval

FLOW = "FLOW"
SLIDE1 = "SLIDE1"
PINNED = "PINNED"
REGULARIZED = "REG"

CROSS = "CROSS"
SLIDE_ENTER = "SLIDE_ENTER"
SLIDE_EXIT = "SLIDE_EXIT"
PIN_SIGMA00 = "PIN_SIGMA00"
UNPIN = "UNPIN"
STOP = "STOP"

CHATTER_EVENTS = 100


class StiffnessError(ArithmeticError):
    pass


@dataclass(frozen=True)
class TrajectoryState:
    time: float
    position: tuple[float, float, float]
    mode: str
    stratum: Stratum

    @property
    def label(self) -> str:
        return f"{self.mode}[{self.stratum}]"


@dataclass(frozen=True)
class Event:
    kind: str
    time: float
    point: tuple[float, float, float]
    note: str = ""


@dataclass
class Trajectory:
    states: list[TrajectoryState] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    options: dict = field(default_factory=dict)

    @property
    def final(self) -> TrajectoryState:
        return self.states[-1]

    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.states])

    def positions(self) -> np.ndarray:
        return np.array([s.position for s in self.states])

    def events_of(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "x1", "x2", "x3", "mode"])
            for s in self.states:
                w.writerow([f"{s.time:.17g}", *(f"{v:.17g}" for v in s.position), s.label])

    def write_events_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "kind", "x1", "x2", "x3"])
            for e in self.events:
                w.writerow([f"{e.time:.17g}", e.kind, *(f"{v:.17g}" for v in e.point)])


def _rk4(f, p: np.ndarray, h: float) -> np.ndarray:
    k1 = f(p)
    k2 = f(p + 0.5 * h * k1)
    k3 = f(p + 0.5 * h * k2)
    k4 = f(p + h * k3)
    return p + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _bisect(advance, g, h: float, tol: float) -> float:
    """Smallest ``tau`` in ``(0, h]`` (to ``tol``) with ``g(advance(tau)) <= 0``."""
    lo, hi = 0.0, h
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(advance(mid)) <= 0:
            hi = mid
        else:
            lo = mid
    return hi


class _PiecewiseRun:
    def __init__(self, pw, tmax, step, event_tol, regime, coord_tol, max_steps):
        self.pw = pw
        self.tmax = float(tmax)
        self.step = float(step)
        self.event_tol = float(event_tol)
        self.regime = regime
        self.coord_tol = coord_tol
        self.max_steps = max_steps
        self.traj = Trajectory(options={
            "step": self.step, "event_tol": self.event_tol, "regime": str(regime),
            "chatter_events": CHATTER_EVENTS,
        })
        self.recent = deque(maxlen=CHATTER_EVENTS)
        self.t = 0.0

    # ---- bookkeeping
    def record(self, p, mode, st):
        self.traj.states.append(TrajectoryState(self.t, tuple(float(v) for v in p), mode, st))

    def event(self, kind, p, note=""):
        self.traj.events.append(Event(kind, self.t, tuple(float(v) for v in p), note))
        self.recent.append(self.t)
        if (kind != STOP and len(self.recent) == CHATTER_EVENTS
                and self.recent[-1] - self.recent[0] <= 10 * self.event_tol):
            self.traj.events.append(Event(STOP, self.t, tuple(float(v) for v in p), "CHATTER"))
            return False
        return True

    def stop(self, p, note):
        self.traj.events.append(Event(STOP, self.t, tuple(float(v) for v in p), note))

    # ---- dispatch after reaching a surface
    def arrive(self, p):
        """Decide the next mode at a point on the switching set."""
        on1 = abs(p[0]) <= self.coord_tol
        on2 = abs(p[1]) <= self.coord_tol
        if on1:
            p[0] = 0.0
        if on2:
            p[1] = 0.0
        if on1 and on2:
            return ("pin", None)
        st = Stratum(0 if on1 else int(np.sign(p[0])), 0 if on2 else int(np.sign(p[1])))
        cls = classify_codim1(self.pw, p, self.coord_tol)
        k = 0 if st.sigma1 == 0 else 1
        if cls.tag == SEWING:
            side = 1 if cls.lie_plus > 0 else -1
            s = [st.sigma1, st.sigma2]
            s[k] = side
            if not self.event(CROSS, p):
                return ("done", None)
            return ("flow", tuple(s))
        if cls.tag == SLIDING1:
            if cls.lie_plus > 0 and cls.lie_minus < 0:
                # escaping sliding: the forward Filippov flow is not unique
                self.stop(p, "escaping sliding region")
                return ("done", None)
            if not self.event(SLIDE_ENTER, p):
                return ("done", None)
            return ("slide", st)
        self.stop(p, "tangency on codim-1 stratum")
        return ("done", None)

    # ---- modes
    def flow(self, p, s):
        f = lambda q: self.pw.eval(s, q)  # noqa: E731
        st = Stratum(*s)
        g = lambda q: min(s[0] * q[0], s[1] * q[1])  # noqa: E731
        n = 0
        while self.t < self.tmax - 1e-15:
            n += 1
            if n > self.max_steps:
                self.stop(p, "step budget exhausted")
                return ("done", None), p
            h = min(self.step, self.tmax - self.t)
            q = _rk4(f, p, h)
            if not np.all(np.isfinite(q)):
                self.stop(p, "non-finite state")
                return ("done", None), p
            if g(q) > 0:
                p, self.t = q, self.t + h
                self.record(p, FLOW, st)
                continue
            tau = _bisect(lambda d: _rk4(f, p, d), g, h, self.event_tol)
            p = _rk4(f, p, tau)
            self.t += tau
            self.record(p, FLOW, st)
            return self.arrive(p), p
        return ("done", None), p

    def slide(self, p, st):
        k = 0 if st.sigma1 == 0 else 1
        j = 1 - k
        other = st.signs[j]

        splus, sminus, _ = adjacent_pair(st)

        def comb(q):
            # the stratum stays fixed, even where q approaches the axis
            xp, xm = self.pw.eval(splus, q), self.pw.eval(sminus, q)
            lp, lm = float(xp[k]), float(xm[k])
            if abs(lp - lm) < 1e-9 * (1.0 + abs(lp) + abs(lm)):
                raise TangencyError("both adjacent normal components vanish")
            rho = lp / (lp - lm)
            return rho, (1.0 - rho) * xp + rho * xm

        def f(q):
            v = comb(q)[1]
            v[k] = 0.0
            return v

        def g(q):
            try:
                rho = comb(q)[0]
            except TangencyError:
                return -1.0
            return min(rho, 1.0 - rho, other * q[j])

        n = 0
        while self.t < self.tmax - 1e-15:
            n += 1
            if n > self.max_steps:
                self.stop(p, "step budget exhausted")
                return ("done", None), p
            h = min(self.step, self.tmax - self.t)
            try:
                q = _rk4(f, p, h)
            except TangencyError:
                self.stop(p, "tangency while sliding")
                return ("done", None), p
            q[k] = 0.0
            if g(q) > 0:
                p, self.t = q, self.t + h
                self.record(p, SLIDE1, st)
                continue

            def adv(d):
                r = _rk4(f, p, d)
                r[k] = 0.0
                return r

            tau = _bisect(adv, g, h, self.event_tol)
            p = adv(tau)
            self.t += tau
            if abs(p[j]) <= self.coord_tol or other * p[j] <= 0:
                p[j] = 0.0
                self.record(p, SLIDE1, st)
                return ("pin", None), p
            rho = comb(p)[0]
            kind = EXIT_PLUS if rho < 0.5 else EXIT_MINUS
            self.record(p, SLIDE1, st)
            if not self.event(SLIDE_EXIT, p, kind):
                return ("done", None), p
            s = [st.sigma1, st.sigma2]
            s[k] = 1 if kind == EXIT_PLUS else -1
            return ("flow", tuple(s)), p
        return ("done", None), p

    def pin(self, p):
        p[0] = p[1] = 0.0
        st = Stratum(0, 0)
        frozen, valid = constant_approximation(self.pw, p)
        if not valid:
            self.stop(p, "frozen-field approximation invalid on the axis")
            return ("done", None), p
        verdict = sliding_verdict(frozen, self.regime)
        if verdict.tag != SLIDING or verdict.attracting is None:
            self.stop(p, f"codim-2 verdict {verdict.tag}: {verdict.note}")
            return ("done", None), p
        if not self.event(PIN_SIGMA00, p, "drift from attracting reduced equilibrium"):
            return ("done", None), p
        self.record(p, PINNED, st)
        constant = self.pw.is_constant
        rate = codim2_drift(self.pw, p[2], self.regime, verdict)

        def f(q):
            if constant:
                return np.array([0.0, 0.0, rate])
            return np.array([0.0, 0.0, codim2_drift(self.pw, q[2], self.regime)])

        n = 0
        while self.t < self.tmax - 1e-15:
            n += 1
            if n > self.max_steps:
                self.stop(p, "step budget exhausted")
                return ("done", None), p
            h = min(self.step, self.tmax - self.t)
            try:
                p = _rk4(f, p, h)
            except (UndefinedDrift, ValueError) as exc:
                if not self.event(UNPIN, p, str(exc)):
                    return ("done", None), p
                self.stop(p, "no exit analysis on the codim-2 axis")
                return ("done", None), p
            self.t += h
            self.record(p, PINNED, st)
        return ("done", None), p

    def run(self, x0):
        p = np.array(x0, dtype=float)
        self.record(p, *self._initial_mode(p))
        action = self.arrive(p) if self._on_switching(p) else ("flow", (int(np.sign(p[0])), int(np.sign(p[1]))))
        while True:
            kind, arg = action
            if kind == "done":
                break
            if kind == "flow":
                action, p = self.flow(p, arg)
            elif kind == "slide":
                action, p = self.slide(p, arg)
            else:
                action, p = self.pin(p)
            if self.t >= self.tmax - 1e-15 and action[0] != "done":
                break
        if not self.traj.events or self.traj.events[-1].kind != STOP:
            self.stop(p, "tmax reached")
        return self.traj

    def _on_switching(self, p):
        return abs(p[0]) <= self.coord_tol or abs(p[1]) <= self.coord_tol

    def _initial_mode(self, p):
        if self._on_switching(p):
            st = Stratum(0 if abs(p[0]) <= self.coord_tol else int(np.sign(p[0])),
                         0 if abs(p[1]) <= self.coord_tol else int(np.sign(p[1])))
            return (PINNED if st.is_sigma00 else SLIDE1), st
        return FLOW, Stratum(int(np.sign(p[0])), int(np.sign(p[1])))


def integrate_piecewise(
    pw: PiecewiseField,
    x0,
    tmax: float,
    step: float = 1e-3,
    event_tol: float = 1e-10,
    regime: Regime = Regime(),
    coord_tol: float = 1e-9,
    max_steps: int = 10_000_000,
) -> Trajectory:
    """Filippov trajectory from ``x0`` up to time ``tmax``.

    Fixed-step RK4 in the active mode; surface hits are bracketed by sign
    change and located by bisection in time to ``event_tol``. Sliding on a
    codim-1 plane is integrated in the plane's own coordinates, so the
    normal coordinate is exactly 0. On the codim-2 axis the state is pinned
    and drifts with :func:`~twocross.codim2.codim2_drift`.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    if not tmax >= 0:
        raise ValueError("tmax must be non-negative")
    run = _PiecewiseRun(pw, tmax, step, event_tol, regime, coord_tol, max_steps)
    return run.run(x0)


# --------------------------------------------------------------------------
# regularized flow

def _step_doubling_error(f, p, h):
    full = _rk4(f, p, h)
    half = _rk4(f, _rk4(f, p, 0.5 * h), 0.5 * h)
    return float(np.max(np.abs(full - half)))


def integrate_regularized(
    pw: PiecewiseField,
    phi: TransitionFunction,
    eps: float,
    eta: float,
    x0,
    tmax: float,
    step: float = 1e-3,
    tol: float = 1e-8,
    check_every: int = 500,
) -> Trajectory:
    """Plain RK4 on the regularized smooth field; only a final STOP event.

    Every ``check_every`` steps (and at least 20 times per run) one step is
    redone as two half steps; a difference above ``1e3 * tol`` means the step is too large for the
    ``1/min(eps, eta)`` stiffness and raises :class:`StiffnessError`.
    """
    if not (eps > 0 and eta > 0):
        raise ValueError("eps and eta must be positive")
    if not step > 0:
        raise ValueError("step must be positive")
    n = max(1, int(math.ceil(tmax / step - 1e-9)))
    h = tmax / n
    check_every = max(1, min(check_every, n // 20))
    f = lambda q: regularized_eval(pw, phi, eps, eta, q)  # noqa: E731
    traj = Trajectory(options={"eps": eps, "eta": eta, "step": h, "phi": phi.tag})
    p0 = np.array(x0, dtype=float)

    def check(p):
        err = _step_doubling_error(f, p, h)
        if err > 1e3 * tol:
            raise StiffnessError(
                f"step {h:g} too large: step-doubling error {err:.3g}; stiffness is of order "
                f"1/min(eps, eta) = {1.0 / min(eps, eta):g}, try step <= {0.5 * min(eps, eta):g}")

    if pw.is_constant and phi.tag in (IDENTITY.tag, CUBIC.tag):
        a, b, c = pw.constant_arrays()
        cubic = phi.tag == CUBIC.tag
        rows = [p0[None, :]]
        p = p0
        done = 0
        while done < n:
            m = min(check_every, n - done)
            check(p)
            chunk = rk4_regularized_constant(a, b, c, eps, eta, cubic, p, h, m)
            rows.append(chunk[1:])
            p = chunk[-1]
            done += m
        path = np.vstack(rows)
    else:
        path = np.empty((n + 1, 3))
        path[0] = p0
        p = p0
        for i in range(1, n + 1):
            if (i - 1) % check_every == 0:
                check(p)
            p = _rk4(f, p, h)
            path[i] = p
    st = Stratum(0, 0)
    for i, row in enumerate(path):
        traj.states.append(TrajectoryState(i * h, (float(row[0]), float(row[1]), float(row[2])), REGULARIZED, st))
    traj.events.append(Event(STOP, tmax, tuple(float(v) for v in path[-1]), "tmax reached"))
    return traj


@dataclass(frozen=True)
class ProbeRow:
    eps: float
    eta: float
    distance: float


def band_distance(traj: Trajectory, fraction: float = 0.2) -> float:
    """Largest ``sqrt(x1^2 + x2^2)`` over the trailing ``fraction`` of the run."""
    xs = traj.positions()
    k = max(1, int(math.ceil(fraction * (len(xs) - 1))) + 1)
    tail = xs[-k:]
    return float(np.max(np.hypot(tail[:, 0], tail[:, 1])))


def convergence_probe(
    pw: PiecewiseField,
    phi: TransitionFunction,
    x0,
    pairs,
    tmax: float,
    step: float = 1e-3,
    workers: int | None = None,
) -> list[ProbeRow]:
    """Trailing-band distance to the codim-2 axis for each ``(eps, eta)``."""
    pairs = [(float(e), float(n)) for e, n in pairs]

    def one(pair):
        e, n = pair
        tr = integrate_regularized(pw, phi, e, n, x0, tmax, step)
        return ProbeRow(e, n, band_distance(tr))

    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(one, pairs))


__all__ = [
    "CROSS", "Event", "FLOW", "PINNED", "PIN_SIGMA00", "ProbeRow", "SLIDE1", "SLIDE_ENTER",
    "SLIDE_EXIT", "STOP", "StiffnessError", "Trajectory", "TrajectoryState", "UNPIN",
    "band_distance", "codim2_drift", "convergence_probe", "integrate_piecewise",
    "integrate_regularized",
]
