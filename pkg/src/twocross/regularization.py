"""Double regularization, blow-up slow system and the reduced bilinear xy-system.

Two scalings of the blown-up fast components appear here. The *convex*
scaling uses the weights ``(1+s1 u)(1+s2 v)/4`` that sum to one; the
*unnormalized* scaling drops the 1/4, i.e. it is four times the convex one. Signs
of every indicator are the same under both.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bilinear import Quad4, beval, bgrad
from .fields import IDENTITY, SIGNS, PiecewiseField, TransitionFunction, convex_weight

STRICT = "strict"
POINTWISE = "pointwise"
CONVEX = "convex"
UNNORMALIZED = "unnormalized"


class DegenerateLambda(ValueError):
    """The xy coefficient of a reduced equation vanishes."""


@dataclass(frozen=True)
class Regime:
    """How the ratio ``eps/eta`` behaves along the regularizing curve."""

    kind: str = "fixed"
    k: float = 1.0

    def __post_init__(self):
        if self.kind not in ("fixed", "to_zero", "to_infinity"):
            raise ValueError(f"unknown regime {self.kind!r}")
        if self.kind == "fixed" and not self.k > 0:
            raise ValueError("fixed ratio must be positive")

    @classmethod
    def parse(cls, text: str) -> "Regime":
        t = text.strip().lower().replace("_", "-")
        if t in ("to-zero", "zero", "0"):
            return cls("to_zero")
        if t in ("to-inf", "to-infinity", "inf", "infinity"):
            return cls("to_infinity")
        if t.startswith("k="):
            t = t[2:]
        try:
            return cls("fixed", float(t))
        except ValueError:
            raise ValueError(f"bad regime {text!r}; use k=V, to-zero or to-inf") from None

    @property
    def ladder(self) -> tuple[float, ...]:
        if self.kind == "fixed":
            return (self.k,)
        if self.kind == "to_zero":
            return (1e-2, 1e-4, 1e-6)
        return (1e2, 1e4, 1e6)

    def __str__(self) -> str:
        if self.kind == "fixed":
            return f"fixed(k={self.k:g})"
        return self.kind


def regularized_eval(pw: PiecewiseField, phi: TransitionFunction, eps: float, eta: float, p) -> np.ndarray:
    """The smooth field ``sum_s w_s(phi(x1/eps), phi(x2/eta)) X_s(p)``."""
    if not (eps > 0 and eta > 0):
        raise ValueError("eps and eta must be positive")
    u = phi(p[0] / eps)
    v = phi(p[1] / eta)
    if abs(u) == 1.0 and abs(v) == 1.0:
        return pw.eval((int(u), int(v)), p)
    out = np.zeros(3)
    for s in SIGNS:
        w = convex_weight(s, u, v)
        if w != 0.0:
            out += w * pw.eval(s, p)
    return out


def blowup_slow_eval(
    pw: PiecewiseField,
    phi: TransitionFunction,
    K: float,
    q,
    mode: str = STRICT,
    scaling: str = UNNORMALIZED,
) -> np.ndarray:
    """Slow-system components ``(X1, X2, X3)`` in blown-up coordinates.

    ``q = (x1b, x2b, x3)`` with ``x1 = eps*x1b`` and ``x2 = K*eps*x2b``.
    ``X1`` and ``X2`` are the fast components with the ``1/eps`` factor
    removed (``X2`` keeps ``1/K``); ``X3`` is the actual ``x3`` rate.
    In ``strict`` mode the fields are evaluated at ``(0, 0, x3)``, the
    ``eps -> 0`` limit; ``pointwise`` mode evaluates them at ``q`` itself.
    """
    if mode not in (STRICT, POINTWISE):
        raise ValueError(f"unknown mode {mode!r}")
    if scaling not in (CONVEX, UNNORMALIZED):
        raise ValueError(f"unknown scaling {scaling!r}")
    if not K > 0:
        raise ValueError("K must be positive")
    x1b, x2b, x3 = (float(v) for v in q)
    u, v = phi(x1b), phi(x2b)
    arg = (0.0, 0.0, x3) if mode == STRICT else (x1b, x2b, x3)
    acc = np.zeros(3)
    for s in SIGNS:
        acc += convex_weight(s, u, v) * pw.eval(s, arg)
    scale = 1.0 if scaling == CONVEX else 4.0
    return np.array([scale * acc[0], scale * acc[1] / K, acc[2]])


@dataclass(frozen=True)
class BilinearXY:
    """Reduced xy-system ``x' = eqx(x, y)``, ``y' = r * eqy(x, y)``.

    ``eqx`` and ``eqy`` are the unnormalized sign-weighted sums (unnormalized
    scaling) and ``r`` the ratio ``eps/eta`` set by ``regime``.
    """

    eqx: Quad4
    eqy: Quad4
    regime: Regime = Regime()

    def rhs(self, x: float, y: float, ratio: float | None = None) -> tuple[float, float]:
        r = self.regime.ladder[0] if ratio is None else ratio
        return beval(self.eqx, x, y), r * beval(self.eqy, x, y)

    def jacobian(self, x: float, y: float, ratio: float | None = None) -> np.ndarray:
        r = self.regime.ladder[0] if ratio is None else ratio
        gx = bgrad(self.eqx, x, y)
        gy = bgrad(self.eqy, x, y)
        return np.array([[gx[0], gx[1]], [r * gy[0], r * gy[1]]])

    def normalized(self) -> tuple[Quad4, Quad4]:
        """Convex-scaled coefficient quadruples (one quarter of ``eqx``, ``eqy``)."""
        return tuple(c / 4.0 for c in self.eqx), tuple(c / 4.0 for c in self.eqy)


def sign_weighted_sums(values) -> Quad4:
    """``(sum a_s, sum s1 a_s, sum s2 a_s, sum s1 s2 a_s)`` over :data:`SIGNS`."""
    c = [0.0, 0.0, 0.0, 0.0]
    for (s1, s2), a in zip(SIGNS, values):
        c[0] += a
        c[1] += s1 * a
        c[2] += s2 * a
        c[3] += s1 * s2 * a
    return tuple(c)  # type: ignore[return-value]


def reduced_bilinear_system(pw: PiecewiseField, regime: Regime = Regime()) -> BilinearXY:
    if not pw.is_constant:
        raise ValueError("reduced bilinear system needs constant quadrant fields")
    a, b, _ = pw.constant_arrays()
    return BilinearXY(sign_weighted_sums(a), sign_weighted_sums(b), regime)


@dataclass(frozen=True)
class Csist4Form:
    """``lam*(x - alpha)(y - beta) - delta`` for each equation (convex scaling)."""

    lambda1: float
    lambda2: float
    alpha1: float
    beta1: float
    delta1: float
    alpha2: float
    beta2: float
    delta2: float

    def reconstruct(self) -> tuple[Quad4, Quad4]:
        def quad(lam, al, be, de):
            return (lam * al * be - de, -lam * be, -lam * al, lam)

        return (
            quad(self.lambda1, self.alpha1, self.beta1, self.delta1),
            quad(self.lambda2, self.alpha2, self.beta2, self.delta2),
        )


def _csist4_params(c: Quad4, scale: float):
    c00, c10, c01, c11 = c
    lam = c11 / 4.0
    if abs(lam) <= 1e-12 * scale:
        raise DegenerateLambda("xy coefficient vanishes; the reduced system is not quadratic")
    alpha = -c01 / c11
    beta = -c10 / c11
    delta = lam * alpha * beta - c00 / 4.0
    return lam, alpha, beta, delta


def canonical_csist4(b: BilinearXY) -> Csist4Form:
    scale = max(1.0, *(abs(v) for v in (*b.eqx, *b.eqy)))
    l1, a1, b1, d1 = _csist4_params(b.eqx, scale)
    l2, a2, b2, d2 = _csist4_params(b.eqy, scale)
    return Csist4Form(l1, l2, a1, b1, d1, a2, b2, d2)


@dataclass(frozen=True)
class Csist5Form:
    """``x' = x y - delta1``, ``y' = r*(C (x - alpha2p)(y - beta2p) - delta2)``.

    Obtained from a :class:`Csist4Form` by the shift ``(alpha1, beta1)``
    and the time rescale ``1/lambda1``; ``reverses_time`` is set when
    ``lambda1 < 0``.
    """

    delta1: float
    C: float
    alpha2p: float
    beta2p: float
    delta2: float
    shift: tuple[float, float]
    time_scale: float

    @property
    def reverses_time(self) -> bool:
        return self.time_scale < 0

    def rhs(self, x: float, y: float, ratio: float = 1.0) -> tuple[float, float]:
        return (
            x * y - self.delta1,
            ratio * (self.C * (x - self.alpha2p) * (y - self.beta2p) - self.delta2),
        )

    def to_original(self, x: float, y: float) -> tuple[float, float]:
        return x + self.shift[0], y + self.shift[1]

    def from_original(self, x: float, y: float) -> tuple[float, float]:
        return x - self.shift[0], y - self.shift[1]


def canonical_csist5(c4: Csist4Form) -> Csist5Form:
    lam = c4.lambda1
    if lam == 0 or not math.isfinite(lam):
        raise DegenerateLambda("lambda1 must be nonzero")
    return Csist5Form(
        delta1=c4.delta1 / lam,
        C=c4.lambda2 / lam,
        alpha2p=c4.alpha2 - c4.alpha1,
        beta2p=c4.beta2 - c4.beta1,
        delta2=c4.delta2 / lam,
        shift=(c4.alpha1, c4.beta1),
        time_scale=1.0 / lam,
    )
