"""Quadrant fields, strata and transition functions of a 2-cross system."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .expr import Expression, constant, parse_expression

SignPair = tuple[int, int]

#: Fixed iteration order of the four quadrants.
SIGNS: tuple[SignPair, ...] = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def sign_label(s: Sequence[int]) -> str:
    """``(1, -1) -> '+-'``; zeros print as ``0``."""
    return "".join("+" if v > 0 else "-" if v < 0 else "0" for v in s)


def parse_sign_label(label: str) -> SignPair:
    label = label.strip()
    if len(label) != 2 or any(c not in "+-" for c in label):
        raise ValueError(f"bad quadrant label {label!r}")
    return tuple(1 if c == "+" else -1 for c in label)  # type: ignore[return-value]


@dataclass(frozen=True)
class SmoothField3:
    comp1: Expression
    comp2: Expression
    comp3: Expression

    @classmethod
    def from_text(cls, c1: str, c2: str, c3: str, params: Mapping[str, float] | None = None) -> "SmoothField3":
        return cls(*(parse_expression(t, params) for t in (c1, c2, c3)))

    @classmethod
    def constant(cls, v1, v2, v3) -> "SmoothField3":
        return cls(constant(v1), constant(v2), constant(v3))

    @property
    def components(self) -> tuple[Expression, Expression, Expression]:
        return (self.comp1, self.comp2, self.comp3)

    @property
    def is_constant(self) -> bool:
        return all(c.is_constant for c in self.components)

    def __call__(self, x1: float, x2: float, x3: float) -> tuple[float, float, float]:
        return (self.comp1(x1, x2, x3), self.comp2(x1, x2, x3), self.comp3(x1, x2, x3))


def eval_field(field: SmoothField3, p) -> np.ndarray:
    return np.array(field(float(p[0]), float(p[1]), float(p[2])))


@dataclass(frozen=True)
class Stratum:
    sigma1: int
    sigma2: int

    @property
    def codimension(self) -> int:
        return (self.sigma1 == 0) + (self.sigma2 == 0)

    @property
    def is_sigma00(self) -> bool:
        return self.sigma1 == 0 and self.sigma2 == 0

    @property
    def signs(self) -> tuple[int, int]:
        return (self.sigma1, self.sigma2)

    def __str__(self) -> str:
        return sign_label(self.signs)


def stratum_of(p, tol: float = 1e-9) -> Stratum:
    if tol <= 0:
        raise ValueError("tol must be positive")

    def sgn(v: float) -> int:
        if abs(v) <= tol:
            return 0
        return 1 if v > 0 else -1

    return Stratum(sgn(p[0]), sgn(p[1]))


class PiecewiseField:
    """The four quadrant fields ``X_s``, ``s`` in ``{-,+}^2``."""

    def __init__(self, fields: Mapping[SignPair, SmoothField3]):
        missing = [sign_label(s) for s in SIGNS if s not in fields]
        if missing:
            raise ValueError(f"missing quadrant field(s): {', '.join(missing)}")
        extra = set(fields) - set(SIGNS)
        if extra:
            raise ValueError(f"invalid quadrant keys: {sorted(extra)}")
        self._fields = {s: fields[s] for s in SIGNS}

    @classmethod
    def constant(cls, values: Mapping[SignPair, Sequence[float]]) -> "PiecewiseField":
        return cls({s: SmoothField3.constant(*values[s]) for s in SIGNS})

    def __getitem__(self, s: SignPair) -> SmoothField3:
        return self._fields[tuple(s)]

    def items(self) -> Iterator[tuple[SignPair, SmoothField3]]:
        return iter(self._fields.items())

    @property
    def is_constant(self) -> bool:
        return all(f.is_constant for f in self._fields.values())

    def eval(self, s: SignPair, p) -> np.ndarray:
        return eval_field(self._fields[tuple(s)], p)

    def values_at(self, p) -> dict[SignPair, np.ndarray]:
        return {s: eval_field(f, p) for s, f in self._fields.items()}

    def constant_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(a, b, c)`` component arrays in :data:`SIGNS` order (constant fields only)."""
        if not self.is_constant:
            raise ValueError("field components are not constant")
        vals = np.array([eval_field(self._fields[s], (0.0, 0.0, 0.0)) for s in SIGNS])
        return vals[:, 0].copy(), vals[:, 1].copy(), vals[:, 2].copy()

    def __repr__(self) -> str:
        body = ", ".join(
            f"{sign_label(s)}: ({f.comp1}, {f.comp2}, {f.comp3})" for s, f in self._fields.items()
        )
        return f"PiecewiseField({body})"


# --------------------------------------------------------------------------
# transition functions

@dataclass(frozen=True)
class TransitionFunction:
    """Monotone map saturating at -1 for t <= -1 and +1 for t >= 1.

    ``clamped-identity`` is ``clip(t, -1, 1)``; ``clamped-cubic`` is
    ``(3t - t^3)/2`` on ``[-1, 1]``, which is C1 at the saturation points.
    """

    tag: str = "clamped-identity"

    def __post_init__(self):
        if self.tag not in ("clamped-identity", "clamped-cubic"):
            raise ValueError(f"unknown transition function {self.tag!r}")

    def __call__(self, t: float) -> float:
        return transition_eval(self, t)

    def deriv(self, t: float) -> float:
        return transition_deriv(self, t)


IDENTITY = TransitionFunction("clamped-identity")
CUBIC = TransitionFunction("clamped-cubic")


def transition_eval(phi: TransitionFunction, t: float) -> float:
    if t <= -1.0:
        return -1.0
    if t >= 1.0:
        return 1.0
    if phi.tag == "clamped-identity":
        return t
    return 0.5 * t * (3.0 - t * t)


def transition_deriv(phi: TransitionFunction, t: float) -> float:
    if t <= -1.0 or t >= 1.0:
        return 0.0
    if phi.tag == "clamped-identity":
        return 1.0
    return 1.5 * (1.0 - t * t)


def convex_weight(s: SignPair, u: float, v: float) -> float:
    return (1.0 + s[0] * u) * (1.0 + s[1] * v) / 4.0
