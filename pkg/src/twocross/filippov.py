"""Filippov classification and sliding flow on the codimension-1 strata."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import PiecewiseField, Stratum, stratum_of

SEWING = "SEWING"
SLIDING = "SLIDING"
TANGENCY = "TANGENCY"

EXIT_PLUS = "EXIT_PLUS"
EXIT_MINUS = "EXIT_MINUS"


class NotOnCodim1Stratum(ValueError):
    pass


class TangencyError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Codim1Class:
    tag: str
    lie_plus: float
    lie_minus: float


@dataclass(frozen=True)
class SlidingCombination:
    rho: float
    field_value: np.ndarray


def adjacent_pair(st: Stratum):
    """Quadrant signs on the positive and negative side of a codim-1 stratum,
    and the index of the normal coordinate."""
    if st.codimension != 1:
        raise NotOnCodim1Stratum(f"stratum {st} is not of codimension 1")
    if st.sigma1 == 0:
        return (1, st.sigma2), (-1, st.sigma2), 0
    return (st.sigma1, 1), (st.sigma1, -1), 1


def _is_tangent(lie: float, field: np.ndarray) -> bool:
    return abs(lie) < 1e-9 * (1.0 + float(np.linalg.norm(field)))


def _sides(pw: PiecewiseField, p, tol: float):
    st = stratum_of(p, tol)
    splus, sminus, k = adjacent_pair(st)
    q = np.asarray(p, dtype=float)
    return pw.eval(splus, q), pw.eval(sminus, q), k


def classify_codim1(pw: PiecewiseField, p, tol: float = 1e-9) -> Codim1Class:
    """Sewing/sliding/tangency at a point of ``{x1=0}`` or ``{x2=0}``.

    The Lie derivatives are the normal components of the two adjacent
    quadrant fields. Points within ``tol`` of both planes are refused.
    """
    xp, xm, k = _sides(pw, p, tol)
    lp, lm = float(xp[k]), float(xm[k])
    if _is_tangent(lp, xp) or _is_tangent(lm, xm):
        tag = TANGENCY
    elif lp * lm > 0:
        tag = SEWING
    else:
        tag = SLIDING
    return Codim1Class(tag, lp, lm)


def sliding_field_codim1(pw: PiecewiseField, p, tol: float = 1e-9) -> SlidingCombination:
    xp, xm, k = _sides(pw, p, tol)
    lp, lm = float(xp[k]), float(xm[k])
    denom = lp - lm
    if abs(denom) < 1e-9 * (1.0 + abs(lp) + abs(lm)):
        raise TangencyError("both adjacent normal components vanish")
    rho = lp / denom
    value = (1.0 - rho) * xp + rho * xm
    return SlidingCombination(rho, value)


def sliding_rho(lie_plus: float, lie_minus: float) -> float:
    return lie_plus / (lie_plus - lie_minus)


def exit_condition(rho: float, tol: float = 1e-9) -> str | None:
    """``EXIT_PLUS`` once rho reaches 0, ``EXIT_MINUS`` once it reaches 1."""
    if rho <= tol:
        return EXIT_PLUS
    if rho >= 1.0 - tol:
        return EXIT_MINUS
    return None
