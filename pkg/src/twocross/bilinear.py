"""Closed-form zeros of planar bilinear systems.

A bilinear polynomial is stored as ``(c00, c10, c01, c11)`` and means
``c00 + c10*x + c01*y + c11*x*y``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

Quad4 = tuple[float, float, float, float]


def beval(c: Quad4, x: float, y: float) -> float:
    return c[0] + c[1] * x + c[2] * y + c[3] * x * y


def bgrad(c: Quad4, x: float, y: float) -> tuple[float, float]:
    return (c[1] + c[3] * y, c[2] + c[3] * x)


@dataclass
class BilinearRoots:
    points: list[tuple[float, float]]
    # horizontal lines y = const on which both equations vanish identically in x
    lines: list[float] = field(default_factory=list)
    degenerate: bool = False


def _quadratic_roots(a: float, b: float, c: float, rel: float = 1e-13) -> list[float]:
    scale = max(abs(a), abs(b), abs(c), 1e-300)
    if abs(a) <= rel * scale:
        if abs(b) <= rel * scale:
            return []
        return [-c / b]
    disc = b * b - 4.0 * a * c
    if disc < -rel * max(b * b, abs(4 * a * c), 1e-300):
        return []
    if disc <= rel * max(b * b, abs(4 * a * c), 1e-300):
        return [-b / (2.0 * a)]
    sq = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sq, b))
    r1 = q / a
    r2 = c / q if q != 0 else -b / a - r1
    return sorted([r1, r2])


def bilinear_zeros(cx: Quad4, cy: Quad4, rel: float = 1e-13) -> BilinearRoots:
    """All real common zeros of two bilinear polynomials.

    Writing ``eqx = M(y) + x L(y)`` and ``eqy = R(y) + x N(y)``, the common
    zeros satisfy ``R L - M N = 0``, a quadratic in ``y``; ``x`` is then
    recovered from whichever linear factor does not vanish.
    """
    c00, c10, c01, c11 = map(float, cx)
    d00, d10, d01, d11 = map(float, cy)
    q2 = d01 * c11 - c01 * d11
    q1 = d00 * c11 + d01 * c10 - c00 * d11 - c01 * d10
    q0 = d00 * c10 - c00 * d10
    scale = max(abs(v) for v in (*cx, *cy, 1e-300))
    out = BilinearRoots([])
    if max(abs(q2), abs(q1), abs(q0)) <= rel * scale * scale:
        out.degenerate = True
        return out
    for y in _quadratic_roots(q2, q1, q0, rel):
        L = c10 + c11 * y
        M = c00 + c01 * y
        N = d10 + d11 * y
        R = d00 + d01 * y
        if abs(L) >= abs(N) and abs(L) > rel * scale:
            x = -M / L
        elif abs(N) > rel * scale:
            x = -R / N
        else:
            if abs(M) <= 1e-9 * scale and abs(R) <= 1e-9 * scale:
                out.lines.append(y)
            continue
        # one Newton polish on the 2x2 system
        fx, fy = beval(cx, x, y), beval(cy, x, y)
        a11, a12 = bgrad(cx, x, y)
        a21, a22 = bgrad(cy, x, y)
        det = a11 * a22 - a12 * a21
        if abs(det) > 1e-8 * scale * scale:
            x -= (a22 * fx - a12 * fy) / det
            y -= (-a21 * fx + a11 * fy) / det
        out.points.append((x, y))
    return out
