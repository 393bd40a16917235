"""Pure-Python RK4 kernels; same signatures as the compiled ones."""
import numpy as np


def _phi(t, cubic):
    if t <= -1.0:
        return -1.0
    if t >= 1.0:
        return 1.0
    if cubic:
        return 0.5 * t * (3.0 - t * t)
    return t


def _reg_rhs(a, b, c, inv_eps, inv_eta, cubic, x1, x2):
    u = _phi(x1 * inv_eps, cubic)
    v = _phi(x2 * inv_eta, cubic)
    pu, mu = 1.0 + u, 1.0 - u
    pv, mv = 1.0 + v, 1.0 - v
    # SIGNS order: ++, +-, -+, --
    w0 = 0.25 * pu * pv
    w1 = 0.25 * pu * mv
    w2 = 0.25 * mu * pv
    w3 = 0.25 * mu * mv
    return (w0 * a[0] + w1 * a[1] + w2 * a[2] + w3 * a[3],
            w0 * b[0] + w1 * b[1] + w2 * b[2] + w3 * b[3],
            w0 * c[0] + w1 * c[1] + w2 * c[2] + w3 * c[3])


def rk4_regularized_constant(a, b, c, eps, eta, cubic, x0, h, n):
    """``n`` RK4 steps of the regularized constant-field system; returns (n+1, 3)."""
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    c = [float(v) for v in c]
    ie, ih = 1.0 / eps, 1.0 / eta
    cubic = bool(cubic)
    out = np.empty((n + 1, 3))
    x, y, z = (float(v) for v in x0)
    out[0] = (x, y, z)
    h2 = 0.5 * h
    h6 = h / 6.0
    for i in range(1, n + 1):
        k1 = _reg_rhs(a, b, c, ie, ih, cubic, x, y)
        k2 = _reg_rhs(a, b, c, ie, ih, cubic, x + h2 * k1[0], y + h2 * k1[1])
        k3 = _reg_rhs(a, b, c, ie, ih, cubic, x + h2 * k2[0], y + h2 * k2[1])
        k4 = _reg_rhs(a, b, c, ie, ih, cubic, x + h * k3[0], y + h * k3[1])
        x += h6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y += h6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        z += h6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        out[i, 0] = x
        out[i, 1] = y
        out[i, 2] = z
    return out


def _quad_rhs(p, x, y):
    xx, xy, yy = x * x, x * y, y * y
    return (p[0] + p[1] * x + p[2] * y + p[3] * xx + p[4] * xy + p[5] * yy,
            p[6] + p[7] * x + p[8] * y + p[9] * xx + p[10] * xy + p[11] * yy)


def rk4_quadratic(coeffs, x0, h, n, bound=1e6):
    """RK4 for a planar quadratic system.

    ``coeffs`` has 12 entries: the monomials ``1, x, y, x^2, xy, y^2`` of the
    first equation, then of the second. Stops early once ``|x|`` or ``|y|``
    exceeds ``bound``; returns the (m, 2) array of visited states.
    """
    p = [float(v) for v in np.ravel(coeffs)]
    out = np.empty((n + 1, 2))
    x, y = float(x0[0]), float(x0[1])
    out[0] = (x, y)
    h2 = 0.5 * h
    h6 = h / 6.0
    m = n
    for i in range(1, n + 1):
        k1 = _quad_rhs(p, x, y)
        k2 = _quad_rhs(p, x + h2 * k1[0], y + h2 * k1[1])
        k3 = _quad_rhs(p, x + h2 * k2[0], y + h2 * k2[1])
        k4 = _quad_rhs(p, x + h * k3[0], y + h * k3[1])
        x += h6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y += h6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        out[i, 0] = x
        out[i, 1] = y
        if not (abs(x) <= bound and abs(y) <= bound):
            m = i
            break
    return out[: m + 1].copy()
