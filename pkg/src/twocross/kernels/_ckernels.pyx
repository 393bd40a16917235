# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 kernels; see ``_pykernels`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef inline double _phi(double t, bint cubic) noexcept nogil:
    if t <= -1.0:
        return -1.0
    if t >= 1.0:
        return 1.0
    if cubic:
        return 0.5 * t * (3.0 - t * t)
    return t


cdef inline void _reg_rhs(double* a, double* b, double* c, double ie, double ih,
                          bint cubic, double x1, double x2, double* out) noexcept nogil:
    cdef double u = _phi(x1 * ie, cubic)
    cdef double v = _phi(x2 * ih, cubic)
    cdef double w0 = 0.25 * (1.0 + u) * (1.0 + v)
    cdef double w1 = 0.25 * (1.0 + u) * (1.0 - v)
    cdef double w2 = 0.25 * (1.0 - u) * (1.0 + v)
    cdef double w3 = 0.25 * (1.0 - u) * (1.0 - v)
    out[0] = w0 * a[0] + w1 * a[1] + w2 * a[2] + w3 * a[3]
    out[1] = w0 * b[0] + w1 * b[1] + w2 * b[2] + w3 * b[3]
    out[2] = w0 * c[0] + w1 * c[1] + w2 * c[2] + w3 * c[3]


def rk4_regularized_constant(a, b, c, double eps, double eta, cubic, x0, double h, Py_ssize_t n):
    cdef double[4] av, bv, cv
    cdef Py_ssize_t i
    for i in range(4):
        av[i] = a[i]
        bv[i] = b[i]
        cv[i] = c[i]
    cdef bint cub = bool(cubic)
    cdef double ie = 1.0 / eps, ih = 1.0 / eta
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n + 1, 3))
    cdef double[:, ::1] o = out
    cdef double x = x0[0], y = x0[1], z = x0[2]
    cdef double k1[3]
    cdef double k2[3]
    cdef double k3[3]
    cdef double k4[3]
    cdef double h2 = 0.5 * h, h6 = h / 6.0
    o[0, 0] = x
    o[0, 1] = y
    o[0, 2] = z
    with nogil:
        for i in range(1, n + 1):
            _reg_rhs(av, bv, cv, ie, ih, cub, x, y, k1)
            _reg_rhs(av, bv, cv, ie, ih, cub, x + h2 * k1[0], y + h2 * k1[1], k2)
            _reg_rhs(av, bv, cv, ie, ih, cub, x + h2 * k2[0], y + h2 * k2[1], k3)
            _reg_rhs(av, bv, cv, ie, ih, cub, x + h * k3[0], y + h * k3[1], k4)
            x += h6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            y += h6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            z += h6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
            o[i, 0] = x
            o[i, 1] = y
            o[i, 2] = z
    return out


cdef inline void _quad_rhs(double* p, double x, double y, double* out) noexcept nogil:
    cdef double xx = x * x, xy = x * y, yy = y * y
    out[0] = p[0] + p[1] * x + p[2] * y + p[3] * xx + p[4] * xy + p[5] * yy
    out[1] = p[6] + p[7] * x + p[8] * y + p[9] * xx + p[10] * xy + p[11] * yy


def rk4_quadratic(coeffs, x0, double h, Py_ssize_t n, double bound=1e6):
    cdef double[12] p
    cdef Py_ssize_t i
    flat = np.ravel(np.asarray(coeffs, dtype=np.float64))
    for i in range(12):
        p[i] = flat[i]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n + 1, 2))
    cdef double[:, ::1] o = out
    cdef double x = x0[0], y = x0[1]
    cdef double k1[2]
    cdef double k2[2]
    cdef double k3[2]
    cdef double k4[2]
    cdef double h2 = 0.5 * h, h6 = h / 6.0
    cdef Py_ssize_t m = n
    o[0, 0] = x
    o[0, 1] = y
    with nogil:
        for i in range(1, n + 1):
            _quad_rhs(p, x, y, k1)
            _quad_rhs(p, x + h2 * k1[0], y + h2 * k1[1], k2)
            _quad_rhs(p, x + h2 * k2[0], y + h2 * k2[1], k3)
            _quad_rhs(p, x + h * k3[0], y + h * k3[1], k4)
            x += h6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            y += h6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            o[i, 0] = x
            o[i, 1] = y
            if not (fabs(x) <= bound and fabs(y) <= bound):
                m = i
                break
    return out[: m + 1].copy()
