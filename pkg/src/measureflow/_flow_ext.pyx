# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stopped-flow kernel; same algorithm as ``_flow_py``."""

import numpy as np
from libc.math cimport ceil, isfinite, NAN

from .errors import NonFiniteStateError

cdef double EVENT_TOL = 1e-12


cdef inline double _pl(const double[::1] xs, const double[::1] ys, Py_ssize_t n, double x) noexcept nogil:
    cdef Py_ssize_t lo, hi, mid
    if x <= xs[0]:
        return ys[0]
    if x >= xs[n - 1]:
        return ys[n - 1]
    lo = 0
    hi = n
    # largest i with xs[i] <= x
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if xs[mid] <= x:
            lo = mid
        else:
            hi = mid
    return ys[lo] + (ys[lo + 1] - ys[lo]) * (x - xs[lo]) / (xs[lo + 1] - xs[lo])


cdef inline void _rk4(const double[::1] vx, const double[::1] vy, Py_ssize_t nv,
                      const double[::1] fx, const double[::1] fy, Py_ssize_t nf,
                      double x, double g, double h, double* xo, double* go) noexcept nogil:
    cdef double k1, k2, k3, k4, l1, l2, l3, l4, xa, xb, xc
    k1 = _pl(vx, vy, nv, x)
    l1 = _pl(fx, fy, nf, x)
    xa = x + 0.5 * h * k1
    k2 = _pl(vx, vy, nv, xa)
    l2 = _pl(fx, fy, nf, xa)
    xb = x + 0.5 * h * k2
    k3 = _pl(vx, vy, nv, xb)
    l3 = _pl(fx, fy, nf, xb)
    xc = x + h * k3
    k4 = _pl(vx, vy, nv, xc)
    l4 = _pl(fx, fy, nf, xc)
    xo[0] = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    go[0] = g + h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4)


cdef int _flow_one(const double[::1] vx, const double[::1] vy, Py_ssize_t nv,
                   const double[::1] fx, const double[::1] fy, Py_ssize_t nf,
                   const double[::1] bp, Py_ssize_t nb, double x0, double t, double h_max,
                   double* pos, signed char* stopped, double* hit, double* gout) noexcept nogil:
    """Returns 0 on success, 1 on a non-finite state."""
    cdef double x = x0, g = 0.0, v0, h, t0, left, lo, hi, mid, x1, g1, xm, gm, now
    cdef Py_ssize_t n, i, j
    cdef int d
    pos[0] = x
    stopped[0] = 0
    hit[0] = NAN
    v0 = _pl(vx, vy, nv, x)
    if t <= 0.0:
        gout[0] = 0.0
        return 0
    if v0 == 0.0:
        gout[0] = _pl(fx, fy, nf, x) * t
        return 0
    d = 1 if v0 > 0.0 else -1
    if (d > 0 and x >= 1.0) or (d < 0 and x <= 0.0):
        stopped[0] = 1
        hit[0] = 0.0
        gout[0] = _pl(fx, fy, nf, x) * t
        return 0

    # first breakpoint strictly ahead of x
    if d > 0:
        j = 0
        while bp[j] <= x:
            j += 1
    else:
        j = nb - 1
        while bp[j] >= x:
            j -= 1

    n = <Py_ssize_t>ceil(t / h_max)
    if n < 1:
        n = 1
    h = t / n
    for i in range(n):
        t0 = i * h
        left = h
        while left > 0.0:
            _rk4(vx, vy, nv, fx, fy, nf, x, g, left, &x1, &g1)
            if not (isfinite(x1) and isfinite(g1)):
                return 1
            if (x1 < bp[j]) if d > 0 else (x1 > bp[j]):
                x = x1
                g = g1
                break
            lo = 0.0
            hi = left
            while hi - lo > EVENT_TOL:
                mid = 0.5 * (lo + hi)
                _rk4(vx, vy, nv, fx, fy, nf, x, g, mid, &xm, &gm)
                if (xm >= bp[j]) if d > 0 else (xm <= bp[j]):
                    hi = mid
                else:
                    lo = mid
            _rk4(vx, vy, nv, fx, fy, nf, x, g, hi, &xm, &g)
            x = bp[j]
            left -= hi
            now = t0 + (h - left)
            if j == 0 or j == nb - 1:
                pos[0] = x
                stopped[0] = 1
                hit[0] = now
                gout[0] = g + _pl(fx, fy, nf, x) * (t - now)
                return 0
            if _pl(vx, vy, nv, x) * d <= 0.0:
                pos[0] = x
                gout[0] = g + _pl(fx, fy, nf, x) * (t - now)
                return 0
            j += d
    pos[0] = x
    gout[0] = g
    return 0


def integrate(vx, vy, fx, fy, bp, x0, double t, double h_max):
    cdef const double[::1] cvx = np.ascontiguousarray(vx, dtype=np.float64)
    cdef const double[::1] cvy = np.ascontiguousarray(vy, dtype=np.float64)
    cdef const double[::1] cfx = np.ascontiguousarray(fx, dtype=np.float64)
    cdef const double[::1] cfy = np.ascontiguousarray(fy, dtype=np.float64)
    cdef const double[::1] cbp = np.ascontiguousarray(bp, dtype=np.float64)
    cdef const double[::1] cx0 = np.ascontiguousarray(x0, dtype=np.float64)
    cdef Py_ssize_t m = cx0.shape[0], k
    pos = np.empty(m)
    stopped = np.zeros(m, dtype=np.int8)
    hit = np.empty(m)
    g = np.empty(m)
    cdef double[::1] cpos = pos
    cdef signed char[::1] cst = stopped
    cdef double[::1] chit = hit
    cdef double[::1] cg = g
    cdef Py_ssize_t nv = cvx.shape[0], nf = cfx.shape[0], nb = cbp.shape[0]
    cdef Py_ssize_t bad = -1
    with nogil:
        for k in range(m):
            if _flow_one(cvx, cvy, nv, cfx, cfy, nf, cbp, nb, cx0[k], t, h_max,
                         &cpos[k], &cst[k], &chit[k], &cg[k]):
                bad = k
                break
    if bad >= 0:
        raise NonFiniteStateError(f"non-finite state starting from x0={x0[bad]}")
    return pos, stopped.astype(bool), hit, g
