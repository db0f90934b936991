"""Pure-Python stopped-flow kernel.

Mirrors ``_flow_ext.pyx`` operation for operation; the compiled version is
preferred when it is importable.
"""

import math
from bisect import bisect_left, bisect_right

import numpy as np

from .errors import NonFiniteStateError

EVENT_TOL = 1e-12


def _pl(xs, ys, n, x):
    # constant extension outside [xs[0], xs[-1]]
    if x <= xs[0]:
        return ys[0]
    if x >= xs[n - 1]:
        return ys[n - 1]
    i = bisect_right(xs, x) - 1
    return ys[i] + (ys[i + 1] - ys[i]) * (x - xs[i]) / (xs[i + 1] - xs[i])


def _flow_one(vx, vy, nv, fx, fy, nf, bp, nb, x0, t, h_max):
    """Return (position, stopped, hit_time, reaction_integral) for one start."""
    x = x0
    g = 0.0
    v0 = _pl(vx, vy, nv, x)
    if t <= 0.0:
        return x, False, math.nan, 0.0
    if v0 == 0.0:
        return x, False, math.nan, _pl(fx, fy, nf, x) * t
    d = 1 if v0 > 0.0 else -1
    if (d > 0 and x >= 1.0) or (d < 0 and x <= 0.0):
        return x, True, 0.0, _pl(fx, fy, nf, x) * t

    j = bisect_right(bp, x) if d > 0 else bisect_left(bp, x) - 1
    target = bp[j]

    n = max(1, int(math.ceil(t / h_max)))
    h = t / n
    for i in range(n):
        t0 = i * h
        left = h
        while left > 0.0:
            x1, g1 = _rk4(vx, vy, nv, fx, fy, nf, x, g, left)
            if not (math.isfinite(x1) and math.isfinite(g1)):
                raise NonFiniteStateError(f"non-finite state starting from x0={x0}")
            if (x1 < target) if d > 0 else (x1 > target):
                x, g = x1, g1
                break
            lo, hi = 0.0, left
            while hi - lo > EVENT_TOL:
                mid = 0.5 * (lo + hi)
                xm, _ = _rk4(vx, vy, nv, fx, fy, nf, x, g, mid)
                if (xm >= target) if d > 0 else (xm <= target):
                    hi = mid
                else:
                    lo = mid
            _, g = _rk4(vx, vy, nv, fx, fy, nf, x, g, hi)
            x = target
            left -= hi
            now = t0 + (h - left)
            if j == 0 or j == nb - 1:
                return x, True, now, g + _pl(fx, fy, nf, x) * (t - now)
            if _pl(vx, vy, nv, x) * d <= 0.0:
                # field vanishes at the node: the particle rests there
                return x, False, math.nan, g + _pl(fx, fy, nf, x) * (t - now)
            j += d
            target = bp[j]
    return x, False, math.nan, g


def _rk4(vx, vy, nv, fx, fy, nf, x, g, h):
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
    return (x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4),
            g + h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4))


def integrate(vx, vy, fx, fy, bp, x0, t, h_max):
    vx, vy = vx.tolist(), vy.tolist()
    fx, fy = fx.tolist(), fy.tolist()
    bp = bp.tolist()
    m = len(x0)
    pos = np.empty(m)
    stopped = np.zeros(m, dtype=bool)
    hit = np.full(m, np.nan)
    g = np.empty(m)
    for k, xs in enumerate(np.asarray(x0, dtype=float).tolist()):
        pos[k], stopped[k], hit[k], g[k] = _flow_one(
            vx, vy, len(vx), fx, fy, len(fx), bp, len(bp), xs, float(t), float(h_max))
    return pos, stopped, hit, g
