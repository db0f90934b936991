"""Stopped flow of a fixed piecewise-linear velocity field on [0, 1].

Each particle solves ``x' = v(x)`` together with the reaction integral
``g' = f(x)`` using classical RK4 on a fixed substep grid (``h <= h_max``).
Step events are refined by bisection on the step length to ``1e-12``:

* leaving [0, 1]: the particle is clamped to the boundary and frozen there
  while ``g`` keeps accumulating ``f(boundary)``;
* crossing a node of ``v`` or ``f``: the step is split at the node, so each
  RK4 step sees a smooth right-hand side.

A 1D autonomous trajectory is monotone, so the next event is always the
nearest breakpoint in the direction of ``sign v(x0)``.

The heavy lifting happens in a compiled kernel (``_flow_ext``) when it is
available and in ``_flow_py`` otherwise. Set ``MF_PURE_PYTHON=1`` to force
the fallback.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _flow_py
from .pl import PiecewiseLinearFn

DEFAULT_H_MAX = 1e-3

try:
    from . import _flow_ext
except ImportError:  # pragma: no cover - depends on the build
    _flow_ext = None

_BACKENDS = {"python": _flow_py}
if _flow_ext is not None:
    _BACKENDS["compiled"] = _flow_ext

if os.environ.get("MF_PURE_PYTHON") or _flow_ext is None:
    BACKEND = "python"
else:
    BACKEND = "compiled"


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def set_backend(name: str) -> str:
    """Switch kernels; returns the previous backend name."""
    global BACKEND
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available (have {available_backends()})")
    prev, BACKEND = BACKEND, name
    return prev


@dataclass(frozen=True)
class FlowResult:
    position: float
    stopped: bool
    hit_time: Optional[float]
    reaction_integral: float


def breakpoints(v: PiecewiseLinearFn, f: PiecewiseLinearFn) -> np.ndarray:
    bp = np.union1d(v.nodes, f.nodes)
    bp = bp[(bp > 0.0) & (bp < 1.0)]
    return np.concatenate(([0.0], bp, [1.0]))


def flow_many(v: PiecewiseLinearFn, f: PiecewiseLinearFn, x0, t: float,
              h_max: float = DEFAULT_H_MAX, backend: str | None = None):
    """Vectorised stopped flow.

    Returns ``(positions, stopped, hit_times, reaction_integrals)``; hit times
    are NaN for particles that have not stopped.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if h_max <= 0:
        raise ValueError("h_max must be positive")
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.size and (x0.min() < 0.0 or x0.max() > 1.0):
        raise ValueError("start positions must lie in [0, 1]")
    kernel = _BACKENDS[backend or BACKEND]
    return kernel.integrate(v.nodes, v.values, f.nodes, f.values,
                            breakpoints(v, f), x0, float(t), float(h_max))


def stopped_flow(v: PiecewiseLinearFn, f: PiecewiseLinearFn, x0: float, t: float,
                 h_max: float = DEFAULT_H_MAX) -> FlowResult:
    pos, st, hit, g = flow_many(v, f, [x0], t, h_max)
    return FlowResult(
        position=float(pos[0]),
        stopped=bool(st[0]),
        hit_time=None if math.isnan(hit[0]) else float(hit[0]),
        reaction_integral=float(g[0]),
    )


def flow_semigroup_check(v, f, x0: float, s: float, t: float,
                         h_max: float = DEFAULT_H_MAX) -> float:
    """``|Phi_t(Phi_s(x0)) - Phi_{t+s}(x0)|`` from two integrations vs one."""
    mid = stopped_flow(v, f, x0, s, h_max).position
    two = stopped_flow(v, f, mid, t, h_max).position
    one = stopped_flow(v, f, x0, s + t, h_max).position
    return abs(two - one)
