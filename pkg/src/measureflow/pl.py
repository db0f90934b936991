"""Piecewise-linear bounded Lipschitz functions on a closed interval."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfDomainError

# nodes closer than this are collapsed; rounding in the node values would
# otherwise blow up the adjacent slopes
NODE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PiecewiseLinearFn:
    """Continuous function given by values at strictly increasing nodes.

    Between nodes the function is the linear interpolant. The sup norm and
    the Lipschitz constant are exact for this representation.
    """

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.array(self.nodes, dtype=float).reshape(-1)
        y = np.array(self.values, dtype=float).reshape(-1)
        if x.shape != y.shape:
            raise ValueError("nodes and values must have equal length")
        if x.size < 2:
            raise ValueError("need at least two nodes")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("nodes and values must be finite")
        if np.any(np.diff(x) <= 0):
            raise ValueError("nodes must be strictly increasing")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "values", y)

    @classmethod
    def constant(cls, c: float, lo: float = 0.0, hi: float = 1.0) -> "PiecewiseLinearFn":
        return cls([lo, hi], [c, c])

    @classmethod
    def from_samples(cls, nodes, values) -> "PiecewiseLinearFn":
        """Like the constructor, but sorts and collapses near-duplicate nodes."""
        x = np.asarray(nodes, dtype=float)
        y = np.asarray(values, dtype=float)
        order = np.argsort(x, kind="stable")
        x, y = x[order], y[order]
        keep = np.concatenate(([True], np.diff(x) > NODE_TOL))
        # always retain the right endpoint exactly
        if not keep[-1]:
            keep[np.flatnonzero(keep)[-1]] = False
            keep[-1] = True
        return cls(x[keep], y[keep])

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.nodes[0]), float(self.nodes[-1])

    def __call__(self, x):
        lo, hi = self.domain
        xa = np.asarray(x, dtype=float)
        if np.any(xa < lo) or np.any(xa > hi):
            raise OutOfDomainError(f"argument outside [{lo}, {hi}]")
        out = np.interp(xa, self.nodes, self.values)
        return float(out) if out.ndim == 0 else out

    def extended(self, x):
        """Evaluate with constant extension beyond the domain endpoints."""
        out = np.interp(np.asarray(x, dtype=float), self.nodes, self.values)
        return float(out) if out.ndim == 0 else out

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def lip_const(self) -> float:
        return float(np.max(np.abs(np.diff(self.values) / np.diff(self.nodes))))

    def bl_norm(self) -> float:
        return self.sup_norm() + self.lip_const()

    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.nodes)

    def __neg__(self):
        return PiecewiseLinearFn(self.nodes, -self.values)

    def _combine(self, other: "PiecewiseLinearFn", a: float, b: float) -> "PiecewiseLinearFn":
        if self.domain != other.domain:
            raise ValueError("functions live on different domains")
        x = np.union1d(self.nodes, other.nodes)
        return PiecewiseLinearFn.from_samples(x, a * self.extended(x) + b * other.extended(x))

    def __add__(self, other):
        return self._combine(other, 1.0, 1.0)

    def __sub__(self, other):
        return self._combine(other, 1.0, -1.0)

    def scaled(self, a: float) -> "PiecewiseLinearFn":
        return PiecewiseLinearFn(self.nodes, a * self.values)

    def to_dict(self) -> dict:
        return {"nodes": self.nodes.tolist(), "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "PiecewiseLinearFn":
        return cls(d["nodes"], d["values"])

    def __repr__(self) -> str:
        return f"PiecewiseLinearFn(nodes={self.nodes.tolist()}, values={self.values.tolist()})"


def eval_pl(fn: PiecewiseLinearFn, x: float) -> float:
    return fn(x)


def sup_distance(a: PiecewiseLinearFn, b: PiecewiseLinearFn) -> float:
    """Exact ``||a - b||_inf``: the difference is linear between merged nodes."""
    x = np.union1d(a.nodes, b.nodes)
    return float(np.max(np.abs(a.extended(x) - b.extended(x))))


def integrate(fn: PiecewiseLinearFn, lo: float, hi: float) -> float:
    """Exact integral over [lo, hi] (trapezoid rule on the node set)."""
    inner = fn.nodes[(fn.nodes > lo) & (fn.nodes < hi)]
    x = np.concatenate(([lo], inner, [hi]))
    y = fn.extended(x)
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))
