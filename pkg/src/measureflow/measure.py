"""Finite signed measures on [0, 1] stored as weighted atoms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

MERGE_TOL = 1e-12
DROP_TOL = 1e-15


class Atom(NamedTuple):
    position: float
    weight: float


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Weighted sum of Dirac masses ``sum_i w_i delta_{x_i}``.

    Positions and weights are read-only arrays. Construction does not
    canonicalize; use :func:`canonicalize` (or :meth:`from_pairs`, which
    does) to merge coincident atoms.
    """

    positions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pos = _frozen(self.positions)
        w = _frozen(self.weights)
        if pos.shape != w.shape:
            raise ValueError("positions and weights must have equal length")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(w))):
            raise ValueError("atoms must be finite")
        if pos.size and (pos.min() < 0.0 or pos.max() > 1.0):
            raise ValueError("atom positions must lie in [0, 1]")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "weights", w)

    @classmethod
    def empty(cls) -> "DiscreteMeasure":
        return cls(np.empty(0), np.empty(0))

    @classmethod
    def from_pairs(cls, pairs: Iterable, tol: float = MERGE_TOL) -> "DiscreteMeasure":
        """Build from ``[[x, w], ...]`` (the JSON literal format) and canonicalize."""
        arr = np.asarray(list(pairs), dtype=float)
        if arr.size == 0:
            return cls.empty()
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("measure literal must be a list of [position, weight] pairs")
        return canonicalize(cls(arr[:, 0], arr[:, 1]), tol)

    @classmethod
    def dirac(cls, x: float, w: float = 1.0) -> "DiscreteMeasure":
        return cls([x], [w])

    @property
    def atoms(self) -> list[Atom]:
        return [Atom(float(x), float(w)) for x, w in zip(self.positions, self.weights)]

    def to_pairs(self) -> list[list[float]]:
        return [[float(x), float(w)] for x, w in zip(self.positions, self.weights)]

    def __len__(self) -> int:
        return self.positions.size

    def is_positive(self) -> bool:
        return bool(np.all(self.weights >= 0.0))

    def __repr__(self) -> str:
        return f"DiscreteMeasure({self.to_pairs()})"


def canonicalize(m: DiscreteMeasure, tol: float = MERGE_TOL) -> DiscreteMeasure:
    """Sort atoms, merge chains of atoms whose gaps are <= tol, drop null atoms.

    A merged atom sits at the |w|-weighted mean of its cluster (equal to the
    w-weighted mean when the cluster has one sign), so it never leaves the
    cluster's hull.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if len(m) == 0:
        return m
    order = np.argsort(m.positions, kind="stable")
    x = m.positions[order]
    w = m.weights[order]
    # cluster ids: a new cluster starts wherever the gap exceeds tol
    starts = np.concatenate(([True], np.diff(x) > tol))
    ids = np.cumsum(starts) - 1
    n = int(ids[-1]) + 1
    if n == x.size:
        wm, xm = w, x
    else:
        wm = np.bincount(ids, weights=w, minlength=n)
        aw = np.abs(w)
        asum = np.bincount(ids, weights=aw, minlength=n)
        xsum = np.bincount(ids, weights=aw * x, minlength=n)
        first = x[starts]
        with np.errstate(invalid="ignore", divide="ignore"):
            xm = np.where(asum > 0, xsum / asum, first)
        xm = np.clip(xm, 0.0, 1.0)
    keep = np.abs(wm) >= DROP_TOL
    return DiscreteMeasure(xm[keep], wm[keep])


def total_variation(m: DiscreteMeasure) -> float:
    return float(np.sum(np.abs(m.weights)))


def mass(m: DiscreteMeasure) -> float:
    return float(np.sum(m.weights))


def linear_combine(a: float, m1: DiscreteMeasure, b: float, m2: DiscreteMeasure,
                   tol: float = MERGE_TOL) -> DiscreteMeasure:
    """Canonical form of ``a*m1 + b*m2``."""
    pos = np.concatenate((m1.positions, m2.positions))
    w = np.concatenate((a * m1.weights, b * m2.weights))
    return canonicalize(DiscreteMeasure(pos, w), tol)


def difference(m1: DiscreteMeasure, m2: DiscreteMeasure) -> DiscreteMeasure:
    return linear_combine(1.0, m1, -1.0, m2)


def scale(a: float, m: DiscreteMeasure) -> DiscreteMeasure:
    return linear_combine(a, m, 0.0, DiscreteMeasure.empty())
