"""Dual bounded-Lipschitz (Dudley) and Fortet-Mourier norms of atomic measures.

For a measure ``m = sum_i w_i delta_{x_i}`` on [0, 1] the dual norm is the
value of a small LP in the test-function values ``phi_i = phi(x_i)``, the sup
budget ``a`` and the Lipschitz budget ``b``::

    max  sum_i w_i phi_i
    s.t. -a <= phi_i <= a
         |phi_{i+1} - phi_i| <= b (x_{i+1} - x_i)      (adjacent points only)
         a + b <= 1      (DUAL_BL)   or   a <= 1, b <= 1   (DUAL_FM)

On a sorted one-dimensional support the adjacent-pair constraints imply the
all-pairs ones by telescoping, and any feasible vector of values extends to a
piecewise-linear phi on [0, 1] with the same budgets.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter1d

from .errors import NumericalFailure, SupportTooLargeError
from .measure import DiscreteMeasure, canonicalize, difference, total_variation
from . import simplex

WITNESS_TOL = 1e-9
ORACLE_MAX_SUPPORT = 4


class NormKind(enum.Enum):
    DUAL_BL = "bl"
    DUAL_FM = "fm"


@dataclass(frozen=True)
class NormWitness:
    values: np.ndarray
    lip_budget: float
    sup_budget: float
    objective: float


def _lp_data(x, w, kind: NormKind, all_pairs: bool):
    n = x.size
    nv = 2 * n + 2  # phi+, phi-, a, b
    ia, ib = 2 * n, 2 * n + 1
    rows, rhs = [], []

    def phi_row(coef):
        r = np.zeros(nv)
        r[:n] = coef
        r[n:2 * n] = -coef
        return r

    eye = np.eye(n)
    for i in range(n):
        for sgn in (1.0, -1.0):
            r = phi_row(sgn * eye[i])
            r[ia] = -1.0
            rows.append(r)
            rhs.append(0.0)
    pairs = itertools.combinations(range(n), 2) if all_pairs else zip(range(n - 1), range(1, n))
    for i, j in pairs:
        d = x[j] - x[i]
        for sgn in (1.0, -1.0):
            r = phi_row(sgn * (eye[j] - eye[i]))
            r[ib] = -d
            rows.append(r)
            rhs.append(0.0)
    if kind is NormKind.DUAL_BL:
        r = np.zeros(nv)
        r[ia] = r[ib] = 1.0
        rows.append(r)
        rhs.append(1.0)
    else:
        for idx in (ia, ib):
            r = np.zeros(nv)
            r[idx] = 1.0
            rows.append(r)
            rhs.append(1.0)
    c = np.concatenate((w, -w, [0.0, 0.0]))
    return c, np.array(rows), np.array(rhs)


def _check_witness(x, wit: NormWitness, kind: NormKind):
    a, b, phi = wit.sup_budget, wit.lip_budget, wit.values
    ok = a >= -WITNESS_TOL and b >= -WITNESS_TOL
    if kind is NormKind.DUAL_BL:
        ok &= a + b <= 1 + WITNESS_TOL
    else:
        ok &= a <= 1 + WITNESS_TOL and b <= 1 + WITNESS_TOL
    ok &= bool(np.all(np.abs(phi) <= a + WITNESS_TOL))
    if x.size > 1:
        ok &= bool(np.all(np.abs(np.diff(phi)) <= b * np.diff(x) + WITNESS_TOL))
    if not ok:
        raise NumericalFailure("LP returned an infeasible witness")


def dual_norm(m: DiscreteMeasure, kind: NormKind = NormKind.DUAL_BL,
              all_pairs: bool = False) -> tuple[float, NormWitness]:
    """Return ``(norm, witness)`` for the dual BL or FM norm of ``m``.

    ``all_pairs=True`` imposes the Lipschitz constraint on every pair of
    support points instead of adjacent ones; it exists to cross-check the
    adjacency reduction and gives the same optimum.
    """
    x, w = m.positions, m.weights
    n = x.size
    if n == 0:
        return 0.0, NormWitness(np.empty(0), 0.0, 0.0, 0.0)
    if np.any(np.diff(x) <= 0):
        raise ValueError("dual_norm expects a canonical measure (sorted, distinct support)")
    c, A, b = _lp_data(x, w, kind, all_pairs)
    res = simplex.maximize(c, A, b, max_iter=10 * (n + 2) ** 2)
    phi = res.x[:n] - res.x[n:2 * n]
    wit = NormWitness(values=phi, sup_budget=float(res.x[2 * n]),
                      lip_budget=float(res.x[2 * n + 1]), objective=res.objective)
    _check_witness(x, wit, kind)
    return res.objective, wit


def bl_norm(m: DiscreteMeasure) -> float:
    return dual_norm(m, NormKind.DUAL_BL)[0]


def fm_norm(m: DiscreteMeasure) -> float:
    return dual_norm(m, NormKind.DUAL_FM)[0]


def bl_distance(m1: DiscreteMeasure, m2: DiscreteMeasure) -> float:
    return bl_norm(difference(m1, m2))


def dirac_pair_distance(x: float, y: float, kind: NormKind = NormKind.DUAL_BL) -> float:
    d = abs(x - y)
    if kind is NormKind.DUAL_BL:
        return 2.0 * d / (2.0 + d)
    return min(2.0, d)


# ---------------------------------------------------------------------------
# brute-force oracle

def _grid_radius(budget: float, step: float, eps: float = 1e-12) -> int:
    """Largest r with r*step <= budget + eps."""
    r = int(np.floor(budget / step))
    while (r + 1) * step <= budget + eps:
        r += 1
    while r > 0 and r * step > budget + eps:
        r -= 1
    return r


def _chain_max(w, gaps, g, allowed, lip: float) -> float:
    step = g[1] - g[0]
    val = np.where(allowed, w[0] * g, -np.inf)
    for wi, d in zip(w[1:], gaps):
        r = _grid_radius(lip * d, step)
        if r >= g.size - 1:
            best = np.full_like(val, val.max())
        else:
            best = maximum_filter1d(val, size=2 * r + 1, mode="constant", cval=-np.inf)
        val = np.where(allowed, best + wi * g, -np.inf)
    return float(val.max())


def dual_norm_oracle(m: DiscreteMeasure, kind: NormKind = NormKind.DUAL_BL,
                     grid: int = 2001) -> float:
    """Grid search over test-function values, independent of the LP.

    Every ``phi_i`` ranges over ``grid`` equispaced values in [-1, 1] and a
    candidate is admissible iff ``max|phi_i| + max slope <= 1`` (BL) or both
    are ``<= 1`` (FM), slopes taken between adjacent support points. Instead
    of enumerating ``grid**n`` tuples, the BL search conditions on the sup
    budget ``a = max|phi_i|`` (always a grid magnitude) and runs an exact
    max-plus sweep along the chain; this returns the same maximum as full
    enumeration (see :func:`_enumerate_oracle`).
    """
    n = len(m)
    if n > ORACLE_MAX_SUPPORT:
        raise SupportTooLargeError(f"oracle supports at most {ORACLE_MAX_SUPPORT} atoms, got {n}")
    if grid < 3:
        raise ValueError("grid must be >= 3")
    if n == 0:
        return 0.0
    m = canonicalize(m, 0.0)
    x, w = m.positions, m.weights
    gaps = np.diff(x)
    g = np.linspace(-1.0, 1.0, grid)
    if kind is NormKind.DUAL_FM:
        return max(0.0, _chain_max(w, gaps, g, np.ones(grid, bool), 1.0))
    best = 0.0
    for a in np.unique(np.abs(g)):
        allowed = np.abs(g) <= a + 1e-12
        best = max(best, _chain_max(w, gaps, g, allowed, 1.0 - a))
    return best


def _enumerate_oracle(m: DiscreteMeasure, kind: NormKind, grid: int) -> float:
    """Literal exhaustive enumeration; only usable for coarse grids."""
    x, w = m.positions, m.weights
    if x.size == 0:
        return 0.0
    g = np.linspace(-1.0, 1.0, grid)
    best = 0.0
    for phi in itertools.product(g, repeat=x.size):
        phi = np.array(phi)
        budget = 1.0 - np.max(np.abs(phi)) if kind is NormKind.DUAL_BL else 1.0
        if np.all(np.abs(np.diff(phi)) <= budget * np.diff(x) + 1e-12):
            best = max(best, float(np.dot(w, phi)))
    return best


def norm_summary(m: DiscreteMeasure) -> dict:
    bl = bl_norm(m)
    fm = fm_norm(m)
    return {"bl": bl, "fm": fm, "tv": total_variation(m)}
