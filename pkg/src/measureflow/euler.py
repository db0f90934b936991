"""Forward-Euler-like scheme for measure-dependent velocities, and its harnesses.

On each subinterval ``(t_j, t_{j+1}]`` of a partition the velocity is frozen
at ``v_j = v[mu_{t_j}]`` and the measure evolves by the fixed-field mild
semigroup: ``mu_t = Q^{v_j}_{t - t_j} mu_{t_j}``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (DegenerateFitError, InvalidFamilyError, NegativeInputError,
                     ZeroDenominatorError)
from .flatnorm import bl_distance, bl_norm
from .flow import DEFAULT_H_MAX
from .interaction import VelocityRule, realize
from .measure import DiscreteMeasure, difference, total_variation
from .pl import PiecewiseLinearFn
from .semigroup import BOUND_TOL, FixedDynamics, mild_step

TIME_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Partition:
    times: np.ndarray

    def __post_init__(self):
        t = np.array(self.times, dtype=float).reshape(-1)
        if t.size < 2 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise InvalidFamilyError("partition must start at 0 and be strictly increasing")
        t.flags.writeable = False
        object.__setattr__(self, "times", t)

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def N(self) -> int:
        return self.times.size - 1

    def mesh(self) -> float:
        return float(np.max(np.diff(self.times)))

    @classmethod
    def uniform(cls, n: int, T: float) -> "Partition":
        return cls(np.arange(n + 1) * (T / n))


# -- partition families -----------------------------------------------------

@dataclass(frozen=True)
class Dyadic:
    pass


@dataclass(frozen=True)
class QAdic:
    q: int

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 2:
            raise InvalidFamilyError("q-adic family needs an integer q >= 2")


@dataclass(frozen=True)
class Uniform:
    pass


@dataclass(frozen=True)
class Refinement:
    """Start from ``base`` and refine ``k`` times.

    ``rule="bisect_all"`` halves every subinterval; ``rule="bisect_longest"``
    halves only the subintervals of maximal length.
    """

    base: Partition
    rule: str = "bisect_all"

    def __post_init__(self):
        if self.rule not in ("bisect_all", "bisect_longest"):
            raise InvalidFamilyError(f"unknown refinement rule {self.rule!r}")


@dataclass(frozen=True)
class Explicit:
    """A given list of partitions; need not be nested, only mesh-monotone."""

    partitions: tuple

    def __post_init__(self):
        meshes = [p.mesh() for p in self.partitions]
        if not meshes:
            raise InvalidFamilyError("explicit family is empty")
        if any(b > a for a, b in zip(meshes, meshes[1:])):
            raise InvalidFamilyError("explicit family must have nonincreasing mesh")


PartitionFamily = Dyadic | QAdic | Uniform | Refinement | Explicit


def family_name(fam: PartitionFamily) -> str:
    if isinstance(fam, QAdic):
        return f"qadic{fam.q}"
    return type(fam).__name__.lower()


def _refine(times: np.ndarray, rule: str) -> np.ndarray:
    gaps = np.diff(times)
    if rule == "bisect_all":
        sel = np.ones(gaps.size, bool)
    else:
        sel = gaps >= gaps.max() * (1 - 1e-12)
    mids = (times[:-1] + 0.5 * gaps)[sel]
    return np.sort(np.concatenate((times, mids)))


def make_partition(family: PartitionFamily, k: int, T: float) -> Partition:
    if k < 0 or T <= 0:
        raise InvalidFamilyError("need k >= 0 and T > 0")
    if isinstance(family, Dyadic):
        return Partition.uniform(2 ** k, T)
    if isinstance(family, QAdic):
        return Partition.uniform(family.q ** k, T)
    if isinstance(family, Uniform):
        return Partition.uniform(k + 1, T)
    if isinstance(family, Refinement):
        if not math.isclose(family.base.T, T, rel_tol=0, abs_tol=TIME_TOL):
            raise InvalidFamilyError("refinement base must end at T")
        times = np.array(family.base.times)
        times[-1] = T
        for _ in range(k):
            times = _refine(times, family.rule)
        return Partition(times)
    if isinstance(family, Explicit):
        if k >= len(family.partitions):
            raise InvalidFamilyError(f"explicit family has no member {k}")
        p = family.partitions[k]
        if not math.isclose(p.T, T, rel_tol=0, abs_tol=TIME_TOL):
            raise InvalidFamilyError("explicit partition does not end at T")
        return p
    raise InvalidFamilyError(f"unknown family {family!r}")


# -- scheme ------------------------------------------------------------------

@dataclass
class Trajectory:
    times: list[float]
    measures: list[DiscreteMeasure]
    partition: Partition

    def at(self, tau: float) -> DiscreteMeasure:
        i = int(np.argmin(np.abs(np.asarray(self.times) - tau)))
        if abs(self.times[i] - tau) > TIME_TOL * max(1.0, self.partition.T):
            raise KeyError(f"time {tau} was not sampled")
        return self.measures[i]

    @property
    def samples(self) -> list[tuple[float, DiscreteMeasure]]:
        return list(zip(self.times, self.measures))


def _merge_times(nodes: np.ndarray, extra: Sequence[float], T: float) -> np.ndarray:
    extra = np.asarray(list(extra), dtype=float)
    if extra.size and (extra.min() < -TIME_TOL or extra.max() > T + TIME_TOL):
        raise ValueError("sample times must lie in [0, T]")
    allt = np.sort(np.concatenate((nodes, np.clip(extra, 0.0, T))))
    keep = np.concatenate(([True], np.diff(allt) > TIME_TOL * max(1.0, T)))
    out = allt[keep]
    # snap near-node samples onto the node
    idx = np.searchsorted(nodes, out)
    for i, tv in enumerate(out):
        for j in (idx[i] - 1, idx[i]):
            if 0 <= j < nodes.size and abs(nodes[j] - tv) <= TIME_TOL * max(1.0, T):
                out[i] = nodes[j]
    return out


def euler_evolve(rule: VelocityRule, f: PiecewiseLinearFn, m0: DiscreteMeasure,
                 p: Partition, sample_times: Sequence[float] = (),
                 h_max: float = DEFAULT_H_MAX) -> Trajectory:
    """Run the scheme on partition ``p``; record every node and sample time.

    A sample at ``tau in (t_j, t_{j+1})`` is computed directly from
    ``mu_{t_j}`` with the velocity realised at ``t_j``; intervals are
    left-open, so ``tau = t_{j+1}`` belongs to interval ``j``.
    """
    if not m0.is_positive():
        raise NegativeInputError("initial measure must be positive")
    nodes = p.times
    times = _merge_times(nodes, sample_times, p.T)
    out_t = [0.0]
    out_m = [m0]
    cur = m0
    k = 1  # next index into times (times[0] == 0)
    for j in range(p.N):
        t0, t1 = float(nodes[j]), float(nodes[j + 1])
        dyn = FixedDynamics(realize(rule, cur), f, h_max)
        while k < times.size and times[k] < t1:
            tau = float(times[k])
            out_t.append(tau)
            out_m.append(mild_step(dyn, cur, tau - t0))
            k += 1
        cur = mild_step(dyn, cur, t1 - t0)
        out_t.append(t1)
        out_m.append(cur)
        k += 1
    return Trajectory(out_t, out_m, p)


def default_sample_times(p: Partition) -> list[float]:
    """Nodes of ``p`` plus midpoints of its subintervals."""
    mids = p.times[:-1] + 0.5 * np.diff(p.times)
    return sorted(np.concatenate((p.times, mids)).tolist())


def sup_distance_over(a: Trajectory, b: Trajectory, sample_times: Sequence[float]) -> float:
    return max((bl_distance(a.at(t), b.at(t)) for t in sample_times), default=0.0)


def _workers(threads: int | None) -> int:
    return max(1, int(threads or 1))


# -- harnesses ----------------------------------------------------------------

@dataclass
class CauchyRow:
    k: int
    N: int
    mesh: float
    D: float


def cauchy_table(rule: VelocityRule, f: PiecewiseLinearFn, m0: DiscreteMeasure,
                 family: PartitionFamily, k_lo: int, k_hi: int, m_ref: int,
                 sample_times: Sequence[float] | None = None, h_max: float = DEFAULT_H_MAX,
                 T: float = 1.0, threads: int | None = None,
                 return_reference: bool = False):
    """``D_k = max_tau ||mu^k_tau - mu^{m_ref}_tau||*_BL`` for ``k_lo <= k <= k_hi``.

    Returns the list of rows, or ``(rows, reference_trajectory)`` when
    ``return_reference`` is set.
    """
    if not (k_lo <= k_hi < m_ref):
        raise ValueError("need k_lo <= k_hi < m_ref")
    if sample_times is None:
        sample_times = default_sample_times(make_partition(family, k_lo, T))
    ks = list(range(k_lo, k_hi + 1)) + [m_ref]
    parts = {k: make_partition(family, k, T) for k in ks}

    def run(k):
        return euler_evolve(rule, f, m0, parts[k], sample_times, h_max)

    with ThreadPoolExecutor(_workers(threads)) as ex:
        trajs = dict(zip(ks, ex.map(run, ks)))
    ref = trajs[m_ref]
    rows = [CauchyRow(k, parts[k].N, parts[k].mesh(),
                      sup_distance_over(trajs[k], ref, sample_times))
            for k in ks[:-1]]
    return (rows, ref) if return_reference else rows


@dataclass
class RateFit:
    slope: float
    c_hat: float
    ratios: list[float] = field(default_factory=list)

    @property
    def c_hat_spread(self) -> float:
        """max/min of ``D_k / M_k`` over the fitted rows."""
        r = [x for x in self.ratios if x > 0]
        return max(r) / min(r) if r else math.inf


def rate_fit(table: Sequence[CauchyRow], tol: float = 1e-12) -> RateFit:
    """Least-squares slope of ``log D_k`` against ``log M_k`` and ``C_hat = max D_k/M_k``.

    Rows with ``D_k <= tol`` are left out of the regression.

    Raises
    ------
    DegenerateFitError
        if fewer than three rows exceed ``tol`` (an exact scheme).
    """
    c_hat = max((r.D / r.mesh for r in table), default=0.0)
    rows = [r for r in table if r.D > tol]
    if len(rows) < 3:
        raise DegenerateFitError(
            f"only {len(rows)} of {len(table)} rows exceed tol={tol}: scheme exact", c_hat)
    lm = np.log([r.mesh for r in rows])
    ld = np.log([r.D for r in rows])
    slope = float(np.polyfit(lm, ld, 1)[0])
    return RateFit(slope, c_hat, [r.D / r.mesh for r in rows])


def partition_independence(rule: VelocityRule, f: PiecewiseLinearFn, m0: DiscreteMeasure,
                           family_a: PartitionFamily, family_b: PartitionFamily,
                           k: int | tuple[int, int], sample_times: Sequence[float] | None = None,
                           h_max: float = DEFAULT_H_MAX, T: float = 1.0) -> float:
    """Sup over sample times of the BL distance between two families' runs.

    ``k`` may be a pair ``(k_a, k_b)`` to compare members with matched mesh.
    """
    ka, kb = (k, k) if isinstance(k, int) else k
    pa, pb = make_partition(family_a, ka, T), make_partition(family_b, kb, T)
    if sample_times is None:
        sample_times = default_sample_times(Partition.uniform(4, T))
    ta = euler_evolve(rule, f, m0, pa, sample_times, h_max)
    tb = euler_evolve(rule, f, m0, pb, sample_times, h_max)
    return sup_distance_over(ta, tb, sample_times)


def continuous_dependence(rule: VelocityRule, f: PiecewiseLinearFn, m0: DiscreteMeasure,
                          n0: DiscreteMeasure, family: PartitionFamily, k: int,
                          sample_times: Sequence[float] | None = None,
                          h_max: float = DEFAULT_H_MAX, T: float = 1.0,
                          tol: float = 1e-12) -> tuple[float, float]:
    """``(sup_tau ||mu_tau - nu_tau||*_BL, ||mu_0 - nu_0||*_BL)`` at partition ``k``."""
    p = make_partition(family, k, T)
    if sample_times is None:
        sample_times = default_sample_times(Partition.uniform(4, T))
    tm = euler_evolve(rule, f, m0, p, sample_times, h_max)
    tn = euler_evolve(rule, f, n0, p, sample_times, h_max)
    num = sup_distance_over(tm, tn, sample_times)
    den = bl_norm(difference(m0, n0))
    if den <= tol:
        raise ZeroDenominatorError("initial measures coincide", num)
    return num, den


def timeslice_bounds(traj: Trajectory, f: PiecewiseLinearFn) -> dict[str, float]:
    """Margins of ``TV(mu_t) <= TV(mu_0) e^{||f||_inf T}`` and positivity across samples."""
    tv0 = total_variation(traj.measures[0])
    bound = tv0 * math.exp(f.sup_norm() * traj.partition.T)
    tv_margin = min(bound - total_variation(m) for m in traj.measures)
    min_w = min((float(m.weights.min()) for m in traj.measures if len(m)), default=0.0)
    return {"timeslice_tv": tv_margin, "positivity": min(0.0, min_w)}


def two_atom_attraction_exact(x1: float, w1: float, x2: float, w2: float,
                              t: float) -> DiscreteMeasure:
    """Closed form for ``K(z) = -z``, ``f = 0``, two interior atoms.

    The field is ``-m (x - xbar)`` with ``m = w1 + w2`` and a conserved
    centre of mass ``xbar``, so each atom relaxes as ``e^{-m t}``.
    """
    m = w1 + w2
    xbar = (w1 * x1 + w2 * x2) / m
    e = math.exp(-m * t)
    return DiscreteMeasure.from_pairs([[xbar + (x1 - xbar) * e, w1],
                                       [xbar + (x2 - xbar) * e, w2]])


__all__ = [
    "Partition", "Dyadic", "QAdic", "Uniform", "Refinement", "Explicit", "PartitionFamily",
    "make_partition", "Trajectory", "euler_evolve", "cauchy_table", "CauchyRow", "rate_fit",
    "RateFit", "partition_independence", "continuous_dependence", "timeslice_bounds",
    "two_atom_attraction_exact", "default_sample_times", "family_name", "BOUND_TOL",
]
