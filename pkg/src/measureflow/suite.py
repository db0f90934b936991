"""Randomised instances and the inequality suite shared by the CLI and tests."""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from .euler import Dyadic, euler_evolve, make_partition, timeslice_bounds
from .flow import flow_semigroup_check
from .interaction import Convolution, check_assumption
from .measure import DiscreteMeasure
from .pl import PiecewiseLinearFn
from .semigroup import (FixedDynamics, check_bounds, check_contraction,
                        check_velocity_perturbation, q_semigroup_defect)


def random_pl(rng: np.random.Generator, lo: float = 0.0, hi: float = 1.0,
              n_inner: int | None = None, scale: float = 1.0) -> PiecewiseLinearFn:
    # jittered cells keep node gaps >= (hi - lo) / (4 (n_inner + 1)), so slopes stay moderate
    if n_inner is None:
        n_inner = int(rng.integers(0, 5))
    cell = (hi - lo) / (n_inner + 1)
    inner = lo + cell * (np.arange(1, n_inner + 1) + rng.uniform(-0.375, 0.375, n_inner))
    nodes = np.concatenate(([lo], inner, [hi]))
    return PiecewiseLinearFn.from_samples(nodes, scale * rng.uniform(-1, 1, nodes.size))


def random_measure(rng: np.random.Generator, n: int | None = None,
                   positive: bool = True, max_atoms: int = 5) -> DiscreteMeasure:
    if n is None:
        n = int(rng.integers(1, max_atoms + 1))
    x = rng.uniform(0, 1, n)
    w = rng.uniform(0.05, 1.0, n) if positive else rng.normal(size=n)
    return DiscreteMeasure.from_pairs(np.c_[x, w])


def inequality_suite(seed: int = 0, instances: int = 20,
                     h_max: float = 1e-3) -> dict[str, list[float]]:
    """Margins (rhs - lhs) of every bound, one entry per random instance.

    Fields and reactions are random piecewise-linear functions, measures have
    up to five atoms; signed measures are used where the bound allows it.
    """
    rng = np.random.default_rng(seed)
    out: dict[str, list[float]] = defaultdict(list)
    for _ in range(instances):
        v, v2, f = random_pl(rng), random_pl(rng), random_pl(rng)
        d, d2 = FixedDynamics(v, f, h_max), FixedDynamics(v2, f, h_max)
        t = float(rng.uniform(0.1, 1.0))
        mu = random_measure(rng)
        nu = random_measure(rng)
        signed = random_measure(rng, positive=False)

        for m in (mu, signed):
            for key, val in check_bounds(d, m, t, float(rng.uniform(0, t))).items():
                out[key].append(val)
        out["q_contraction"].append(check_contraction(d, mu, nu, t))
        for key, val in check_velocity_perturbation(d, d2, signed, t).items():
            out[key].append(val)

        kern = Convolution(random_pl(rng, -1.0, 1.0))
        for key, val in check_assumption(kern, mu, nu).items():
            out["assumption_" + key].append(val)

        p = make_partition(Dyadic(), int(rng.integers(1, 5)), 1.0)
        traj = euler_evolve(kern, f, mu, p, (), h_max)
        for key, val in timeslice_bounds(traj, f).items():
            out[key].append(val)
    return dict(out)


def semigroup_suite(seed: int = 0, instances: int = 20,
                    h_max: float = 1e-3) -> dict[str, list[float]]:
    """Observed semigroup defects of the flow and of Q on random instances."""
    rng = np.random.default_rng(seed)
    out: dict[str, list[float]] = defaultdict(list)
    for _ in range(instances):
        v, f = random_pl(rng), random_pl(rng)
        s, t = (float(a) for a in rng.uniform(0, 1, 2))
        x0 = float(rng.uniform(0, 1))
        out["flow_semigroup"].append(flow_semigroup_check(v, f, x0, s, t, h_max))
        out["q_semigroup"].append(
            q_semigroup_defect(FixedDynamics(v, f, h_max), random_measure(rng), s, t))
    return dict(out)
