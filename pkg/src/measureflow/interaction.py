"""Measure-dependent velocity fields ``v[mu]``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .flatnorm import bl_norm
from .measure import DiscreteMeasure, difference, total_variation
from .pl import PiecewiseLinearFn, sup_distance


@dataclass(frozen=True)
class Convolution:
    """``v[mu](x) = sum_i w_i K(x - y_i)`` for a kernel ``K`` on [-1, 1]."""

    kernel: PiecewiseLinearFn

    def __post_init__(self):
        if self.kernel.domain != (-1.0, 1.0):
            raise ValueError("convolution kernel must be defined on [-1, 1]")


@dataclass(frozen=True)
class Frozen:
    """A fixed field that ignores the measure."""

    field: PiecewiseLinearFn

    def __post_init__(self):
        if self.field.domain != (0.0, 1.0):
            raise ValueError("frozen field must be defined on [0, 1]")


VelocityRule = Union[Convolution, Frozen]


@dataclass(frozen=True)
class BLConstants:
    K_R: float
    L_R: float
    M_R: float
    R: float


def realize(rule: VelocityRule, m: DiscreteMeasure) -> PiecewiseLinearFn:
    """The field ``v[m]`` as an exact piecewise-linear function on [0, 1].

    A shifted PL kernel ``K(. - y)`` has nodes ``kernel.nodes + y``; the sum
    over atoms is PL on the union of those nodes, so sampling there loses
    nothing.
    """
    if isinstance(rule, Frozen):
        return rule.field
    if len(m) == 0:
        return PiecewiseLinearFn.constant(0.0)
    knodes = rule.kernel.nodes
    shifted = (knodes[None, :] + m.positions[:, None]).ravel()
    nodes = np.union1d(shifted[(shifted > 0.0) & (shifted < 1.0)], [0.0, 1.0])
    # x - y always lies in [-1, 1] for x, y in [0, 1]
    vals = np.interp(nodes[None, :] - m.positions[:, None], knodes, rule.kernel.values)
    return PiecewiseLinearFn.from_samples(nodes, m.weights @ vals)


def bl_constants(rule: VelocityRule, R: float) -> BLConstants:
    if R <= 0:
        raise ValueError("R must be positive")
    if isinstance(rule, Frozen):
        fld = rule.field
        return BLConstants(fld.sup_norm(), fld.lip_const(), 0.0, R)
    k = rule.kernel
    # ||K*mu - K*nu||_inf = sup_x |<mu - nu, K(x - .)>| <= ||K||_BL ||mu - nu||*_BL
    return BLConstants(k.sup_norm() * R, k.lip_const() * R, k.bl_norm(), R)


def check_assumption(rule: VelocityRule, mu: DiscreteMeasure, nu: DiscreteMeasure,
                     R: float | None = None) -> dict[str, float]:
    """Margins of the sup, Lipschitz and stability bounds for ``v[.]`` on the TV ball of radius R."""
    if R is None:
        R = max(total_variation(mu), total_variation(nu))
    if total_variation(mu) > R * (1 + 1e-12) or total_variation(nu) > R * (1 + 1e-12):
        raise ValueError("measures must lie in the TV ball of radius R")
    c = bl_constants(rule, R if R > 0 else 1.0)
    vm, vn = realize(rule, mu), realize(rule, nu)
    return {
        "sup_bound": c.K_R - max(vm.sup_norm(), vn.sup_norm()),
        "lip_bound": c.L_R - max(vm.lip_const(), vn.lip_const()),
        "stability": c.M_R * bl_norm(difference(mu, nu)) - sup_distance(vm, vn),
    }
