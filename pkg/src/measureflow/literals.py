"""JSON literal formats for measures, functions, rules and partition families.

* measure: ``[[x, w], ...]`` or ``{"density": <function>, "atoms": n}``
* function: ``{"nodes": [...], "values": [...]}``
* rule: ``{"type": "convolution", "kernel": <function>}`` or
  ``{"type": "frozen", "field": <function>}``
* family: ``{"type": "dyadic" | "uniform"}``, ``{"type": "qadic", "q": 3}``,
  ``{"type": "refinement", "base": [times], "rule": "bisect_all"}``,
  ``{"type": "explicit", "partitions": [[times], ...]}``
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigInvalid, InvalidFamilyError
from .euler import Dyadic, Explicit, Partition, PartitionFamily, QAdic, Refinement, Uniform
from .interaction import Convolution, Frozen, VelocityRule
from .measure import DiscreteMeasure
from .pl import PiecewiseLinearFn, integrate


def quantize_density(density: PiecewiseLinearFn, n: int) -> DiscreteMeasure:
    """``n`` atoms at cell midpoints carrying the exact cell integrals of ``density``."""
    if n < 1:
        raise ConfigInvalid("density quantization needs at least one atom")
    if density.domain != (0.0, 1.0):
        raise ConfigInvalid("density must be defined on [0, 1]")
    edges = np.linspace(0.0, 1.0, n + 1)
    w = [integrate(density, a, b) for a, b in zip(edges[:-1], edges[1:])]
    if min(w) < 0:
        raise ConfigInvalid("density must be nonnegative")
    return DiscreteMeasure.from_pairs(np.c_[0.5 * (edges[:-1] + edges[1:]), w])


def parse_function(obj, lo: float = 0.0, hi: float = 1.0) -> PiecewiseLinearFn:
    """A ``{"nodes", "values"}`` object, or a number meaning a constant on ``[lo, hi]``."""
    if isinstance(obj, bool):
        raise ConfigInvalid(f"bad function literal {obj!r}")
    if isinstance(obj, (int, float)):
        return PiecewiseLinearFn.constant(float(obj), lo, hi)
    try:
        return PiecewiseLinearFn(obj["nodes"], obj["values"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigInvalid(f"bad function literal {obj!r}: {exc}") from exc


def parse_measure(obj) -> DiscreteMeasure:
    if isinstance(obj, dict):
        if "density" not in obj:
            raise ConfigInvalid("measure object needs a 'density' entry")
        return quantize_density(parse_function(obj["density"]), int(obj.get("atoms", 100)))
    try:
        return DiscreteMeasure.from_pairs(obj)
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"bad measure literal: {exc}") from exc


def dump_measure(m: DiscreteMeasure) -> list[list[float]]:
    return m.to_pairs()


def parse_rule(obj) -> VelocityRule:
    try:
        kind = obj["type"]
        if kind == "convolution":
            return Convolution(parse_function(obj["kernel"], -1.0, 1.0))
        if kind == "frozen":
            return Frozen(parse_function(obj["field"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigInvalid(f"bad rule literal {obj!r}: {exc}") from exc
    raise ConfigInvalid(f"unknown rule type {kind!r}")


def dump_rule(rule: VelocityRule) -> dict:
    if isinstance(rule, Convolution):
        return {"type": "convolution", "kernel": rule.kernel.to_dict()}
    return {"type": "frozen", "field": rule.field.to_dict()}


def parse_family(obj) -> PartitionFamily:
    if isinstance(obj, str):
        obj = {"type": obj}
    try:
        kind = obj["type"]
        if kind == "dyadic":
            return Dyadic()
        if kind == "uniform":
            return Uniform()
        if kind == "qadic":
            return QAdic(int(obj["q"]))
        if kind == "refinement":
            return Refinement(Partition(obj["base"]), obj.get("rule", "bisect_all"))
        if kind == "explicit":
            return Explicit(tuple(Partition(p) for p in obj["partitions"]))
    except (KeyError, TypeError, ValueError, InvalidFamilyError) as exc:
        raise ConfigInvalid(f"bad family literal {obj!r}: {exc}") from exc
    raise ConfigInvalid(f"unknown family type {kind!r}")
