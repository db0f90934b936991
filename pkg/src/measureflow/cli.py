"""Batch front-end: ``mf simulate|converge|depend|norms|verify --config cfg.json``.

Every run writes ``results.csv``, ``trajectory.jsonl`` and ``summary.json``
into the output directory. Exit status: 0 all checks passed, 1 runtime
failure, 2 invalid config, 3 at least one check failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from pathlib import Path

from .errors import ConfigInvalid, DegenerateFitError, MeasureFlowError, ZeroDenominatorError
from .euler import (Partition, cauchy_table, continuous_dependence, default_sample_times,
                    euler_evolve, family_name, make_partition, rate_fit, timeslice_bounds)
from .flatnorm import NormKind, dual_norm, dual_norm_oracle, ORACLE_MAX_SUPPORT
from .flow import DEFAULT_H_MAX
from .literals import dump_measure, parse_family, parse_function, parse_measure, parse_rule
from .measure import mass, total_variation
from .semigroup import BOUND_TOL
from .suite import inequality_suite, semigroup_suite

log = logging.getLogger("measureflow")

MODES = ("simulate", "converge", "depend", "norms", "verify")
CSV_HEADER = ["family", "k", "N_k", "mesh", "D_k", "slope", "C_hat"]
EXACT_TOL = 1e-12


class Config:
    """Validated view of an experiment config dict."""

    def __init__(self, raw: dict, mode: str):
        if not isinstance(raw, dict):
            raise ConfigInvalid("config must be a JSON object")
        self.raw = raw
        self.mode = mode
        self.T = float(raw.get("T", 1.0))
        if not self.T > 0:
            raise ConfigInvalid("T must be positive")
        self.h_max = float(raw.get("h_max", DEFAULT_H_MAX * self.T))
        if not self.h_max > 0:
            raise ConfigInvalid("h_max must be positive")
        self.seed = int(raw.get("seed", 0))
        k_range = raw.get("k_range", [2, 6])
        if (not isinstance(k_range, list) or len(k_range) != 2
                or int(k_range[0]) < 0 or int(k_range[0]) > int(k_range[1])):
            raise ConfigInvalid("k_range must be [lo, hi] with 0 <= lo <= hi")
        self.k_lo, self.k_hi = int(k_range[0]), int(k_range[1])
        self.m_ref = int(raw.get("m_ref", self.k_hi + 3))
        if mode == "converge" and self.m_ref <= self.k_hi:
            raise ConfigInvalid("m_ref must exceed k_range[1]")
        self.k = int(raw.get("k", self.k_hi))
        self.family = parse_family(raw.get("family", "dyadic"))
        self.rule = parse_rule(raw["rule"]) if "rule" in raw else None
        self.f = parse_function(raw.get("f", 0.0))
        if self.f.domain != (0.0, 1.0):
            raise ConfigInvalid("f must be defined on [0, 1]")
        self.m0 = parse_measure(raw["m0"]) if "m0" in raw else None
        self.n0 = parse_measure(raw["n0"]) if "n0" in raw else None
        self.sample_times = raw.get("sample_times")
        if self.sample_times is not None:
            st = [float(t) for t in self.sample_times]
            if any(t < 0 or t > self.T for t in st):
                raise ConfigInvalid("sample_times must lie in [0, T]")
            self.sample_times = st
        needs = {"simulate": ("rule", "m0"), "converge": ("rule", "m0"),
                 "depend": ("rule", "m0", "n0"), "norms": (), "verify": ()}[mode]
        for key in needs:
            if getattr(self, key) is None:
                raise ConfigInvalid(f"mode {mode!r} needs '{key}'")
        for key in ("m0", "n0"):
            m = getattr(self, key)
            if m is not None and mode in ("simulate", "converge", "depend") and not m.is_positive():
                raise ConfigInvalid(f"{key} must be a positive measure")

    def get(self, key, default):
        return self.raw.get(key, default)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path: Path, rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([_fmt(x) for x in r])


def _write_traj(path: Path, samples) -> None:
    with open(path, "w") as fh:
        for t, m in samples:
            fh.write(json.dumps({"time": float(t), "atoms": dump_measure(m)}) + "\n")


def _check(value: float, margin: float) -> dict:
    """A check passes iff its margin (threshold slack) is nonnegative."""
    return {"value": value, "margin": margin, "pass": bool(margin >= 0)}


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("MF_THREADS", "1")))
    except ValueError:
        return 1


def run_simulate(cfg: Config):
    p = make_partition(cfg.family, cfg.k, cfg.T)
    times = cfg.sample_times if cfg.sample_times is not None else default_sample_times(p)
    traj = euler_evolve(cfg.rule, cfg.f, cfg.m0, p, times, cfg.h_max)
    margins = timeslice_bounds(traj, cfg.f)
    checks = {k: _check(v, v + BOUND_TOL) for k, v in margins.items()}
    final = traj.measures[-1]
    summary = {"k": cfg.k, "N_k": p.N, "mesh": p.mesh(), "final_mass": mass(final),
               "final_tv": total_variation(final)}
    rows = [[family_name(cfg.family), cfg.k, p.N, p.mesh(), None, None, None]]
    return rows, traj.samples, summary, checks


def run_converge(cfg: Config):
    p_lo = make_partition(cfg.family, cfg.k_lo, cfg.T)
    times = cfg.sample_times if cfg.sample_times is not None else default_sample_times(p_lo)
    table, ref = cauchy_table(cfg.rule, cfg.f, cfg.m0, cfg.family, cfg.k_lo, cfg.k_hi,
                              cfg.m_ref, times, cfg.h_max, cfg.T, threads=_threads(),
                              return_reference=True)
    checks = {}
    try:
        fit = rate_fit(table, EXACT_TOL)
        slope, c_hat, exact = fit.slope, fit.c_hat, False
        checks["rate"] = _check(slope, slope - float(cfg.get("min_slope", 0.9)))
        checks["c_hat_stable"] = _check(fit.c_hat_spread,
                                        float(cfg.get("max_c_hat_spread", 2.0)) - fit.c_hat_spread)
    except DegenerateFitError as exc:
        slope, c_hat, exact = math.nan, exc.c_hat, True
        max_d = max((r.D for r in table), default=0.0)
        checks["exact"] = _check(max_d, float(cfg.get("exact_tol", 1e-8)) - max_d)
    for k, v in timeslice_bounds(ref, cfg.f).items():
        checks["reference_" + k] = _check(v, v + BOUND_TOL)
    fam = family_name(cfg.family)
    rows = [[fam, r.k, r.N, r.mesh, r.D, slope, c_hat] for r in table]
    summary = {"slope": None if exact else slope, "C_hat": c_hat, "exact": exact,
               "m_ref": cfg.m_ref,
               "table": [{"k": r.k, "N_k": r.N, "mesh": r.mesh, "D_k": r.D} for r in table]}
    samples = [(t, ref.at(t)) for t in times]
    return rows, samples, summary, checks


def run_depend(cfg: Config):
    p = make_partition(cfg.family, cfg.k, cfg.T)
    max_ratio = float(cfg.get("max_ratio", 100.0))
    try:
        num, den = continuous_dependence(cfg.rule, cfg.f, cfg.m0, cfg.n0, cfg.family, cfg.k,
                                         cfg.sample_times, cfg.h_max, cfg.T)
        ratio = num / den
        checks = {"ratio": _check(ratio, max_ratio - ratio)}
    except ZeroDenominatorError as exc:
        num, den, ratio = exc.num, 0.0, None
        checks = {"identical_data": _check(num, EXACT_TOL - num)}
    summary = {"num": num, "den": den, "ratio": ratio, "k": cfg.k}
    rows = [[family_name(cfg.family), cfg.k, p.N, p.mesh(), num, None, None]]
    times = cfg.sample_times or default_sample_times(Partition.uniform(4, cfg.T))
    traj = euler_evolve(cfg.rule, cfg.f, cfg.m0, p, times, cfg.h_max)
    return rows, [(t, traj.at(t)) for t in times], summary, checks


def run_norms(cfg: Config):
    m = parse_measure(cfg.raw["measure"]) if "measure" in cfg.raw else cfg.m0
    if m is None:
        raise ConfigInvalid("norms mode needs 'measure' or 'm0'")
    bl, wbl = dual_norm(m, NormKind.DUAL_BL)
    fm, _ = dual_norm(m, NormKind.DUAL_FM)
    tv = total_variation(m)
    summary = {"bl": bl, "fm": fm, "tv": tv, "mass": mass(m),
               "witness_bl": {"values": wbl.values.tolist(), "sup_budget": wbl.sup_budget,
                              "lip_budget": wbl.lip_budget}}
    tol = 1e-9
    checks = {"bl_le_fm": _check(fm - bl, fm - bl + tol),
              "fm_le_2bl": _check(2 * bl - fm, 2 * bl - fm + tol),
              "bl_le_tv": _check(tv - bl, tv - bl + tol)}
    if len(m) <= ORACLE_MAX_SUPPORT:
        grid = int(cfg.get("grid", 2001))
        oracle = dual_norm_oracle(m, NormKind.DUAL_BL, grid)
        summary["oracle_bl"] = oracle
        checks["oracle_below_lp"] = _check(bl - oracle, bl - oracle + tol)
    return [], [], summary, checks


def run_verify(cfg: Config):
    n = int(cfg.get("instances", 20))
    margins = inequality_suite(cfg.seed, n, cfg.h_max)
    defects = semigroup_suite(cfg.seed, n, cfg.h_max)
    checks = {k: _check(min(v), min(v) + BOUND_TOL) for k, v in sorted(margins.items())}
    limits = {"flow_semigroup": 1e-8, "q_semigroup": 1e-7}
    for k, v in sorted(defects.items()):
        checks[k] = _check(max(v), limits[k] - max(v))
    summary = {"instances": n, "seed": cfg.seed}
    return [], [], summary, checks


RUNNERS = {"simulate": run_simulate, "converge": run_converge, "depend": run_depend,
           "norms": run_norms, "verify": run_verify}


def run(config_path, mode: str | None = None, out_dir=None, seed: int | None = None) -> int:
    """Execute one config; returns the process exit status."""
    try:
        with open(config_path) as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ConfigInvalid("config must be a JSON object")
        mode = mode or raw.get("mode", "").lower()
        if mode not in MODES:
            raise ConfigInvalid(f"unknown mode {mode!r}")
        if seed is not None:
            raw["seed"] = seed
        cfg = Config(raw, mode)
    except (OSError, json.JSONDecodeError, ConfigInvalid, KeyError, TypeError, ValueError) as exc:
        log.error("invalid config: %s", exc)
        return 2

    out = Path(out_dir or raw.get("out_dir") or Path("runs") / mode)
    try:
        out.mkdir(parents=True, exist_ok=True)
        rows, samples, summary, checks = RUNNERS[mode](cfg)
    except ConfigInvalid as exc:
        log.error("invalid config: %s", exc)
        return 2
    except (MeasureFlowError, ValueError, ArithmeticError, OSError) as exc:
        log.error("run failed: %s", exc)
        return 1

    passed = all(c["pass"] for c in checks.values())
    summary.update({"mode": mode, "checks": checks, "passed": passed})
    _write_csv(out / "results.csv", rows)
    _write_traj(out / "trajectory.jsonl", samples)
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
    for name, c in checks.items():
        log.info("%-28s %-4s value=%r margin=%r", name, "ok" if c["pass"] else "FAIL",
                 c["value"], c["margin"])
    return 0 if passed else 3


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="mf", description=__doc__.splitlines()[0])
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", required=True, type=Path, help="experiment config (JSON)")
    parser.add_argument("--out-dir", type=Path, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    return run(args.config, args.mode, args.out_dir, args.seed)


if __name__ == "__main__":
    sys.exit(main())
