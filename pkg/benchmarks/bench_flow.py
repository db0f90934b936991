"""Compare the compiled and pure-Python stopped-flow kernels.

    python benchmarks/bench_flow.py --atoms 2000 --h-max 1e-3
"""

import argparse
import time

import numpy as np

from measureflow import flow
from measureflow.suite import random_pl


def bench(backend, v, f, x0, t, h_max, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = flow.flow_many(v, f, x0, t, h_max, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--atoms", type=int, default=2000)
    parser.add_argument("--t", type=float, default=1.0)
    parser.add_argument("--h-max", type=float, default=1e-3)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    v, f = random_pl(rng, n_inner=6), random_pl(rng, n_inner=6)
    x0 = rng.uniform(0, 1, args.atoms)
    steps = args.atoms * int(np.ceil(args.t / args.h_max))
    print(f"{args.atoms} atoms x {steps // args.atoms} RK4 steps")
    timings, outs = {}, {}
    for name in flow.available_backends():
        rep = args.repeat if name == "compiled" else 1
        timings[name], outs[name] = bench(name, v, f, x0, args.t, args.h_max, rep)
        print(f"  {name:9s} {timings[name]:8.3f} s  ({steps / timings[name]:.3g} atom-steps/s)")
    if len(timings) == 2:
        # hit times are NaN for free particles
        diff = max(float(np.max(np.abs(np.nan_to_num(a.astype(float)) - np.nan_to_num(b.astype(float))),
                                initial=0.0))
                   for a, b in zip(outs["compiled"], outs["python"]))
        print(f"  speedup {timings['python'] / timings['compiled']:.1f}x, max output diff {diff:.1e}")


if __name__ == "__main__":
    main()
