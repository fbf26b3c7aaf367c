"""Compare the compiled and pure-Python integration kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--t-max 50] [--tol 1e-10]

Each case runs both backends on the same inputs, reports the best wall
time of ``--repeat`` runs, the speedup, and the largest difference
between the two trajectories.
"""
from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np

from lowinertia import _pykernels, kernels
from lowinertia.model import StationScenario
from lowinertia.oracle import machines_from_scenario, star_equilibrium


def cases(t_max: float, samples: int):
    t = np.linspace(0.0, t_max, samples)
    yield ("pendulum", kernels.PENDULUM, np.array([0.5, 1.5, 0.5]),
           np.array([math.pi / 6, 0.0]), t)
    for n in (3, 11):
        station = StationScenario.from_initial_angle("cage", 2.0, 0.3, math.pi / 3, 1.0, 2.0)
        ms, step = machines_from_scenario(station, n)
        params = np.concatenate([ms.j, ms.k_self, ms.k_link, ms.tau, step.final])
        y0 = np.concatenate([star_equilibrium(ms), np.zeros(n)])
        yield f"star N={n}", kernels.STAR, params, y0, t


def best_time(fn, repeat: int):
    best, out = math.inf, None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--t-max", type=float, default=50.0)
    parser.add_argument("--samples", type=int, default=2001)
    parser.add_argument("--tol", type=float, default=1e-10)
    args = parser.parse_args(argv)

    compiled = kernels.backend_module(pure=False)
    if compiled is _pykernels:
        print("compiled core not built; nothing to compare", file=sys.stderr)
        return 1
    print(f"{'case':<12} {'steps':>7} {'compiled [s]':>13} {'python [s]':>11} {'speedup':>8} {'max diff':>10}")
    for name, system, params, y0, t in cases(args.t_max, args.samples):
        run = lambda mod: mod.dopri5(system, params, y0, t, args.tol, args.tol)
        tc, (yc, steps, _, _) = best_time(lambda: run(compiled), args.repeat)
        tp, (yp, _, _, _) = best_time(lambda: run(_pykernels), args.repeat)
        diff = float(np.abs(yc - yp).max())
        print(f"{name:<12} {steps:>7d} {tc:>13.4f} {tp:>11.4f} {tp / tc:>8.0f} {diff:>10.1e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
