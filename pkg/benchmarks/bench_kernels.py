#!/usr/bin/env python3
"""Benchmark the channel-integral kernels: numba JIT vs pure NumPy fallback.

Each mode runs in its own subprocess (the path is chosen at import time via
OAMTURB_NO_NUMBA); the workload is a small strength sweep of (a, b) pairs,
timed after one warm-up evaluation so JIT compilation is excluded.

Usage:  python benchmarks/bench_kernels.py [--points N] [--repeats R]
"""

import argparse
import os
import subprocess
import sys

WORKLOAD = """
import time
import numpy as np
import oamturb as ot

beam1 = ot.BeamParams(waist=1.0, l0=1)
beam10 = ot.BeamParams(waist=1.0, l0=10)
grid = np.linspace(0.05, 3.0, {points})

ot.channel_ab(beam1, ot.r0_from_x(beam1, 1.0), 1e-9)  # warm-up / JIT compile

best = float("inf")
for _ in range({repeats}):
    t0 = time.perf_counter()
    for x in grid:
        ot.channel_ab(beam1, ot.r0_from_x(beam1, float(x)), 1e-9)
        ot.channel_ab(beam10, ot.r0_from_x(beam10, float(x)), 1e-9)
    best = min(best, time.perf_counter() - t0)
print(f"{{'numba' if ot.NUMBA_ENABLED else 'numpy'}} {{best:.6f}}")
"""


def run_mode(disable_numba: bool, points: int, repeats: int) -> tuple[str, float]:
    env = dict(os.environ)
    env["OAMTURB_NO_NUMBA"] = "1" if disable_numba else "0"
    out = subprocess.run(
        [sys.executable, "-c", WORKLOAD.format(points=points, repeats=repeats)],
        env=env, capture_output=True, text=True, check=True,
    )
    mode, seconds = out.stdout.split()
    return mode, float(seconds)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=30,
                        help="strength grid points per l0 (default 30)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed repetitions, best-of (default 3)")
    args = parser.parse_args()

    n_integrals = 2 * 2 * args.points  # (a, b) for two beams per grid point
    print(f"workload: {n_integrals} channel integrals at tol 1e-9, best of {args.repeats}\n")
    results = {}
    for disable in (False, True):
        mode, seconds = run_mode(disable, args.points, args.repeats)
        results[mode] = seconds
        print(f"  {mode:6s}  {seconds * 1e3:9.1f} ms   "
              f"({seconds / n_integrals * 1e3:7.3f} ms per integral)")
    if "numba" in results and "numpy" in results:
        print(f"\nspeedup: {results['numpy'] / results['numba']:.1f}x")
    else:
        print("\nnumba path unavailable; only the fallback was timed")


if __name__ == "__main__":
    main()
