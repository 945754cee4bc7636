#!/usr/bin/env python3
"""Benchmark the compiled integrator kernel against the pure-Python fallback.

Workload: oracle integration of the four built-in x-systems over t in [0, 1]
at tight tolerances, the dominant cost of the verification suite.  Both
backends implement the identical stepping arithmetic, so the script also
reports the largest state discrepancy (expected: exactly 0.0).

Run:  python benchmarks/bench_kernel.py [--runs 25]
"""

import argparse
import cmath
import math
import random
import time

from rootflow import _backend
from rootflow.generator import builtin_example
from rootflow.oracle import OdeProblem, PolyVectorField, integrate


def workload(runs, force_pure):
    rng = random.Random(12)
    grid = [i / 100 for i in range(101)]
    total_steps = 0
    t0 = time.perf_counter()
    states = []
    for i in range(runs):
        ex = 1 + (i % 4)
        a = cmath.rect(math.sqrt(rng.random()), rng.uniform(0, 2 * math.pi))
        b = cmath.rect(math.sqrt(rng.random()), rng.uniform(0, 2 * math.pi))
        _, xs = builtin_example(ex, a, b)
        prob = OdeProblem(PolyVectorField([xs.p1, xs.p2]),
                          (0.7 + 0.2j, -0.6 - 0.15j), (0.0, 1.0),
                          rtol=1e-10, atol=1e-10)
        res = integrate(prob, grid, force_pure=force_pure)
        total_steps += res.n_accepted + res.n_rejected
        states.append(res.states)
    return time.perf_counter() - t0, total_steps, states


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--runs", type=int, default=25)
    args = parser.parse_args()

    if not _backend.HAVE_COMPILED:
        print("compiled kernel not built; benchmarking the pure backend only")
        elapsed, steps, _ = workload(args.runs, force_pure=True)
        print(f"pure python: {elapsed:.3f}s for {args.runs} runs ({steps} steps)")
        return

    # warm-up
    workload(2, force_pure=False)
    workload(2, force_pure=True)

    t_fast, steps_fast, states_fast = workload(args.runs, force_pure=False)
    t_pure, steps_pure, states_pure = workload(args.runs, force_pure=True)

    worst = 0.0
    for sa, sb in zip(states_fast, states_pure):
        for ra, rb in zip(sa, sb):
            for va, vb in zip(ra, rb):
                worst = max(worst, abs(va - vb))

    print(f"runs: {args.runs} integrations, 101 samples each, rtol=atol=1e-10")
    print(f"compiled kernel : {t_fast:.3f}s  ({steps_fast} steps)")
    print(f"pure python     : {t_pure:.3f}s  ({steps_pure} steps)")
    print(f"speedup         : {t_pure / t_fast:.1f}x")
    print(f"max state discrepancy between backends: {worst:.3e}")


if __name__ == "__main__":
    main()
