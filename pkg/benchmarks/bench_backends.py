"""Throughput comparison: compiled stepper vs pure-Python fallback.

Usage: python benchmarks/bench_backends.py [--steps N] [--repeat R]

Both backends consume the same variate stream, so this also cross-checks
that the final ball counts agree bit for bit before timing anything.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from urnfield.model import ModelParams
from urnfield.urn import HAVE_KERNEL, run


def time_backend(params, n_steps, backend, repeat):
    best = np.inf
    for r in range(repeat):
        t0 = time.perf_counter()
        run(params, n_steps, seed=1234 + r, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=50_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if not HAVE_KERNEL:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")

    cases = [(3, 2, 0.75), (3, 2, 7.42), (4, 3, 1.5), (6, 4, 2.0)]
    print(f"{args.steps} steps per run, best of {args.repeat}\n")
    print(f"{'model':>14} {'compiled':>12} {'python':>12} {'speedup':>9} {'steps/s (compiled)':>20}")
    for d, c, alpha in cases:
        params = ModelParams.uniform(d, c, alpha)
        agree = np.array_equal(
            run(params, 2000, seed=7, backend="compiled").final_state.balls,
            run(params, 2000, seed=7, backend="python").final_state.balls,
        )
        if not agree:
            raise SystemExit(f"backend mismatch for d={d}, c={c} -- refusing to benchmark")
        fast = time_backend(params, args.steps, "compiled", args.repeat)
        slow = time_backend(params, args.steps, "python", args.repeat)
        label = f"d={d} c={c} a={alpha:g}"
        print(f"{label:>14} {fast:>10.3f}s {slow:>10.3f}s {slow / fast:>8.1f}x {args.steps / fast:>20,.0f}")


if __name__ == "__main__":
    main()
