"""Compare the compiled cubic-convolution kernel with the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from gowers import _backend
from gowers.cube import shift_table
from gowers.group import cyclic

CASES = [(64, 2), (256, 2), (400, 2), (16, 3), (48, 3), (12, 4), (24, 4)]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = _backend.available_backends()
    print(f"backends: {', '.join(backends)} (default {_backend.BACKEND})")
    print(f"{'N':>6} {'d':>2} " + " ".join(f"{b:>12}" for b in backends) + "   max |diff|")
    rng = np.random.default_rng(0)
    for n, d in CASES:
        group = cyclic(n)
        rows = rng.standard_normal((2**d - 1, n))
        add, shifts = group.add_table, shift_table(group, d)[1:]
        results, timings = {}, []
        for b in backends:
            results[b] = _backend.cubic_convolution(rows, add, shifts, backend=b)
            timings.append(best_of(lambda: _backend.cubic_convolution(rows, add, shifts, backend=b), args.repeat))
        diff = max(float(np.max(np.abs(results[b] - results["python"]))) for b in backends)
        print(f"{n:>6} {d:>2} " + " ".join(f"{t * 1e3:>10.2f}ms" for t in timings) + f"   {diff:.1e}")


if __name__ == "__main__":
    main()
