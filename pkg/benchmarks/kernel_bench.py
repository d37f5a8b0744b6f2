"""Throughput benchmark: compiled revision kernel vs the pure-numpy fallback.

Runs the trend-mixed step on a population hovering below the adoption
threshold (so no early absorption) and reports steps per second.  The two
backends are bit-identical by construction; this script also verifies that on
the benchmarked configurations before timing them.

Usage: python benchmarks/kernel_bench.py [--steps 2000]
"""

import argparse
import time

import numpy as np

from cdsim import _kernels_py

try:
    from cdsim import _kernels
except ImportError:
    _kernels = None

CASES = [
    # n, k, u_t, u_v
    (500, 3, 0.05, 0.0),
    (2000, 3, 0.05, 0.0),
    (2000, 3, 0.05, 1.0),
    (10000, 5, 0.02, 0.5),
]


def run(kernel, n, k, u_t, u_v, steps, seed=7):
    rng = np.random.Generator(np.random.PCG64(seed))
    x = -np.ones(n, dtype=np.int8)
    x[: n // 50] = 1
    committed = np.zeros(n, dtype=bool)
    committed[: n // 50] = True
    c_prev = c_now = n // 50
    t0 = time.perf_counter()
    for _ in range(steps):
        x, c_new = kernel.trend_step(x, committed, k, u_t, u_v, 0.0,
                                     c_prev, c_now, True, True, rng)
        c_prev, c_now = c_now, c_new
    return time.perf_counter() - t0, x


def verify_parity(n, k, u_t, u_v):
    _, xa = run(_kernels, n, k, u_t, u_v, steps=50)
    _, xb = run(_kernels_py, n, k, u_t, u_v, steps=50)
    if not np.array_equal(xa, xb):
        raise AssertionError(f"backend mismatch at n={n}, k={k}, u_v={u_v}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=2000)
    args = parser.parse_args()

    if _kernels is None:
        print("compiled kernel not available; nothing to compare")
        return

    print(f"{'case':>28} {'python steps/s':>16} {'cython steps/s':>16} {'speedup':>9}")
    for n, k, u_t, u_v in CASES:
        verify_parity(n, k, u_t, u_v)
        t_py, _ = run(_kernels_py, n, k, u_t, u_v, args.steps)
        t_cy, _ = run(_kernels, n, k, u_t, u_v, args.steps)
        label = f"n={n} k={k} u_v={u_v}"
        print(f"{label:>28} {args.steps / t_py:16.0f} {args.steps / t_cy:16.0f} "
              f"{t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
