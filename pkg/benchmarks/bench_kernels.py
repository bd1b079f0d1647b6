"""Benchmark the numba-jitted kernels against their numpy fallbacks.

Run after installing the package:

    python3 benchmarks/bench_kernels.py

Set NOSELL_NO_NUMBA=1 to see the numpy-only numbers (the jit column
disappears).  First jit calls compile; compilation happens once up front
so the timed sections measure steady-state throughput.
"""

import argparse
import time

import numpy as np

from nosell import kernels


def best_of(func, repeats):
    durations = []
    for _ in range(repeats):
        start = time.perf_counter()
        func()
        durations.append(time.perf_counter() - start)
    return min(durations)


def bench_pair(name, jit_func, numpy_func, args, repeats):
    numpy_time = best_of(lambda: numpy_func(*args), repeats)
    if jit_func is not None:
        jit_func(*args)  # warm / compile
        jit_time = best_of(lambda: jit_func(*args), repeats)
        ratio = numpy_time / jit_time if jit_time > 0 else float("inf")
        print(f"{name:<28} numba {jit_time * 1e3:9.3f} ms   numpy {numpy_time * 1e3:9.3f} ms   x{ratio:5.1f}")
    else:
        print(f"{name:<28} numba       n/a      numpy {numpy_time * 1e3:9.3f} ms")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    options = parser.parse_args()
    repeats = options.repeats

    rng = np.random.default_rng(0)
    print(f"active backend: {kernels.BACKEND}")
    print()

    sorted_desc = np.ascontiguousarray(np.sort(rng.uniform(-10, 10, 1_000_000))[::-1])
    bench_pair(
        "threshold_scan n=1e6",
        kernels.threshold_scan_jit,
        kernels.threshold_scan_numpy,
        (sorted_desc, 1000.0),
        repeats,
    )

    deltas18 = rng.uniform(-10, 10, 18)
    bench_pair(
        "active_set_scan n=18",
        kernels.active_set_scan_jit,
        kernels.active_set_scan_numpy,
        (deltas18, 12.5, 1e-9),
        repeats,
    )

    deltas4 = rng.uniform(-10, 10, 4)
    bench_pair(
        "grid_l1_scan n=4 R=200",
        kernels.grid_l1_scan_jit,
        kernels.grid_l1_scan_numpy,
        (deltas4, 10.0, 200),
        repeats,
    )

    deltas3 = rng.uniform(-10, 10, 3)
    bench_pair(
        "grid_l1_scan n=3 R=2000",
        kernels.grid_l1_scan_jit,
        kernels.grid_l1_scan_numpy,
        (deltas3, 10.0, 2000),
        repeats,
    )


if __name__ == "__main__":
    main()
