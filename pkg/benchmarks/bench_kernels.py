#!/usr/bin/env python3
"""Benchmark the jit kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py [--repeat N]

The same workloads are timed through the numba dispatch path (when enabled)
and the numpy implementations.  Setting SPAPPROX_NO_NUMBA=1 makes the
dispatch itself use the fallback, in which case the two columns coincide.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from spapprox import _kernels


def timeit(fn, repeat: int) -> float:
    fn()  # warm-up / compile
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_modulus(repeat: int):
    rng = np.random.default_rng(0)
    lams = np.sort(rng.uniform(-32, 32, size=16))
    amps = rng.uniform(0.1, 1.0, size=16)
    hs = np.linspace(0.0, math.pi, 100_001)
    tre = np.zeros(1)
    tim = np.zeros(1)
    out = np.empty(hs.shape[0])

    def dispatch():
        _kernels.modulus_objective(lams, amps, hs, _kernels.PHI_ALPHA, 1.5, tre, tim, 2.0)

    def fallback():
        _kernels._modulus_objective_np(lams, amps, hs, _kernels.PHI_ALPHA, 1.5, tre, tim, 2.0, out)

    return timeit(dispatch, repeat), timeit(fallback, repeat)


def bench_sigma(repeat: int):
    impl = _kernels._sigma_series_impl
    py = getattr(impl, "py_func", impl)

    def dispatch():
        _kernels.sigma_series_sum(1.5, 1e-9, 50_000)

    def fallback():
        py(1.5, 1e-9, 50_000)

    return timeit(dispatch, repeat), timeit(fallback, repeat)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"numba enabled: {_kernels.NUMBA_ENABLED}")
    rows = [
        ("modulus objective (1e5 shifts x 16 freqs)", *bench_modulus(args.repeat)),
        ("correction series (s=1.5, tol 1e-9)", *bench_sigma(args.repeat)),
    ]
    print(f"{'kernel':<45} {'dispatch':>12} {'numpy/py':>12} {'speedup':>9}")
    for name, fast, slow in rows:
        print(f"{name:<45} {fast * 1e3:>10.2f}ms {slow * 1e3:>10.2f}ms {slow / fast:>8.1f}x")


if __name__ == "__main__":
    main()
