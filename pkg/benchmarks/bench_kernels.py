#!/usr/bin/env python3
"""Benchmark the numba-jitted kernels against their pure-numpy fallbacks.

Times the two hot inner loops (the spectral pair sums behind chi_F / deltaV
and the greedy eigenvector-matching sweep) at a few Hilbert-space sizes.
The active backend for library calls is still chosen by ADIATHERM_KERNELS;
this script calls both implementations directly.

Usage: python benchmarks/bench_kernels.py [--sizes 256,512,1024]
"""

import argparse
import time

import numpy as np

from adiatherm import _kernels


def _time(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def bench_pair_sums(sizes):
    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}{'d':>6}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}")
    numba_chi = _kernels._chi_pair_sum_impl if _kernels.backend_name() == "numba" else None
    numba_pair = _kernels._pair_weight_sum_impl if _kernels.backend_name() == "numba" else None
    for d in sizes:
        energies = np.sort(rng.integers(-d // 8, d // 8 + 1, size=d).astype(float))
        weights = np.exp(-0.3 * (energies - energies.min()))
        v2 = np.abs(rng.standard_normal((d, d)))
        v2 = (v2 + v2.T) / 2.0
        tol = 1e-9 * (energies.max() - energies.min())

        t_np, ref = _time(_kernels._numpy_chi_pair_sum, energies, weights, v2, tol)
        if numba_chi is not None:
            numba_chi(energies[:4], weights[:4], v2[:4, :4], tol)  # compile
            t_nb, got = _time(numba_chi, energies, weights, v2, tol)
            assert abs(got - ref) <= 1e-9 * max(1.0, abs(ref))
            print(f"{'chi_pair_sum':<18}{d:>6}{t_np*1e3:>12.2f}{t_nb*1e3:>12.2f}{t_np/t_nb:>9.1f}")
        else:
            print(f"{'chi_pair_sum':<18}{d:>6}{t_np*1e3:>12.2f}{'n/a':>12}{'':>9}")

        t_np, ref = _time(_kernels._numpy_pair_weight_sum, weights, v2)
        if numba_pair is not None:
            numba_pair(weights[:4], v2[:4, :4])
            t_nb, got = _time(numba_pair, weights, v2)
            assert abs(got - ref) <= 1e-9 * max(1.0, abs(ref))
            print(f"{'pair_weight_sum':<18}{d:>6}{t_np*1e3:>12.2f}{t_nb*1e3:>12.2f}{t_np/t_nb:>9.1f}")
        else:
            print(f"{'pair_weight_sum':<18}{d:>6}{t_np*1e3:>12.2f}{'n/a':>12}{'':>9}")


def bench_greedy(sizes):
    rng = np.random.default_rng(1)
    numba_sweep = _kernels._greedy_sweep_impl if _kernels.backend_name() == "numba" else None
    for d in sizes:
        # near-permutation overlap with a sprinkle of ambiguous pairs
        a = np.eye(d) * 0.95 + rng.uniform(0, 0.02, size=(d, d))
        order = np.argsort(-a, axis=None, kind="stable")
        rows = (order // d).astype(np.int64)
        cols = (order % d).astype(np.int64)

        t_np, ref = _time(_kernels._numpy_greedy_sweep, rows, cols, d)
        if numba_sweep is not None:
            numba_sweep(rows[:4], cols[:4], 2)
            t_nb, got = _time(numba_sweep, rows, cols, d)
            assert np.array_equal(got, ref)
            print(f"{'greedy_sweep':<18}{d:>6}{t_np*1e3:>12.2f}{t_nb*1e3:>12.2f}{t_np/t_nb:>9.1f}")
        else:
            print(f"{'greedy_sweep':<18}{d:>6}{t_np*1e3:>12.2f}{'n/a':>12}{'':>9}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="256,512,1024", help="comma-separated dimensions")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    print(f"active library backend: {_kernels.backend_name()}")
    bench_pair_sums(sizes)
    bench_greedy(sizes)


if __name__ == "__main__":
    main()
