#!/usr/bin/env python3
"""Benchmark: compiled kernel core vs NumPy fallback.

Times the three hot loops (linear kernel sums, bilinear double sums,
oscillation window reduction) on workload shapes that mirror the real
pipelines: small far-field certificate batches, large probe batches, and
the dim-2 oscillation quadrature.

Usage:
    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from bmolab._kernels import fallback

try:
    from bmolab._kernels import _core
except ImportError:
    _core = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_linear(impl, n_pts, n_src, alpha, rng):
    pts = rng.uniform(4.0, 8.0, size=(n_pts, 1))
    src = rng.uniform(-1.0, 1.0, size=(n_src, 1))
    fvals = rng.normal(size=n_src)
    bpts = rng.normal(size=n_pts)
    bsrc = rng.normal(size=n_src)
    symtab = np.array([1.0, -1.0])
    return lambda: impl.linear_sum(pts, src, fvals, bpts, bsrc, symtab,
                                   fallback.SYM_PAIR, alpha, 1e-3)


def bench_bilinear(impl, n_pts, n_src, alpha, rng):
    pts = rng.uniform(5.0, 9.0, size=(n_pts, 1))
    y1 = rng.uniform(-1.0, 1.0, size=(n_src, 1))
    y2 = rng.uniform(-1.0, 1.0, size=(n_src, 1))
    f1, f2 = rng.normal(size=n_src), rng.normal(size=n_src)
    bpts = rng.normal(size=n_pts)
    b1 = rng.normal(size=n_src)
    return lambda: impl.bilinear_sum(pts, bpts, y1, f1, b1, y2, f2, None,
                                     alpha, 1e-3, 1)


def bench_osc(impl, n0, rng):
    diff = rng.normal(size=(2 * n0 - 1, 2 * n0 - 1))
    shift = rng.normal(size=(n0, n0))
    return lambda: impl.osc_reduce(diff, shift, 0)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _core is None:
        print("compiled core not built; run pip install -e . with Cython available")
        return

    rng = np.random.default_rng(0)
    cases = []
    for n_pts, n_src in ((128, 128), (512, 4096), (4096, 16384)):
        cases.append((f"linear  pts={n_pts:<5} src={n_src:<6} alpha=0",
                      bench_linear(fallback, n_pts, n_src, 0.0, rng),
                      bench_linear(_core, n_pts, n_src, 0.0, rng)))
    cases.append(("linear  pts=512   src=4096   alpha=0.5 (pow path)",
                  bench_linear(fallback, 512, 4096, 0.5, rng),
                  bench_linear(_core, 512, 4096, 0.5, rng)))
    for n_pts, n_src in ((64, 128), (128, 512)):
        cases.append((f"bilinear pts={n_pts:<4} src={n_src:<4} alpha=1",
                      bench_bilinear(fallback, n_pts, n_src, 1.0, rng),
                      bench_bilinear(_core, n_pts, n_src, 1.0, rng)))
    for n0 in (32, 64):
        cases.append((f"osc_reduce dim2 n0={n0}",
                      bench_osc(fallback, n0, rng),
                      bench_osc(_core, n0, rng)))

    print(f"{'case':<48} {'numpy':>10} {'cython':>10} {'speedup':>8}")
    for name, f_np, f_cy in cases:
        t_np = timeit(f_np, args.repeat)
        t_cy = timeit(f_cy, args.repeat)
        print(f"{name:<48} {t_np * 1e3:>8.2f}ms {t_cy * 1e3:>8.2f}ms {t_np / t_cy:>7.2f}x")


if __name__ == "__main__":
    main()
