"""Benchmark the numba kernels against the pure-numpy fallbacks.

Times each kernel on training-realistic sizes, checks that both backends
agree numerically, and prints a speedup table. Run:

    python3 benchmarks/bench_kernels.py [--repeats 200]
"""

import argparse
import time

import numpy as np

from mlc import kernels


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_resize(rng, repeats):
    src = rng.random((48, 48, 3))
    out_numba = kernels.resize_bilinear_numba(src, 64, 64)
    out_numpy = kernels.resize_bilinear_numpy(src, 64, 64)
    diff = np.abs(out_numba - out_numpy).max()
    t_numba = best_of(lambda: kernels.resize_bilinear_numba(src, 64, 64), repeats)
    t_numpy = best_of(lambda: kernels.resize_bilinear_numpy(src, 64, 64), repeats)
    return "resize 48x48 -> 64x64", t_numba, t_numpy, diff


def bench_pool(rng, repeats):
    src = rng.random((64, 64, 3))
    out_numba = kernels.adaptive_pool_numba(src, 16, 16)
    out_numpy = kernels.adaptive_pool_numpy(src, 16, 16)
    diff = np.abs(out_numba - out_numpy).max()
    t_numba = best_of(lambda: kernels.adaptive_pool_numba(src, 16, 16), repeats)
    t_numpy = best_of(lambda: kernels.adaptive_pool_numpy(src, 16, 16), repeats)
    return "adaptive pool 64x64 -> 16x16", t_numba, t_numpy, diff


def bench_paint(rng, repeats):
    kinds = np.array([0, 1, 2], dtype=np.int64)
    cys = rng.uniform(16, 48, 3)
    cxs = rng.uniform(16, 48, 3)
    halves = rng.uniform(8, 16, 3)
    colors = rng.random((3, 3))
    base = np.full((64, 64, 3), 0.5)

    a, b = base.copy(), base.copy()
    kernels.paint_shapes_numba(a, kinds, cys, cxs, halves, colors)
    kernels.paint_shapes_numpy(b, kinds, cys, cxs, halves, colors)
    diff = np.abs(a - b).max()

    def run_numba():
        kernels.paint_shapes_numba(base.copy(), kinds, cys, cxs, halves, colors)

    def run_numpy():
        kernels.paint_shapes_numpy(base.copy(), kinds, cys, cxs, halves, colors)

    return "paint 3 shapes on 64x64", best_of(run_numba, repeats), best_of(run_numpy, repeats), diff


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200, help="timing repeats per kernel")
    args = parser.parse_args()

    if not kernels.HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':<30} {'numba':>10} {'numpy':>10} {'speedup':>8} {'max|diff|':>10}")
    for bench in (bench_resize, bench_pool, bench_paint):
        name, t_numba, t_numpy, diff = bench(rng, args.repeats)
        print(
            f"{name:<30} {t_numba * 1e6:>8.1f}us {t_numpy * 1e6:>8.1f}us "
            f"{t_numpy / t_numba:>7.1f}x {diff:>10.2e}"
        )
        assert diff <= 1e-12, f"{name}: backends disagree by {diff}"


if __name__ == "__main__":
    main()
