#!/usr/bin/env python3
"""Time the compiled kernels against the pure-Python fallback on a
mid-size instance, plus one end-to-end pipeline comparison.

Usage: python benchmarks/bench_kernels.py [--n 2000] [--p 0.02] [--repeat 3]
"""

import argparse
import math
import time

import numpy as np

from sparsepalette import _fallback, gnp, sample_lists
from sparsepalette.palette import DegPlusOnePalette

try:
    from sparsepalette import _speedups
except ImportError:
    _speedups = None


def timed(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=2000)
    parser.add_argument("--p", type=float, default=0.02)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    g = gnp(args.n, args.p, seed=1)
    ell = math.ceil(2 * math.log(args.n))
    lists = sample_lists(g, DegPlusOnePalette(), ell, seed=2)
    eu, ev = g.edges()
    order = np.arange(g.n, dtype=np.int64)
    rng = np.random.default_rng(0)
    colors = rng.integers(0, 5, size=g.n).astype(np.int64)

    cases = [
        ("count_triangles", lambda m: lambda: m.count_triangles(g.indptr, g.indices, eu, ev)),
        ("common_neighbor_counts", lambda m: lambda: m.common_neighbor_counts(g.indptr, g.indices, eu, ev)),
        ("lists_intersect", lambda m: lambda: m.lists_intersect(lists.lptr, lists.lcol, eu, ev)),
        ("c_degree_table", lambda m: lambda: m.c_degree_table(g.indptr, g.indices, lists.lptr, lists.lcol)),
        ("greedy_fill", lambda m: lambda: m.greedy_fill(
            g.indptr, g.indices, lists.lptr, lists.lcol, order, np.zeros(g.n, dtype=np.int64))),
        ("first_monochromatic", lambda m: lambda: m.first_monochromatic(g.indptr, g.indices, colors)),
    ]

    print(f"graph: n={g.n} m={g.m} ell={ell}  (repeat={args.repeat}, best-of)")
    header = f"{'kernel':<24}{'python':>12}{'cython':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, make in cases:
        t_py, out_py = timed(make(_fallback), args.repeat)
        if _speedups is None:
            print(f"{name:<24}{t_py * 1e3:>10.2f}ms{'-':>12}{'-':>10}")
            continue
        t_cy, out_cy = timed(make(_speedups), args.repeat)
        same = (
            np.array_equal(out_py, out_cy)
            if isinstance(out_py, np.ndarray)
            else out_py == out_cy or tuple(out_py) == tuple(out_cy)
        )
        flag = "" if same else "  !! outputs differ"
        print(f"{name:<24}{t_py * 1e3:>10.2f}ms{t_cy * 1e3:>10.2f}ms{t_py / t_cy:>9.1f}x{flag}")

    if _speedups is None:
        print("\ncompiled kernels unavailable; install with the Cython extension "
              "to compare backends")


if __name__ == "__main__":
    main()
