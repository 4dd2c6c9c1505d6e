"""Benchmark the census kernel: compiled extension vs pure Python.

The census loop (circle counts over all 2^n marker states) dominates the
Jones state sum for larger diagrams.  Builds a family of torus-style
diagrams by repeated R1/R2 complications of the trefoil and times both
implementations on each.

Run:  python bench/benchmark_census.py [max_crossings]
"""

from __future__ import annotations

import sys
import time

from khovanov import MovePatch, apply_move, parse_pd
from khovanov import kernels


def grow(diagram, target):
    arc = 1
    while diagram.n < target:
        kind = "R2" if (target - diagram.n) >= 2 else "R1"
        diagram, _ = apply_move(
            diagram, MovePatch(kind, "complicate", arcs=(arc,), variant="+")
        )
        arc = (arc % max(diagram.arcs)) + 1
    return diagram


def time_impl(diagram, impl):
    t0 = time.perf_counter()
    counts = kernels.census_circle_counts(diagram, impl=impl)
    return time.perf_counter() - t0, counts


def main():
    top = int(sys.argv[1]) if len(sys.argv) > 1 else 18
    have_cython = kernels.IMPLEMENTATION == "cython"
    print(f"selected kernel: {kernels.IMPLEMENTATION}")
    print(f"{'n':>3} {'states':>9} {'python':>10} {'cython':>10} {'speedup':>8}")
    base = parse_pd("X[4,2,5,1] X[6,4,1,3] X[2,6,3,5]")
    for n in range(8, top + 1, 2):
        diagram = grow(base, n)
        t_py, c_py = time_impl(diagram, "python")
        if have_cython:
            t_cy, c_cy = time_impl(diagram, "cython")
            assert c_py == c_cy, "kernel results disagree"
            print(f"{n:>3} {1 << n:>9} {t_py:>9.3f}s {t_cy:>9.3f}s "
                  f"{t_py / t_cy:>7.1f}x")
        else:
            print(f"{n:>3} {1 << n:>9} {t_py:>9.3f}s {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
