#!/usr/bin/env python3
"""Benchmark: pure-Python vs compiled GF(2) kernel on the boundary systems
that dominate the filling-radius search.

Usage: python benchmarks/bench_gf2.py [--sizes 24,36,48]
"""

from __future__ import annotations

import argparse
import time

from chainforge import _gf2py
from chainforge.complexes import boundary_faces
from chainforge.corpus import circle_metric, flat_torus
from chainforge.metric import build_rips

try:
    from chainforge import _gf2core
except ImportError:
    _gf2core = None


def boundary_system(ambient, k, cycle_coeffs):
    taus = list(ambient.simplices(k + 1))
    tau_pos = {t: i for i, t in enumerate(taus)}
    row_of = {}
    for t in taus:
        for f, _ in boundary_faces(t):
            row_of[f] = row_of.get(f, 0) | (1 << tau_pos[t])
    for s in cycle_coeffs:
        row_of.setdefault(s, 0)
    sigmas = sorted(row_of)
    rows = [row_of[s] for s in sigmas]
    rhs = [cycle_coeffs.get(s, 0) % 2 for s in sigmas]
    return rows, len(taus), rhs


def instances(circle_sizes):
    for n in circle_sizes:
        space = circle_metric(n)
        ambient = build_rips(space, space.diameter(), 2)
        cycle = {tuple(sorted((i, (i + 1) % n))): 1 for i in range(n)}
        yield f"circle{n} (dim-1 cycle, full Rips)", boundary_system(ambient, 1, cycle)
    for k in (5, 6):
        K = flat_torus(k)
        metric = K.path_metric()
        ambient = build_rips(metric, metric.diameter(), 3)
        cycle = {s: 1 for s in K.simplices(2)}
        yield f"torus{k}x{k} (dim-2 class, full Rips)", boundary_system(ambient, 2, cycle)


def run(name, rows, ncols, rhs, backend, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        sol = backend.solve(rows, ncols, rhs)
        best = min(best, time.perf_counter() - t0)
    return best, sol is not None


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="24,48")
    args = parser.parse_args()
    sizes = [int(x) for x in args.sizes.split(",")]

    print(f"{'instance':38} {'rows x cols':>16} {'pure':>9} {'compiled':>9} {'speedup':>8}")
    for name, (rows, ncols, rhs) in instances(sizes):
        t_pure, feas = run(name, rows, ncols, rhs, _gf2py)
        if _gf2core is not None:
            t_comp, feas2 = run(name, rows, ncols, rhs, _gf2core)
            assert feas == feas2
            speedup = f"{t_pure / t_comp:7.2f}x"
            comp = f"{t_comp * 1000:8.1f}"
        else:
            speedup, comp = "     n/a", "     n/a"
        print(f"{name:38} {len(rows):>7} x {ncols:<6} {t_pure * 1000:8.1f} {comp} {speedup}")
    if _gf2core is None:
        print("\ncompiled backend not built; run: python setup.py build_ext --inplace")


if __name__ == "__main__":
    main()
