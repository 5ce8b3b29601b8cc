#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Runs the two hot loops (family maximin, clause membership) on representative
workloads, checks both backends agree bitwise, and prints a timing table.

    python benchmarks/bench_kernels.py [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from tangentrep import _kernels
from tangentrep import domainrep as dr
from tangentrep import maxmin as mm
from tangentrep.fields import catalog
from tangentrep.geometry import sample_grid


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def maximin_cases():
    sine = catalog("sine_1d")
    rep = mm.build_representation(sine, sine.domain, 201)
    X = sample_grid(sine.domain, 2001)
    yield "maximin sine_1d res=201 eval=2001", rep, X

    saddle = catalog("saddle")
    rep = mm.build_representation(saddle, saddle.domain, 41)
    yield "maximin saddle res=41^2 eval=sites", rep, rep.sites

    bowl = catalog("negative_bowl")
    rep = mm.build_representation(bowl, bowl.domain, 41)
    yield "maximin negative_bowl res=41^2 eval=sites", rep, rep.sites


def clause_cases():
    dom = dr.ImplicitDomain2D.peanut()
    rep = dr.build_domain_rep(dom, 21, 64)
    yield "membership peanut base=21 rays=64 grid=101^2", rep, dom.grid(101)

    disk = dr.ImplicitDomain2D.unit_disk()
    rep = dr.build_domain_rep(disk, 5, 64)
    yield "membership disk base=5 rays=64 grid=201^2", rep, disk.grid(201)


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    impls = _kernels.available_backends()
    if "compiled" not in impls:
        print("compiled kernels not built; timing the fallback alone")
    rows = []

    for name, rep, X in maximin_cases():
        members, offsets = rep._csr
        gvals = rep.plane_values_at(X)
        results = {}
        times = {}
        for backend, impl in impls.items():
            times[backend] = _time(lambda: impl.maximin_block(gvals, members, offsets),
                                   args.repeats)
            results[backend] = impl.maximin_block(gvals, members, offsets)
        if len(results) == 2 and not np.array_equal(results["compiled"],
                                                    results["fallback"]):
            raise SystemExit(f"backend mismatch in {name}")
        rows.append((name, times))

    for name, rep, Y in clause_cases():
        members, offsets = rep._csr
        slack = np.ascontiguousarray(Y @ rep._normals.T - rep._offsets)
        results = {}
        times = {}
        for backend, impl in impls.items():
            times[backend] = _time(
                lambda: impl.clause_any_all_block(slack, members, offsets, 1e-12),
                args.repeats)
            results[backend] = impl.clause_any_all_block(slack, members, offsets, 1e-12)
        if len(results) == 2 and not np.array_equal(results["compiled"],
                                                    results["fallback"]):
            raise SystemExit(f"backend mismatch in {name}")
        rows.append((name, times))

    width = max(len(name) for name, _ in rows)
    header = f"{'case':<{width}}  fallback[ms]  compiled[ms]  speedup"
    print(header)
    print("-" * len(header))
    for name, times in rows:
        fb = times.get("fallback", float("nan")) * 1e3
        cp = times.get("compiled", float("nan")) * 1e3
        speed = fb / cp if cp == cp and cp > 0 else float("nan")
        print(f"{name:<{width}}  {fb:12.3f}  {cp:12.3f}  {speed:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
