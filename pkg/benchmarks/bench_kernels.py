"""Time the numba kernels against their pure-numpy twins.

    python benchmarks/bench_kernels.py [--graphs 20] [--seed 0] [--json out.json]

Both flavours are called directly (``*_nb`` / ``*_np``) on identical inputs,
after one warm-up call so numba compilation is not counted, and their
outputs are compared.  The workload mirrors the pairwise-path acceptance
run: every source of every random triangulation.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from anglemono import _kernels, generators
from anglemono.cap import generate_cap, run_pipeline
from anglemono.geometry import deg
from anglemono.paths import SweepContext


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def bench_paths(graphs, flavour):
    propagate = getattr(_kernels, f"propagate_reach_{flavour}")
    backtrack = getattr(_kernels, f"backtrack_paths_{flavour}")
    stats = getattr(_kernels, f"path_stats_{flavour}")
    t_reach = t_back = t_stats = 0.0
    digest = 0
    for g in graphs:
        ctx = SweepContext(g)
        gp = ctx.gp
        targets = np.arange(g.n, dtype=np.int64)
        for s in range(g.n):
            reach, dt = _timed(propagate, gp.offsets, gp.dart_head, ctx.masks, s, ctx.full)
            t_reach += dt
            hits = _kernels.lowest_bits(reach)
            (off, verts), dt = _timed(backtrack, gp.offsets, gp.dart_head, gp.dart_twin, ctx.masks, reach, s,
                                      targets, hits)
            t_back += dt
            _, dt = _timed(stats, off, verts, g.xy)
            t_stats += dt
            digest = hash((digest, verts.tobytes()))
    return {"propagate_reach": t_reach, "backtrack_paths": t_back, "path_stats": t_stats}, digest


def bench_geometry(graphs, layouts, flavour):
    crossings = getattr(_kernels, f"edge_crossings_{flavour}")
    overlaps = getattr(_kernels, f"triangle_overlaps_{flavour}")
    t_cross = t_over = 0.0
    found = 0
    for g in graphs:
        out, dt = _timed(crossings, g.xy, np.asarray(g.edges, dtype=np.int64), g.eps)
        t_cross += dt
        found += len(out)
    for tris in layouts:
        out, dt = _timed(overlaps, tris, 1e-12)
        t_over += dt
        found += len(out)
    return {"edge_crossings": t_cross, "triangle_overlaps": t_over}, found


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--graphs", type=int, default=20, help="random triangulations with 20-200 vertices")
    ap.add_argument("--caps", type=int, default=5, help="unfolded caps for the overlap kernel")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="also write the timings here")
    args = ap.parse_args(argv)
    if _kernels.propagate_reach_nb is None:
        sys.exit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    graphs = [generators.random_triangulation(rng, 20, 200) for _ in range(args.graphs)]
    layouts = [np.ascontiguousarray(run_pipeline(generate_cap(100, deg(10), seed=args.seed + k)).layout.placed)
               for k in range(args.caps)]

    # warm-up: trigger numba compilation outside the timed region
    bench_paths(graphs[:1], "nb")
    bench_geometry(graphs[:1], layouts[:1], "nb")

    results = {}
    checks = {}
    for flavour in ("nb", "np"):
        paths, digest = bench_paths(graphs, flavour)
        geom, found = bench_geometry(graphs, layouts, flavour)
        results[flavour] = {**paths, **geom}
        checks[flavour] = (digest, found)
    if checks["nb"] != checks["np"]:
        sys.exit("numba and numpy kernels disagree")

    pairs = sum(g.n * g.n for g in graphs)
    print(f"{args.graphs} graphs, {pairs} ordered pairs, {args.caps} cap layouts")
    print(f"{'kernel':<20}{'numba [s]':>12}{'numpy [s]':>12}{'speed-up':>10}")
    for k in results["nb"]:
        nb, npy = results["nb"][k], results["np"][k]
        print(f"{k:<20}{nb:>12.4f}{npy:>12.4f}{npy / max(nb, 1e-12):>9.1f}x")
    tot_nb, tot_np = sum(results["nb"].values()), sum(results["np"].values())
    print(f"{'total':<20}{tot_nb:>12.4f}{tot_np:>12.4f}{tot_np / tot_nb:>9.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"graphs": args.graphs, "pairs": pairs, "seconds": results}, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
