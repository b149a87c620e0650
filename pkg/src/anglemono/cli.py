"""``anglemono`` command-line front end.

Every command prints one JSON run report on stdout::

    {"command": ..., "inputs_digest": ..., "checks": {...}, "result": {...}, "artifacts": [...]}

Exit status: 0 when all checks pass, 1 when a check fails (no path, NoTree,
overlaps, ...), 2 on usage or input errors.  Angles on the command line and in
reports are degrees.  Output is byte-identical for identical input, flags and
seed; ``--timings`` adds wall-clock times, which of course are not.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import cap as capmod
from . import generators
from .geometry import deg
from .graph import augment, validate
from .io import InvalidGraph, ParseError, graph_from_json, graph_to_json, read_off, write_off
from .paths import (
    SweepContext, critical_angles, envelope, reach_set, spanning_ratio, verify_monotone,
)
from .spanning import (
    ConstructionFailed, NotA45Graph, TreeConstructionFailed, algorithm1_forest, check_forest,
    counterexample_graph, spanning_tree_oracle, tree45,
)
from .svg import forest_scene, graph_scene, layout_scene, render_svg


class UsageError(Exception):
    """Bad argument values; reported with exit status 2."""


def _deg(x: float) -> float:
    return round(math.degrees(x), 9)


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------


def _load_graph(path: str, width_deg: float):
    p = Path(path)
    text = p.read_text()
    g = graph_from_json(text, str(p))
    meta = json.loads(text)
    rep = validate(g, deg(max(width_deg, 90.0)))
    if not rep.ok:
        raise InvalidGraph(rep)
    return g, meta, text


def _vertex(g, v: int | None, meta: dict, name="source") -> int:
    if v is None:
        v = meta.get("source")
        if v is None:
            raise UsageError(f"--{name} is required")
    if not 0 <= v < g.n:
        raise UsageError(f"vertex {v} out of range 0..{g.n - 1}")
    return int(v)


def _width(args) -> float:
    if not 0 < args.width < 180:
        raise UsageError("--width must lie in (0, 180) degrees")
    return deg(args.width)


# ---------------------------------------------------------------------------
# commands: each returns (checks, result, artifacts, digest inputs)
# ---------------------------------------------------------------------------


def cmd_validate(args):
    g, _, text = _load_graph(args.graph, 0.0)
    rep = validate(g, _width(args))
    return {"valid": rep.ok}, rep.to_json(), [], [text]


def cmd_gen_graph(args):
    rng = np.random.default_rng(args.seed)
    fam = args.family
    if fam == "square":
        g = generators.rectilinear_grid(args.nx, args.ny, rng)
    elif fam == "grid45":
        g = generators.grid45(args.nx, args.ny, rng)
    elif fam == "equilateral":
        g = generators.equilateral_parallelogram(args.nx, args.ny, rng, args.jitter)
    elif fam == "hex":
        g = generators.hex_patch(args.k, rng, args.jitter)
    else:
        g = generators.random_triangulation(rng, args.n_min, args.n_max)
    Path(args.out).write_text(graph_to_json(g))
    rep = validate(g, deg(90))
    return {"valid": rep.ok}, {"n": g.n, "m": g.m, "max_angle_deg": _deg(rep.max_angle)}, [args.out], []


def cmd_reach(args):
    g, meta, text = _load_graph(args.graph, args.width)
    s = _vertex(g, args.source, meta)
    gamma = _width(args)
    gp = augment(g, gamma)
    beta = deg(args.beta)
    r = reach_set(gp, s, beta, gamma)
    edges = sorted({tuple(sorted((int(gp.dart_tail[d]), int(gp.dart_head[d]))))
                    for d in r.used if not gp.is_ray(d)})
    up = envelope(gp, s, beta, gamma, "upper")
    lo = envelope(gp, s, beta, gamma, "lower")
    arts = []
    if args.svg:
        render_svg(graph_scene(g, edges, up.vertices, lo.vertices, s, gp), args.svg)
        arts.append(args.svg)
    result = {
        "source": s, "beta_deg": args.beta, "width_deg": args.width,
        "reached": sorted(r.reached), "edges": [list(e) for e in edges],
        "rays_used": sum(1 for d in r.used if gp.is_ray(d)),
        "upper": up.vertices, "lower": lo.vertices,
    }
    return {"nonempty": len(r.reached) > 1 or bool(r.used)}, result, arts, [text]


def cmd_envelope(args):
    g, meta, text = _load_graph(args.graph, args.width)
    s = _vertex(g, args.source, meta)
    gamma = _width(args)
    gp = augment(g, gamma)
    kinds = ("upper", "lower") if args.kind == "both" else (args.kind,)
    envs = {k: envelope(gp, s, deg(args.beta), gamma, k) for k in kinds}
    result = {k: {"vertices": e.vertices, "ends_in_ray": bool(e.darts) and gp.is_ray(e.darts[-1])}
              for k, e in envs.items()}
    arts = []
    if args.svg:
        up, lo = (envs[k].vertices if k in envs else () for k in ("upper", "lower"))
        render_svg(graph_scene(g, (), up, lo, s, gp), args.svg)
        arts.append(args.svg)
    return {"ends_in_ray": all(v["ends_in_ray"] for v in result.values())}, result, arts, [text]


def cmd_critical_angles(args):
    g, _, text = _load_graph(args.graph, args.width)
    gamma = _width(args)
    crit = critical_angles(augment(g, gamma), gamma)
    result = {"width_deg": args.width, "critical_deg": [_deg(a) for a in crit.angles],
              "midpoints_deg": [_deg(a) for a in crit.midpoints]}
    return {}, result, [], [text]


def cmd_path(args):
    g, _, text = _load_graph(args.graph, args.width)
    s, t = _vertex(g, args.s, {}, "s"), _vertex(g, args.t, {}, "t")
    gamma = _width(args)
    ctx = SweepContext(g, gamma)
    p = ctx.sweep(s).paths([t])[0] if s != t else None
    result: dict = {"s": s, "t": t, "width_deg": args.width}
    checks = {"found": s == t or p is not None}
    if s == t:
        result.update(path=[], beta_deg=None)
    elif p is not None:
        ok, wit = verify_monotone(p.vertices, g, gamma)
        ratio = spanning_ratio(p.vertices, g)
        result.update(path=p.vertices, beta_deg=_deg(p.beta), witness_deg=_deg(wit) if ok else None,
                      spanning_ratio=ratio, ratio_bound=1.0 / math.cos(gamma / 2))
        checks.update(verified=ok, ratio_within_bound=ratio <= 1.0 / math.cos(gamma / 2) + 1e-6)
    else:
        result.update(path=None)
    arts = []
    if args.svg:
        marked = list(zip(p.vertices, p.vertices[1:])) if p else []
        render_svg(graph_scene(g, marked, source=s), args.svg)
        arts.append(args.svg)
    return checks, result, arts, [text]


def cmd_forest(args):
    g, meta, text = _load_graph(args.graph, 90.0)
    s = _vertex(g, args.source, meta)
    if g.hull_flags[s]:
        raise UsageError("the source must be an interior vertex")
    f = algorithm1_forest(augment(g, deg(90)), s)
    viol = check_forest(f, g)
    arts = []
    if args.svg:
        render_svg(forest_scene(g, f), args.svg)
        arts.append(args.svg)
    result = f.to_json()
    result["violations"] = [[k, str(d)] for k, d in viol]
    return {"forest_properties": not viol}, result, arts, [text]


def cmd_tree45(args):
    g, meta, text = _load_graph(args.graph, 90.0)
    s = _vertex(g, args.source, meta)
    try:
        t = tree45(g, s)
    except TreeConstructionFailed as e:
        return {"tree": False}, {"error": str(e)}, [], [text]
    arts = []
    if args.svg:
        render_svg(graph_scene(g, t.edges, source=s), args.svg)
        arts.append(args.svg)
    return {"tree": True, "verified": not t.verify(g)}, t.to_json(), arts, [text]


def cmd_oracle(args):
    g, meta, text = _load_graph(args.graph, args.width)
    s = _vertex(g, args.source, meta)
    r = spanning_tree_oracle(g, s, _width(args), args.budget)
    result = {"answer": r.kind, "nodes": r.nodes}
    arts = []
    if r.kind == "Tree":
        result["tree"] = r.tree.to_json()
        if args.svg:
            render_svg(graph_scene(g, r.tree.edges, source=s), args.svg)
            arts.append(args.svg)
    elif r.kind == "NoTree":
        result["reason"] = r.reason
        if args.svg:
            render_svg(graph_scene(g, source=s), args.svg)
            arts.append(args.svg)
    return {"tree_exists": r.kind == "Tree"}, result, arts, [text]


def cmd_cex(args):
    if args.shift < 0:
        raise UsageError("--shift must be non-negative")
    try:
        c = counterexample_graph(deg(args.shift) if args.shift else 0.0, args.acute, budget=args.budget)
    except ConstructionFailed as e:
        return {"certified": False}, {"error": str(e)}, [], []
    arts = []
    if args.out:
        Path(args.out).write_text(graph_to_json(c.graph, {"source": c.s, "labels": c.labels}))
        arts.append(args.out)
    if args.svg:
        marked = [(c["s"], c["a"]), (c["a"], c["x"]), (c["x"], c["A"]),
                  (c["s"], c["b"]), (c["b"], c["x"]), (c["x"], c["B"])]
        render_svg(graph_scene(c.graph, marked, source=c.s), args.svg)
        arts.append(args.svg)
    cert = dict(c.certificate or {})
    result = {"shift_deg": args.shift, "acute": args.acute, "source": c.s, "labels": c.labels,
              "certificate": cert}
    return {"certified": bool(cert)} if args.shift > 0 else {}, result, arts, []


def cmd_gen_cap(args):
    c = capmod.generate_cap(args.n, deg(args.phi), args.seed)
    write_off(c, args.out)
    rep = capmod.validate_cap(c)
    result = {"n": c.n, "faces": len(c.triangles), "phi_deg": _deg(c.phi),
              "max_face_angle_deg": _deg(rep.max_face_angle), "center_vertex": capmod.center_vertex(c)}
    return {"valid": rep.ok}, result, [args.out], []


def cmd_unfold(args):
    text = Path(args.mesh).read_text()
    c = read_off(args.mesh)
    rep = capmod.validate_cap(c)
    if not rep.ok:
        raise UsageError(f"mesh is not a convex cap: {sorted(rep.kinds())}")
    s = capmod.center_vertex(c) if args.source_vertex is None else args.source_vertex
    if s in c.boundary or not 0 <= s < c.n:
        raise UsageError("source vertex must be an interior vertex")
    r = capmod.run_pipeline(c, s)
    arts = []
    if args.svg:
        sc = layout_scene(r.layout, c.triangles, r.cuts.edges, axes_at=tuple(c.xy[s]))
        render_svg(sc, args.svg)
        arts.append(args.svg)
    checks = {"no_overlap": not r.overlaps, "cut_paths_radially_monotone": r.radial_failures == 0}
    result = r.to_json()
    result["radial_definition"] = "distance-monotone from every vertex (operational stand-in)"
    return checks, result, arts, [text]


def _sweep_one(job):
    phi, n, seed = job
    c = capmod.generate_cap(n, deg(phi), seed)
    r = capmod.run_pipeline(c)
    return phi, seed, r.to_json()


def cmd_sweep(args):
    try:
        phis = [float(x) for x in args.phi_list.split(",") if x.strip()]
    except ValueError:
        raise UsageError("--phi-list must be comma-separated degrees") from None
    jobs = [(phi, args.n, args.seed + t) for phi in phis for t in range(args.trials)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    table = []
    for phi in phis:
        runs = [r for p, _, r in rows if p == phi]
        table.append({
            "phi_deg": phi,
            "caps": len(runs),
            "caps_with_overlap": sum(1 for r in runs if r["overlap_count"]),
            "overlap_pairs": sum(r["overlap_count"] for r in runs),
            "radial_monotone_failures": sum(r["radial_monotone_failures"] for r in runs),
            "turns_over_90": sum(r["turns_over_90"] for r in runs),
            "max_turn_deg": max((r["max_turn_deg"] for r in runs), default=0.0),
            "runs": [{"seed": s, **r} for p, s, r in rows if p == phi],
        })
    return {}, {"n": args.n, "trials": args.trials, "seed": args.seed, "sweep": table}, [], []


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--timings", action="store_true", help="include wall-clock timings (not deterministic)")
    common.add_argument("--report", help="also write the JSON report to this file")

    p = argparse.ArgumentParser(prog="anglemono", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    def graph_arg(sp, width=True, svg=True):
        sp.add_argument("graph", help="graph JSON file")
        if width:
            sp.add_argument("--width", type=float, default=90.0, help="wedge width in degrees (default 90)")
        if svg:
            sp.add_argument("--svg", help="write a figure here")

    sp = add("validate", cmd_validate, "check a graph is a plane triangulation within the angle bound")
    graph_arg(sp, svg=False)

    sp = add("gen-graph", cmd_gen_graph, "write a random non-obtuse triangulation")
    sp.add_argument("--family", choices=("square", "grid45", "equilateral", "hex", "random"), default="random")
    sp.add_argument("--nx", type=int, default=5)
    sp.add_argument("--ny", type=int, default=5)
    sp.add_argument("--k", type=int, default=3, help="hexagon radius")
    sp.add_argument("--jitter", type=float, default=0.15)
    sp.add_argument("--n-min", type=int, default=20)
    sp.add_argument("--n-max", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)

    sp = add("reach", cmd_reach, "reach set V(beta) and edges P(beta) from a source")
    graph_arg(sp)
    sp.add_argument("--source", type=int)
    sp.add_argument("--beta", type=float, required=True, help="wedge direction in degrees")

    sp = add("envelope", cmd_envelope, "upper/lower envelope paths")
    graph_arg(sp)
    sp.add_argument("--source", type=int)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--kind", choices=("upper", "lower", "both"), default="both")

    sp = add("critical-angles", cmd_critical_angles, "directions where reach sets can change")
    graph_arg(sp, svg=False)

    sp = add("path", cmd_path, "angle-monotone path between two vertices")
    graph_arg(sp)
    sp.add_argument("s", type=int)
    sp.add_argument("t", type=int)

    sp = add("forest", cmd_forest, "boundary-rooted quadrant forest around a source")
    graph_arg(sp, width=False)
    sp.add_argument("--source", type=int)

    sp = add("tree45", cmd_tree45, "spanning tree on a graph with edges at multiples of 45 degrees")
    graph_arg(sp, width=False)
    sp.add_argument("--source", type=int)

    sp = add("oracle", cmd_oracle, "does an angle-monotone spanning tree rooted at the source exist?")
    graph_arg(sp)
    sp.add_argument("--source", type=int)
    sp.add_argument("--budget", type=int, default=200_000)

    sp = add("cex", cmd_cex, "build and certify the spanning-tree counterexample")
    sp.add_argument("--shift", type=float, default=2.0, help="degrees; 0 gives the symmetric tie")
    sp.add_argument("--acute", type=float, default=0.0, help="push A and B outward to make all angles acute")
    sp.add_argument("--budget", type=int, default=200_000)
    sp.add_argument("--out", help="write the graph JSON here")
    sp.add_argument("--svg")

    sp = add("gen-cap", cmd_gen_cap, "generate a convex cap mesh (OFF)")
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--phi", type=float, default=10.0, help="max face tilt in degrees")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)

    sp = add("unfold", cmd_unfold, "cut along the lifted forest and unfold a cap")
    sp.add_argument("mesh")
    sp.add_argument("--source-vertex", type=int)
    sp.add_argument("--svg")

    sp = add("sweep", cmd_sweep, "overlap counts over generated caps")
    sp.add_argument("--phi-list", default="10,27")
    sp.add_argument("--trials", type=int, default=5)
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1)
    return p


def _plain(o):
    """JSON fallback for numpy scalars and arrays."""
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"{type(o).__name__} is not JSON serializable")


def _digest(args, texts) -> str:
    h = hashlib.sha256()
    skip = {"fn", "timings", "report", "svg", "out"}
    h.update(json.dumps({k: v for k, v in sorted(vars(args).items()) if k not in skip},
                        sort_keys=True, default=str).encode())
    for t in texts:
        h.update(t.encode())
    return h.hexdigest()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    t0 = time.perf_counter()
    try:
        checks, result, artifacts, texts = args.fn(args)
    except (UsageError, ParseError, InvalidGraph, NotA45Graph, capmod.BadMesh, capmod.GenerationFailed,
            capmod.ProjectionUndefined, OSError, ValueError) as e:
        print(f"anglemono {args.command}: {e}", file=sys.stderr)
        return 2
    except capmod.ObtuseProjection as e:
        print(f"anglemono {args.command}: {e}", file=sys.stderr)
        return 1
    report = {
        "command": args.command,
        "inputs_digest": _digest(args, texts),
        "checks": checks,
        "ok": all(checks.values()),
        "result": result,
        "artifacts": artifacts,
    }
    if args.timings:
        report["timings"] = {"total_s": time.perf_counter() - t0}
    text = json.dumps(report, indent=2, sort_keys=True, default=_plain) + "\n"
    sys.stdout.write(text)
    if args.report:
        Path(args.report).write_text(text)
    return 0 if report["ok"] else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
