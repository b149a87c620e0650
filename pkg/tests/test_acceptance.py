"""Acceptance criteria 1-10.

Every test records one PASS/FAIL line (printed immediately and again in the
terminal summary) before asserting, so a red criterion still reports what it
measured.
"""
import contextlib
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from anglemono import _kernels, generators
from anglemono.cap import distortion_estimate, generate_cap, max_angle_distortion, run_pipeline
from anglemono.geometry import angdist, deg, point_in_polygon
from anglemono.graph import augment
from anglemono.paths import (
    SweepContext, critical_angles, envelope, path_in_wedge, reach_set, region, region_between, union_coverage,
    verify_monotone,
)
from anglemono.spanning import (
    algorithm1_forest, check_forest, counterexample_graph, monotone_paths, prune_to_tree, spanning_tree_oracle,
    tree45,
)

from conftest import ACCEPTANCE

RIGHT = deg(90)
FUZZ = 1000


class Criterion:
    def __init__(self, n):
        self.n = n
        self.detail = ""

    def report(self, ok: bool):
        ACCEPTANCE[self.n] = (ok, self.detail)
        print(f"{'PASS' if ok else 'FAIL'} criterion {self.n}: {self.detail}")


@contextlib.contextmanager
def criterion(n):
    c = Criterion(n)
    try:
        yield c
    except BaseException as e:
        if not c.detail:
            c.detail = f"{type(e).__name__}: {e}"
        else:
            c.detail += f" [{type(e).__name__}: {str(e).splitlines()[0] if str(e) else ''}]"
        c.report(False)
        raise
    c.report(True)


# ---------------------------------------------------------------------------
# criteria 1-3: pairwise paths
# ---------------------------------------------------------------------------


def _all_pairs(graphs, gamma):
    """Sweep every source of every graph; returns per-graph (offsets, vertices, hits) lists and the time."""
    t0 = time.perf_counter()
    out = []
    for g in graphs:
        ctx = SweepContext(g, gamma)
        out.append([ctx.sweep(s).raw_paths() for s in range(g.n)])
    return out, time.perf_counter() - t0


def _check_pairs(graphs, runs, gamma):
    """Counts of (pairs, missing, not verified, worst spanning ratio)."""
    pairs = missing = unverified = 0
    worst = 1.0
    for g, per_source in zip(graphs, runs):
        for s, (off, verts, hits) in enumerate(per_source):
            pairs += g.n
            missing += int((hits < 0).sum())
            for t in range(g.n):
                p = verts[off[t]:off[t + 1]].tolist()
                if not p:
                    continue
                if p[0] != s or p[-1] != t or not verify_monotone(p, g, gamma)[0]:
                    unverified += 1
            _, _, lengths, chords = _kernels.path_stats(off, verts, g.xy)
            ok = chords > 0
            if ok.any():
                worst = max(worst, float((lengths[ok] / chords[ok]).max()))
    return pairs, missing, unverified, worst


@pytest.fixture(scope="module")
def random_graphs():
    rng = np.random.default_rng(20240901)
    return [generators.random_triangulation(rng, 20, 200) for _ in range(100)]


@pytest.fixture(scope="module")
def equilateral_graphs():
    rng = np.random.default_rng(60)
    out = [generators.hex_patch(k) for k in (2, 3, 4, 5, 6)]
    out += [generators.equilateral_parallelogram(int(rng.integers(4, 13)), int(rng.integers(3, 10)))
            for _ in range(5)]
    return out


@pytest.fixture(scope="module")
def ratios():
    return {}


def test_criterion_01_pairwise_paths(random_graphs, ratios):
    with criterion(1) as c:
        sizes = [g.n for g in random_graphs]
        runs, elapsed = _all_pairs(random_graphs, RIGHT)
        pairs, missing, unverified, worst = _check_pairs(random_graphs, runs, RIGHT)
        ratios[90] = worst
        c.detail = (f"{len(random_graphs)} graphs (n={min(sizes)}..{max(sizes)}), {pairs} ordered pairs, "
                    f"missing={missing}, failing verify_monotone={unverified}, search time {elapsed:.1f}s "
                    f"(kernels: {_kernels.BACKEND})")
        assert missing == 0 and unverified == 0
        assert elapsed < 60


def test_criterion_02_width_60(equilateral_graphs, ratios):
    with criterion(2) as c:
        runs, _ = _all_pairs(equilateral_graphs, deg(60))
        pairs, missing, unverified, worst = _check_pairs(equilateral_graphs, runs, deg(60))
        ratios[60] = worst
        runs59, _ = _all_pairs(equilateral_graphs, deg(59))
        pairs59, missing59, unverified59, _ = _check_pairs(equilateral_graphs, runs59, deg(59))
        c.detail = (f"{len(equilateral_graphs)} equilateral patches, {pairs} pairs at 60deg: missing={missing}, "
                    f"unverified={unverified}; at 59deg {missing59}/{pairs59} pairs have no path "
                    f"({100 * missing59 / pairs59:.1f}% failure rate, reported only)")
        assert missing == 0 and unverified == 0 and unverified59 == 0


def test_criterion_03_spanning_ratio(ratios, random_graphs, equilateral_graphs):
    with criterion(3) as c:
        if 90 not in ratios:
            ratios[90] = _check_pairs(random_graphs, _all_pairs(random_graphs, RIGHT)[0], RIGHT)[3]
        if 60 not in ratios:
            ratios[60] = _check_pairs(equilateral_graphs, _all_pairs(equilateral_graphs, deg(60))[0], deg(60))[3]
        b90, b60 = 1 / math.cos(deg(45)), 1 / math.cos(deg(30))
        # width 120deg on the same random graphs: bound 2
        sub = random_graphs[:10]
        ratios[120] = _check_pairs(sub, _all_pairs(sub, deg(120))[0], deg(120))[3]
        c.detail = (f"worst length/|st|: {ratios[90]:.6f} <= {b90:.6f} (90deg), {ratios[60]:.6f} <= {b60:.6f} "
                    f"(60deg), {ratios[120]:.6f} <= 2 (120deg, 10 graphs)")
        assert ratios[90] <= b90 + 1e-6 and ratios[60] <= b60 + 1e-6 and ratios[120] <= 2 + 1e-6


# ---------------------------------------------------------------------------
# criteria 4-5: property fuzzing
# ---------------------------------------------------------------------------


def _case_stream(seed):
    """Endless fuzz cases (graph, augmented graph, source, beta, critical list, critical index).

    Half of the directions are exact critical angles, where ties between
    edges and wedge rays happen.
    """
    rng = np.random.default_rng(seed)
    while True:
        g = generators.random_small_triangulation(rng)
        gp = augment(g)
        crit = critical_angles(gp).angles
        for _ in range(5):
            s = int(rng.integers(g.n))
            i = int(rng.integers(len(crit)))
            beta = crit[i] if rng.random() < 0.5 else float(rng.uniform(0, 2 * math.pi))
            yield g, gp, s, beta, crit, i


@pytest.fixture(scope="module")
def fuzz_cases():
    stream = _case_stream(4444)
    return [next(stream) for _ in range(FUZZ)]


def _inside(g, poly):
    tol = g.eps * g.diam
    return [u for u in range(g.n) if point_in_polygon(g.xy[u], poly, tol) != "outside"]


def envelopes_end_in_rays(g, gp, s, beta, crit, i):
    up, lo = envelope(gp, s, beta, RIGHT, "upper"), envelope(gp, s, beta, RIGHT, "lower")
    return bool(up.darts and gp.is_ray(up.darts[-1]) and lo.darts and gp.is_ray(lo.darts[-1]))


def upper_avoids_lower_ray(g, gp, s, beta, crit, i):
    up = envelope(gp, s, beta, RIGHT, "upper")
    return not any(angdist(gp.dart_dir[d], beta - RIGHT / 2) <= 1e-9 for d in up.darts)


def region_is_reached(g, gp, s, beta, crit, i):
    reg = region(gp, s, beta)
    if reg.degenerate:
        return None
    return set(_inside(g, reg.polygon)) <= reach_set(gp, s, beta).reached


def upper_reached_next(g, gp, s, beta, crit, i):
    b0, b1 = crit[i], crit[(i + 1) % len(crit)]
    return set(envelope(gp, s, b0, RIGHT, "upper").darts) <= reach_set(gp, s, b1).used


def no_orphans(g, gp, s, beta, crit, i):
    b0, b1 = crit[i], crit[(i + 1) % len(crit)]
    between = region_between(gp, envelope(gp, s, b0, RIGHT, "lower"), envelope(gp, s, b1, RIGHT, "upper"))
    if between.degenerate:
        return None
    return set(_inside(g, between.polygon)) <= reach_set(gp, s, b0).reached | reach_set(gp, s, b1).reached


def union_covers_all(g, gp, s, beta, crit, i):
    return union_coverage(gp, s) == set(range(g.n))


PROPERTIES = {
    "envelopes_end_in_rays": envelopes_end_in_rays,
    "upper_avoids_lower_ray": upper_avoids_lower_ray,
    "region_is_reached": region_is_reached,
    "upper_reached_next": upper_reached_next,
    "no_orphans": no_orphans,
    "union_covers_all": union_covers_all,
}


def test_criterion_04_property_suite():
    with criterion(4) as c:
        violations, drawn = {}, {}
        for k, (name, check) in enumerate(PROPERTIES.items()):
            stream = _case_stream(4444 + k)
            done = bad = n = 0
            while done < FUZZ:  # vacuous cases (degenerate regions) do not count toward the 1000
                n += 1
                ok = check(*next(stream))
                if ok is None:
                    continue
                done += 1
                bad += not ok
            violations[name], drawn[name] = bad, n
        c.detail = (f"{FUZZ} non-vacuous cases each; violations " + ", ".join(f"{k}={v}" for k, v in violations.items())
                    + f" (cases drawn for region_is_reached/no_orphans: {drawn['region_is_reached']}/{drawn['no_orphans']})")
        assert not any(violations.values())


def test_criterion_05_trees(fuzz_cases):
    with criterion(5) as c:
        bad_prune = 0
        for g, gp, s, beta, _, _ in fuzz_cases:
            r = reach_set(gp, s, beta)
            t = prune_to_tree(r)
            ok = (t.is_tree() and t.members == r.reached and len(t.edges) == len(r.reached) - 1
                  and all(path_in_wedge(t.path_from_root(u), g, beta) for u in t.members))
            bad_prune += not ok
        rng = np.random.default_rng(4545)
        bad45, sizes = 0, []
        for _ in range(25):
            g = generators.grid45(int(rng.integers(2, 9)), int(rng.integers(2, 9)), rng)
            s = int(rng.integers(g.n))
            t = tree45(g, s)
            sizes.append(g.n)
            bad45 += not (t.is_tree() and t.members == set(range(g.n)) and t.verify(g) == [])
        c.detail = (f"prune_to_tree: {bad_prune} bad of {len(fuzz_cases)} reach sets; tree45: {bad45} bad of 25 "
                    f"45deg grids (n={min(sizes)}..{max(sizes)})")
        assert bad_prune == 0 and bad45 == 0


# ---------------------------------------------------------------------------
# criterion 6: counterexample
# ---------------------------------------------------------------------------


def _check_counterexample(cex):
    g, s = cex.graph, cex.s
    paths = monotone_paths(g, s, RIGHT, limit=1_000_000)
    to_a = sorted(cex.named(p) for p in paths[cex["A"]])
    to_b = sorted(cex.named(p) for p in paths[cex["B"]])
    t0 = time.perf_counter()
    res = spanning_tree_oracle(g, s, RIGHT)
    oracle_time = time.perf_counter() - t0
    ctx = SweepContext(g)
    missing = 0
    for u in range(g.n):
        for p in ctx.sweep(u).paths():
            missing += p is None or not verify_monotone(p.vertices, g)[0]
    return to_a, to_b, res, oracle_time, missing


def test_criterion_06_counterexample():
    with criterion(6) as c:
        cex = counterexample_graph()
        to_a, to_b, res, dt, missing = _check_counterexample(cex)
        acute = counterexample_graph(acute=0.01)
        from anglemono.graph import validate

        max_acute = math.degrees(validate(acute.graph).max_angle)
        to_a2, to_b2, res2, dt2, missing2 = _check_counterexample(acute)
        c.detail = (f"paths to A {to_a}, to B {to_b}, oracle {res.kind} in {1000 * dt:.1f}ms ({res.nodes} nodes), "
                    f"unreached pairs {missing}; strict-acute (max angle {max_acute:.3f}deg): A {to_a2}, "
                    f"B {to_b2}, oracle {res2.kind} in {1000 * dt2:.1f}ms, unreached pairs {missing2}")
        assert to_a == ["saxA"] and to_b == ["sbxB"] and res.kind == "NoTree" and missing == 0 and dt < 10
        assert max_acute < 90
        assert to_a2 == ["saxA"] and to_b2 == ["sbxB"] and res2.kind == "NoTree" and missing2 == 0 and dt2 < 10


# ---------------------------------------------------------------------------
# criterion 7: quadrant forest
# ---------------------------------------------------------------------------


def test_criterion_07_algorithm1(random_graphs):
    with criterion(7) as c:
        rng = np.random.default_rng(7777)
        kinds: dict[str, int] = {}
        for g in random_graphs:
            s = int(rng.choice(g.interior_vertices()))
            f = algorithm1_forest(augment(g), s)
            for kind, _ in check_forest(f, g):
                kinds[kind] = kinds.get(kind, 0) + 1
        c.detail = f"{len(random_graphs)} graphs, random interior source; violations: {kinds or 'none'}"
        assert not kinds


# ---------------------------------------------------------------------------
# criterion 8: angle distortion
# ---------------------------------------------------------------------------


def test_criterion_08_distortion():
    with criterion(8) as c:
        d0 = max_angle_distortion(0.0)
        grid = [max_angle_distortion(deg(p)) for p in range(0, 85, 5)]
        monotone = all(a <= b for a, b in zip(grid, grid[1:]))
        est = distortion_estimate(deg(10))
        c.detail = (f"Delta(0)={d0:.2e}, monotone on 0..80deg: {monotone}, Delta(10deg)={math.degrees(est.value):.6f}"
                    f"deg (optimiser error bound {math.degrees(est.error):.2e}deg)")
        assert d0 < 1e-6 and monotone and math.degrees(est.upper_bound) < 1.0


# ---------------------------------------------------------------------------
# criterion 9: cap unfolding
# ---------------------------------------------------------------------------


def test_criterion_09_cap_unfolding():
    with criterion(9) as c:
        t0 = time.perf_counter()
        runs10 = [run_pipeline(generate_cap(100, deg(10), seed=k)) for k in range(50)]
        runs27 = [run_pipeline(generate_cap(100, deg(27), seed=k)) for k in range(20)]
        elapsed = time.perf_counter() - t0
        ov10 = sum(len(r.overlaps) for r in runs10)
        rad10 = sum(r.radial_failures for r in runs10)
        paths10 = sum(r.cut_paths for r in runs10)
        ov27 = [len(r.overlaps) for r in runs27]
        rad27 = sum(r.radial_failures for r in runs27)
        ns = [r.n for r in runs10]
        c.detail = (f"Phi=10deg: 50 caps (n={min(ns)}..{max(ns)}), overlapping pairs={ov10}, radial-monotone "
                    f"failures={rad10} of {2 * paths10} cut-path sides; Phi=27deg: 20 caps, caps with overlap="
                    f"{sum(1 for o in ov27 if o)}, overlapping pairs={sum(ov27)}, radial failures={rad27} "
                    f"(reported only); {elapsed:.1f}s")
        assert ov10 == 0 and rad10 == 0 and elapsed < 300


# ---------------------------------------------------------------------------
# criterion 10: determinism
# ---------------------------------------------------------------------------

COMMANDS = [
    ["gen-graph", "--family", "random", "--seed", "11", "--out", "g.json"],
    ["path", "g.json", "0", "7", "--svg", "path.svg"],
    ["reach", "g.json", "--source", "3", "--beta", "30", "--svg", "reach.svg"],
    ["envelope", "g.json", "--source", "3", "--beta", "30", "--svg", "env.svg"],
    ["critical-angles", "g.json"],
    ["gen-graph", "--family", "grid45", "--nx", "5", "--ny", "4", "--seed", "5", "--out", "g45.json"],
    ["tree45", "g45.json", "--source", "8", "--svg", "tree45.svg"],
    ["forest", "g45.json", "--source", "8", "--svg", "forest.svg"],
    ["cex", "--out", "cex.json", "--svg", "cex.svg"],
    ["oracle", "cex.json", "--svg", "oracle.svg"],
    ["gen-cap", "--n", "100", "--phi", "10", "--seed", "3", "--out", "cap.off"],
    ["unfold", "cap.off", "--svg", "net.svg"],
    ["sweep", "--phi-list", "10,27", "--trials", "2", "--n", "60", "--seed", "9", "--jobs", "2"],
]


def _run_all(workdir):
    outputs = {}
    for k, argv in enumerate(COMMANDS):
        p = subprocess.run([sys.executable, "-m", "anglemono.cli", *argv], cwd=workdir, capture_output=True,
                           env=dict(os.environ))
        assert p.returncode in (0, 1), (argv, p.stderr.decode())
        outputs[f"{k}:{argv[0]}:stdout"] = p.stdout
    for f in sorted(os.listdir(workdir)):
        outputs[f] = (workdir / f).read_bytes()
    return outputs


def test_criterion_10_determinism(tmp_path):
    with criterion(10) as c:
        a, b = tmp_path / "a", tmp_path / "b"
        a.mkdir()
        b.mkdir()
        out_a, out_b = _run_all(a), _run_all(b)
        differ = sorted(k for k in out_a if out_a[k] != out_b.get(k))
        svgs = sum(1 for k in out_a if k.endswith(".svg"))
        c.detail = (f"{len(COMMANDS)} commands run twice in fresh directories; {len(out_a)} outputs compared "
                    f"({svgs} SVG), differing: {differ or 'none'}")
        assert set(out_a) == set(out_b) and not differ
