import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anglemono import generators
from anglemono.geometry import deg, point_in_polygon
from anglemono.graph import PlaneGraph, augment
from anglemono.paths import (
    NotAPath, SweepContext, critical_angles, critical_angles_for_directions, envelope, find_path,
    find_path_scan, is_self_approaching, path_in_wedge, reach_set, region, spanning_ratio, union_coverage,
    verify_monotone,
)

RIGHT = deg(90)


def _degs(angles):
    return sorted(round(math.degrees(a), 6) % 360 for a in angles)


def test_reach_square(square):
    r = reach_set(augment(square), 0, deg(45))
    assert r.reached == {0, 1, 2, 3}
    for v in r.reached - {0}:
        assert r.preds[v]
    assert r.path_to(2) == [0, 2]


def test_reach_triangle_closed_upper_ray(triangle):
    gp = augment(triangle, deg(60))
    # bounding rays at +-30deg: the apex (at 60deg from s) is outside
    assert reach_set(gp, 0, 0.0, deg(60)).reached == {0, 1}
    # centred on 30deg the apex lies exactly on the closed upper ray
    assert reach_set(gp, 0, deg(30), deg(60)).reached == {0, 1, 2}


def test_reach_used_edges_lie_in_wedge(square):
    gp = augment(square)
    r = reach_set(gp, 1, deg(135))
    for d in r.used:
        assert abs(((gp.dart_dir[d] - deg(135) + math.pi) % (2 * math.pi)) - math.pi) <= RIGHT / 2 + 1e-9


def test_envelopes_square(square):
    gp = augment(square)
    up = envelope(gp, 0, deg(45), RIGHT, "upper")
    lo = envelope(gp, 0, deg(45), RIGHT, "lower")
    assert up.vertices == [0, 3] and gp.is_ray(up.darts[-1])
    assert lo.vertices == [0, 1] and gp.is_ray(lo.darts[-1])
    with pytest.raises(ValueError):
        envelope(gp, 0, 0.0, RIGHT, "middle")


def test_envelopes_share_first_edge(triangle):
    gp = augment(triangle)
    # only the edge at 0deg is in the wedge centred on 340deg
    up = envelope(gp, 0, deg(340), RIGHT, "upper")
    lo = envelope(gp, 0, deg(340), RIGHT, "lower")
    assert up.vertices[:2] == lo.vertices[:2] == [0, 1]


def test_region_examples(square, triangle):
    reg = region(augment(square), 0, deg(45))
    assert sorted(reg.polygon.indices) == [0, 1, 2, 3] and not reg.degenerate
    assert region(augment(square), 0, deg(225)).degenerate
    tri = region(augment(triangle, deg(60)), 0, deg(30), deg(60))
    assert sorted(tri.polygon.indices) == [0, 1, 2]


def test_critical_angle_examples(square):
    assert _degs(critical_angles_for_directions([0.0], RIGHT).angles) == [45, 315]
    assert _degs(critical_angles_for_directions([0.0], deg(60)).angles) == [30, 330]
    crit = critical_angles(augment(square))
    assert _degs(crit.angles) == list(range(0, 360, 45))
    assert len(crit.midpoints) == len(crit.angles)
    assert crit.scan() == sorted(crit.scan())


def test_find_path_square(square):
    p = find_path(square, 1, 3)
    assert p.vertices in ([1, 2, 3], [1, 0, 3])
    assert verify_monotone(p.vertices, square)[0]
    assert find_path(square, 2, 2).vertices == [2]


def test_verify_monotone_examples(square):
    ok, beta = verify_monotone([0, 1], square)
    assert ok and beta == pytest.approx(0.0)
    ok, beta = verify_monotone([0, 1, 2], square)
    assert ok and math.degrees(beta) == pytest.approx(45)
    tilted = PlaneGraph([[0, 0], [1, 0], [1 + math.cos(deg(90) + 2e-9), math.sin(deg(90) + 2e-9)]],
                        [(0, 1), (1, 2), (0, 2)])
    assert not verify_monotone([0, 1, 2], tilted)[0]
    with pytest.raises(NotAPath):
        verify_monotone([1, 3], square)


def test_spanning_ratio_examples(square):
    assert spanning_ratio([0, 1], square) == pytest.approx(1.0)
    assert spanning_ratio([0, 1, 2], square) == pytest.approx(math.sqrt(2))
    assert spanning_ratio([3], square) == 1.0


def _random_graph(seed):
    return generators.random_small_triangulation(np.random.default_rng(seed))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_sweep_matches_scan(seed):
    """The bitset sweep finds the same first witness direction as one BFS per direction."""
    g = _random_graph(seed)
    ctx = SweepContext(g)
    rng = np.random.default_rng(seed)
    s = int(rng.integers(g.n))
    paths = ctx.sweep(s).paths()
    for t in range(g.n):
        ref = find_path_scan(g, s, t)
        got = paths[t]
        assert ref is not None and got is not None
        assert got.beta == pytest.approx(ref.beta, abs=0)
        assert got.vertices[0] == s and got.vertices[-1] == t
        assert path_in_wedge(got.vertices, g, got.beta)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.data())
def test_stability_between_criticals(seed, data):
    g = _random_graph(seed)
    gp = augment(g)
    crit = critical_angles(gp).angles
    k = data.draw(st.integers(0, len(crit) - 1))
    a, b = crit[k], crit[(k + 1) % len(crit)]
    gap = (b - a) % (2 * math.pi)
    s = data.draw(st.integers(0, g.n - 1))
    sets = [reach_set(gp, s, a + f * gap, RIGHT) for f in (0.25, 0.5, 0.75)]
    assert sets[0].reached == sets[1].reached == sets[2].reached
    assert sets[0].used == sets[1].used == sets[2].used


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_region_is_reached(seed):
    g = _random_graph(seed)
    gp = augment(g)
    rng = np.random.default_rng(seed)
    s, beta = int(rng.integers(g.n)), float(rng.uniform(0, 2 * math.pi))
    reg = region(gp, s, beta)
    reached = reach_set(gp, s, beta).reached
    if not reg.degenerate:
        for v in range(g.n):
            if point_in_polygon(g.xy[v], reg.polygon, g.eps * g.diam) != "outside":
                assert v in reached


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_verified_paths_are_self_approaching(seed):
    g = _random_graph(seed)
    ctx = SweepContext(g)
    for p in ctx.sweep(0).paths():
        assert verify_monotone(p.vertices, g)[0]
        assert is_self_approaching(g.xy[p.vertices], 1e-9)


def test_self_approaching_negative():
    assert is_self_approaching([(0, 0), (1, 0), (2, 0)])
    assert not is_self_approaching([(0, 0), (1, 0), (0.1, 0)])


def test_width_120_on_square(square):
    ctx = SweepContext(square, deg(120))
    for p in ctx.sweep(0).paths():
        assert verify_monotone(p.vertices, square, deg(120))[0]
        assert spanning_ratio(p.vertices, square) <= 2 + 1e-9


def test_coverage_square(square):
    assert union_coverage(augment(square), 0) == {0, 1, 2, 3}
