import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anglemono import generators
from anglemono.geometry import deg
from anglemono.graph import PlaneGraph, augment
from anglemono.paths import envelope, reach_set, verify_monotone
from anglemono.spanning import (
    CEX_SHIFT_MAX, ConstructionFailed, NotA45Graph, SpanningForest, algorithm1_forest, check_forest,
    counterexample_graph, monotone_paths, prune_to_tree, quadrant_of, spanning_tree_oracle, tree45,
)

RIGHT = deg(90)


def grid_ne(k=3):
    """``k x k`` unit grid, every cell split by its north-east diagonal."""
    idx = lambda i, j: j * k + i  # noqa: E731
    pts = [(i, j) for j in range(k) for i in range(k)]
    edges = []
    for j in range(k):
        for i in range(k):
            if i + 1 < k:
                edges.append((idx(i, j), idx(i + 1, j)))
            if j + 1 < k:
                edges.append((idx(i, j), idx(i, j + 1)))
            if i + 1 < k and j + 1 < k:
                edges.append((idx(i, j), idx(i + 1, j + 1)))
    return PlaneGraph(pts, edges)


def test_prune_square(square):
    t = prune_to_tree(reach_set(augment(square), 0, deg(45)))
    assert t.is_tree() and len(t.members) == 4 and len(t.edges) == 3
    assert t.verify(square) == []


def test_prune_path_is_unchanged(square):
    # from (1,0) heading north the reach set is the single edge to (1,1)
    r = reach_set(augment(square), 1, deg(90))
    assert r.reached == {1, 2}
    t = prune_to_tree(r)
    assert t.edges == [(1, 2)] and t.verify(square) == []


def test_tree45_examples(square):
    g = grid_ne(3)
    t = tree45(g, 4)
    assert t.is_tree() and t.members == set(range(9)) and t.verify(g) == []
    t = tree45(square, 0)
    assert t.members == {0, 1, 2, 3} and len(t.edges) == 3
    skew = PlaneGraph([[0, 0], [1, 0], [math.cos(deg(30)) * 0.5, 0.5 * math.sin(deg(30)) + 0.6]],
                      [(0, 1), (1, 2), (0, 2)])
    with pytest.raises(NotA45Graph):
        tree45(skew, 0)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_45_grid_envelopes_never_rejoin(seed):
    rng = np.random.default_rng(seed)
    g = generators.grid45(int(rng.integers(2, 6)), int(rng.integers(2, 6)), rng)
    gp = augment(g)
    s = int(rng.integers(g.n))
    for k in range(8):
        u1 = envelope(gp, s, deg(45 * k)).vertices
        u2 = envelope(gp, s, deg(45 * (k + 1))).vertices
        split = next((i for i, (a, b) in enumerate(zip(u1, u2)) if a != b), None)
        if split is not None:
            assert not set(u1[split:]) & set(u2[split:])


def test_oracle_examples(square):
    r = spanning_tree_oracle(square, 0)
    assert r.kind == "Tree" and r.tree.verify(square) == [] and r.tree.members == {0, 1, 2, 3}
    # the oracle only needs monotone paths, so a bare path graph works too
    path = PlaneGraph([[0, 0], [1, 0], [2, 0.5], [3, 0.5]], [(0, 1), (1, 2), (2, 3)])
    r = spanning_tree_oracle(path, 0)
    assert r.kind == "Tree" and r.tree.edges == [(0, 1), (1, 2), (2, 3)]
    assert spanning_tree_oracle(square, 0, budget=1).kind == "BudgetExceeded"


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_oracle_sound_where_tree45_succeeds(seed):
    rng = np.random.default_rng(seed)
    g = generators.grid45(int(rng.integers(2, 4)), int(rng.integers(2, 4)), rng)
    s = int(rng.integers(g.n))
    assert tree45(g, s).verify(g) == []
    r = spanning_tree_oracle(g, s)
    assert r.kind == "Tree" and r.tree.verify(g) == []


def test_monotone_paths_are_monotone(square):
    paths = monotone_paths(square, 0, RIGHT, limit=1000)
    assert paths[0] == [(0,)]
    for v, ps in paths.items():
        for p in ps:
            assert p[-1] == v and verify_monotone(list(p), square)[0]
    assert (0, 1, 2) in paths[2] and (0, 2) in paths[2]


@pytest.mark.parametrize("d, j", [((1, 2), 0), ((0, 1), 1), ((0, 0), 0), ((-1, 0), 2), ((0, -1), 3), ((1, 0), 0)])
def test_quadrant_of(d, j):
    assert quadrant_of(d, (0, 0)) == j


def test_counterexample_symmetric_tie():
    c = counterexample_graph(0.0)
    paths = monotone_paths(c.graph, c.s, RIGHT, limit=100_000)
    assert sorted(c.named(p) for p in paths[c["A"]]) == ["saxA", "sbxA"]
    assert sorted(c.named(p) for p in paths[c["B"]]) == ["saxB", "sbxB"]
    for name in "CDF":
        assert len(paths[c[name]]) == 2, name
    # E sits straight below s behind d; its other neighbours D and F need turns wider than 90deg
    assert [c.named(p) for p in paths[c["E"]]] == ["sdE"]


def test_counterexample_certificate():
    c = counterexample_graph()
    cert = c.certificate
    assert cert["paths_to_A"] == ["saxA"] and cert["paths_to_B"] == ["sbxB"]
    assert cert["oracle"] == "NoTree"
    assert cert["cycle"] == "saxb"
    assert cert["max_angle_deg"] <= 90 + 1e-6


def test_counterexample_shift_range():
    with pytest.raises(ConstructionFailed):
        counterexample_graph(CEX_SHIFT_MAX + 0.01)
    with pytest.raises(ConstructionFailed):
        counterexample_graph(-0.01)


def test_algorithm1_forest_small():
    g = grid_ne(4)
    s = 5
    f = algorithm1_forest(augment(g), s)
    assert check_forest(f, g) == []
    non_roots = sum(len(f.parents[j]) for j in range(4))
    assert len(f.edges()) == non_roots
    for j in range(4):
        for v in f.parents[j]:
            path = f.path_to_root(j, v)
            assert g.hull_flags[path[-1]]
    assert math.degrees(SpanningForest.beta(3)) == pytest.approx(315)


def test_algorithm1_single_interior_vertex():
    g = PlaneGraph([[0, 0], [2, 0], [2, 2], [0, 2], [1, 1]],
                   [(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1), (4, 2), (4, 3)])
    f = algorithm1_forest(augment(g), 4)
    assert check_forest(f, g) == []
    assert f.assignment[4] == 0 and f.path_to_root(0, 4) == [4, 2]
