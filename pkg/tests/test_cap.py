import math
import warnings

import numpy as np
import pytest

from anglemono import generators
from anglemono.cap import (
    BadMesh, ConvexCap, CutForest3D, CutsDisconnectSurface, ProjectionUndefined, UnfoldedLayout,
    _triangles_of, center_vertex, corner_distortions, distortion_estimate, generate_cap, lift_forest,
    lift_paraboloid, max_angle_distortion, overlap_check, project, radial_monotone_check, run_pipeline,
    unfold, validate_cap,
)
from anglemono.geometry import deg
from anglemono.graph import augment, validate
from anglemono.paths import SweepContext, verify_monotone
from anglemono.spanning import algorithm1_forest


def closed_form(phi):
    """Exact maximum distortion, used only to check the numeric optimiser."""
    return 4 * math.atan(1 / math.sqrt(math.cos(phi))) - math.pi


@pytest.fixture(scope="module")
def flat():
    g = generators.hex_patch(3)
    return lift_paraboloid(g.xy, _triangles_of(g), 0.0, 4.0), g


@pytest.fixture(scope="module")
def shallow():
    return generate_cap(60, deg(10), seed=1)


def test_distortion_examples():
    assert max_angle_distortion(0.0) < 1e-6
    est = distortion_estimate(deg(10))
    assert math.degrees(est.value) < 1.0
    assert est.error < 0.1 * (deg(1) - est.value)
    assert est.value <= est.upper_bound
    values = [max_angle_distortion(deg(p)) for p in range(0, 85, 5)]
    assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))
    with pytest.raises(ProjectionUndefined):
        max_angle_distortion(deg(90))


@pytest.mark.parametrize("phi", [5, 10, 27, 45, 70])
def test_distortion_matches_closed_form(phi):
    assert max_angle_distortion(deg(phi)) == pytest.approx(closed_form(deg(phi)), abs=1e-7)


def test_flat_cap(flat):
    c, g = flat
    rep = validate_cap(c, require_acute=True)
    assert rep.ok and rep.acute and c.phi == 0.0
    pg = project(c)
    assert sorted(map(tuple, pg.edges)) == sorted(map(tuple, g.edges))
    s = center_vertex(c)
    f = algorithm1_forest(augment(pg), s)
    cuts = lift_forest(f, c)
    for t in cuts.turns:
        assert t.turn_left == pytest.approx(t.planar_turn, abs=1e-9)
        assert t.turn_right == pytest.approx(t.planar_turn, abs=1e-9)
    layout = unfold(c, cuts, source=s)
    # zero curvature: the net is the patch itself, up to a rigid motion fixed by the root face
    np.testing.assert_allclose(layout.placed, c.xy[c.triangles], atol=1e-9)
    assert overlap_check(layout) == []


def test_validate_cap_flags_right_angles():
    sq = generators.rectilinear_grid(2, 2, np.random.default_rng(0), spacing=(1, 1))
    c = lift_paraboloid(sq.xy, _triangles_of(sq), 0.0, 3.0)
    assert validate_cap(c).ok
    rep = validate_cap(c, require_acute=True)
    assert "not-acute" in rep.kinds()


def test_validate_cap_reflex_dihedral():
    g = generators.hex_patch(2)
    c = lift_paraboloid(g.xy, _triangles_of(g), -0.5, 3.0)  # concave up
    assert "reflex-dihedral" in validate_cap(c).kinds()


def test_bad_mesh():
    with pytest.raises(BadMesh):
        ConvexCap.from_mesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 5]])
    with pytest.raises(BadMesh):
        ConvexCap.from_mesh([[0, 0, 0], [1, 0, 0], [2, 0, 0]], [[0, 1, 2]])


def test_generated_cap(shallow):
    rep = validate_cap(shallow)
    assert rep.ok and rep.max_tilt <= deg(10) + 1e-9
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        g = project(shallow)
    assert validate(g, deg(90)).ok
    diff, bound = corner_distortions(shallow)
    assert np.all(diff <= bound + 1e-9)


def test_pipeline_on_shallow_cap(shallow):
    r = run_pipeline(shallow)
    assert r.overlaps == [] and r.radial_failures == 0 and r.turn_bound_violations == 0
    # isometry: every placed face is congruent to its 3D original
    V, T = shallow.vertices, shallow.triangles
    for k in range(3):
        a, b = T[:, k], T[:, (k + 1) % 3]
        placed = np.linalg.norm(r.layout.placed[:, k] - r.layout.placed[:, (k + 1) % 3], axis=1)
        np.testing.assert_allclose(placed, np.linalg.norm(V[a] - V[b], axis=1), atol=1e-9)
    np.testing.assert_allclose(r.layout.face_areas().sum(), shallow.face_areas().sum(), rtol=1e-12)
    interior = set(shallow.interior_vertices())
    assert interior <= {v for e in r.cuts.edges for v in e}


def test_unfold_two_triangles():
    c = ConvexCap.from_mesh([[0, 0, 0], [1, 0, 0], [0, 1, 0.2], [1, 1, 0.2]], [[0, 1, 2], [1, 3, 2]])
    layout = unfold(c, CutForest3D([], [], []))
    shared = [layout.placed[0][[1, 2]], layout.placed[1][[0, 2]]]
    np.testing.assert_allclose(shared[0], shared[1], atol=1e-12)
    assert overlap_check(layout) == []


def test_unfold_disconnected():
    c = ConvexCap.from_mesh([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], [[0, 1, 2], [1, 3, 2]])
    with pytest.raises(CutsDisconnectSurface):
        unfold(c, CutForest3D([(1, 2)], [], []))


def test_overlap_negative_control():
    tri = np.array([[0, 0], [1, 0], [0, 1]], dtype=float)
    layout = UnfoldedLayout(np.array([tri, tri + 0.2, tri + 5]), 0, [])
    assert overlap_check(layout) == [(0, 1)]


def test_radial_monotone_examples():
    assert radial_monotone_check([(0, 0), (1, 0), (2, 0)])
    assert not radial_monotone_check([(0, 0), (1, 0), (0.1, 0)])
    with pytest.raises(ValueError):
        radial_monotone_check([(0, 0)])


def test_verified_paths_are_radially_monotone():
    g = generators.random_triangulation(np.random.default_rng(5), 30, 60)
    ctx = SweepContext(g)
    for s in range(0, g.n, 7):
        for p in ctx.sweep(s).paths():
            assert verify_monotone(p.vertices, g)[0]
            if len(p.vertices) > 1:
                assert radial_monotone_check(g.xy[p.vertices])


def test_generate_cap_is_deterministic():
    a, b = generate_cap(50, deg(10), seed=3), generate_cap(50, deg(10), seed=3)
    assert np.array_equal(a.vertices, b.vertices) and np.array_equal(a.triangles, b.triangles)
