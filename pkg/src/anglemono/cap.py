"""Convex caps: projection, angle distortion, forest lifting and edge-unfolding.

Pipeline: :func:`generate_cap` -> :func:`project` -> ``algorithm1_forest`` ->
:func:`lift_forest` -> :func:`unfold` -> :func:`overlap_check` and
:func:`radial_monotone_check` on the developed cut paths.  :func:`run_pipeline`
chains the stages and returns counts.
"""
from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from ._config import EPS_ANG, eps_len
from .generators import hex_patch
from .graph import PlaneGraph, ValidationReport, augment, validate
from .spanning import SpanningForest, algorithm1_forest

RIGHT = math.pi / 2


class ProjectionUndefined(ValueError):
    """Tilt of 90 degrees or more: the face projects to a segment."""


class BadMesh(ValueError):
    """Malformed triangle mesh (indices, degenerate or non-manifold faces)."""


class ObtuseProjection(RuntimeError):
    """The projected cap has an obtuse angle."""


class LiftMismatch(ValueError):
    """A forest edge is not an edge of the cap mesh."""


class CutsDisconnectSurface(RuntimeError):
    """The faces joined by uncut edges do not form one piece."""


class DevelopmentInconsistent(RuntimeError):
    """Two placements of a shared uncut edge disagree."""


class GenerationFailed(RuntimeError):
    """Could not scale the cap to the requested tilt."""


# ---------------------------------------------------------------------------
# angle distortion under projection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistortionEstimate:
    """Numeric maximum of ``|alpha - alpha_proj|`` on a plane tilted by ``phi``.

    ``value`` is attained by ``argmax`` (a certified lower bound);
    ``upper_bound`` adds the grid's worst-case shortfall, so the true maximum
    lies in ``[value, upper_bound]``.
    """

    phi: float
    value: float
    upper_bound: float
    grid_value: float
    argmax: tuple[float, float]

    @property
    def error(self) -> float:
        return self.upper_bound - self.value


_GRID_STEP = math.radians(0.1)


def _projected_dir(t, phi):
    """Direction in the xy-plane of the in-plane unit vector at angle ``t``."""
    return np.arctan2(np.sin(t), np.cos(t) * math.cos(phi))


def _wrap_abs(a):
    return np.abs((a + math.pi) % (2 * math.pi) - math.pi)


def _distortion(t1, t2, phi):
    return np.abs(_wrap_abs(t1 - t2) - _wrap_abs(_projected_dir(t1, phi) - _projected_dir(t2, phi)))


@lru_cache(maxsize=256)
def distortion_estimate(phi: float) -> DistortionEstimate:
    """Grid search over both ray directions at 0.1deg, then local refinement.

    The plane has normal tilted ``phi`` from vertical; rays in it are
    parametrised by their angle ``t`` from the line of steepest descent.
    Negating both rays preserves both angles, so one ray ranges over a half
    turn only.
    """
    if not 0.0 <= phi < RIGHT:
        raise ProjectionUndefined("tilt must lie in [0, 90deg)")
    t1 = np.arange(0.0, math.pi, _GRID_STEP)
    t2 = np.arange(0.0, 2 * math.pi, _GRID_STEP)
    p1, p2 = _projected_dir(t1, phi), _projected_dir(t2, phi)
    grid = np.abs(_wrap_abs(t1[:, None] - t2[None, :]) - _wrap_abs(p1[:, None] - p2[None, :]))
    i, j = np.unravel_index(int(np.argmax(grid)), grid.shape)
    grid_value = float(grid[i, j])
    x0 = np.array([t1[i], t2[j]])
    res = minimize(lambda t: -float(_distortion(t[0], t[1], phi)), x0, method="Nelder-Mead",
                   options={"xatol": 1e-9, "fatol": 1e-14, "maxiter": 4000})
    value = max(grid_value, -float(res.fun))
    arg = tuple(float(v) for v in (res.x if -res.fun >= grid_value else x0))
    # d(projected dir)/dt lies in [cos phi, sec phi], so each partial derivative
    # of the distortion is at most sec(phi) - 1 in magnitude; the true maximiser
    # is within half a grid step of some sample in each coordinate.
    lipschitz = 1.0 / math.cos(phi) - 1.0
    upper = max(value, grid_value + _GRID_STEP * lipschitz)
    return DistortionEstimate(phi, value, upper, grid_value, arg)


def max_angle_distortion(phi: float) -> float:
    """Largest change of an angle drawn on a plane tilted ``phi`` when projected vertically."""
    return distortion_estimate(float(phi)).value


# ---------------------------------------------------------------------------
# caps
# ---------------------------------------------------------------------------


def _face_normals(v: np.ndarray, tris: np.ndarray) -> np.ndarray:
    a, b, c = v[tris[:, 0]], v[tris[:, 1]], v[tris[:, 2]]
    return np.cross(b - a, c - a)


def _tilts(normals: np.ndarray) -> np.ndarray:
    nz = normals[:, 2] / np.linalg.norm(normals, axis=1)
    return np.arccos(np.clip(nz, -1.0, 1.0))


def _corner_angles(p: np.ndarray, tris: np.ndarray) -> np.ndarray:
    """``(m, 3)`` interior angle at each corner of each triangle (any dimension)."""
    out = np.empty(tris.shape, dtype=float)
    for k in range(3):
        o, u, w = p[tris[:, k]], p[tris[:, (k + 1) % 3]], p[tris[:, (k + 2) % 3]]
        a, b = u - o, w - o
        cosang = np.einsum("ij,ij->i", a, b) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
        out[:, k] = np.arccos(np.clip(cosang, -1.0, 1.0))
    return out


@dataclass
class ConvexCap:
    vertices: np.ndarray  # (n, 3)
    triangles: np.ndarray  # (m, 3), counterclockwise seen from above
    boundary: list[int]
    phi: float  # max face-normal tilt

    @classmethod
    def from_mesh(cls, vertices, triangles) -> "ConvexCap":
        v = np.asarray(vertices, dtype=float)
        t = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        if v.ndim != 2 or v.shape[1] != 3:
            raise BadMesh("vertices must be an (n, 3) array")
        if len(t) == 0:
            raise BadMesh("mesh has no faces")
        if t.min() < 0 or t.max() >= len(v):
            raise BadMesh("face references a missing vertex")
        if np.any((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])):
            raise BadMesh("face with a repeated vertex")
        n = _face_normals(v, t)
        if np.any(np.linalg.norm(n, axis=1) <= eps_len(v) ** 2):
            raise BadMesh("degenerate face")
        flip = n[:, 2] < 0
        t = t.copy()
        t[flip] = t[flip][:, ::-1]
        return cls(v, t, _boundary_cycle(t), float(_tilts(_face_normals(v, t)).max()))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def xy(self) -> np.ndarray:
        return self.vertices[:, :2]

    def edge_faces(self) -> dict[tuple[int, int], list[int]]:
        out: dict[tuple[int, int], list[int]] = {}
        for f, tri in enumerate(self.triangles):
            for k in range(3):
                a, b = int(tri[k]), int(tri[(k + 1) % 3])
                out.setdefault((min(a, b), max(a, b)), []).append(f)
        return out

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.edge_faces())

    def interior_vertices(self) -> list[int]:
        b = set(self.boundary)
        return [v for v in range(self.n) if v not in b]

    def tilts(self) -> np.ndarray:
        return _tilts(_face_normals(self.vertices, self.triangles))

    def corner_angles(self) -> np.ndarray:
        return _corner_angles(self.vertices, self.triangles)

    def face_areas(self) -> np.ndarray:
        return 0.5 * np.linalg.norm(_face_normals(self.vertices, self.triangles), axis=1)


def _boundary_cycle(tris: np.ndarray) -> list[int]:
    count: dict[tuple[int, int], int] = {}
    directed: dict[int, int] = {}
    for tri in tris:
        for k in range(3):
            a, b = int(tri[k]), int(tri[(k + 1) % 3])
            key = (min(a, b), max(a, b))
            count[key] = count.get(key, 0) + 1
    for key, c in count.items():
        if c > 2:
            raise BadMesh(f"edge {key} has {c} faces")
    for tri in tris:
        for k in range(3):
            a, b = int(tri[k]), int(tri[(k + 1) % 3])
            if count[(min(a, b), max(a, b))] == 1:
                if a in directed:
                    raise BadMesh(f"boundary pinches at vertex {a}")
                directed[a] = b
    if not directed:
        raise BadMesh("mesh has no boundary")
    start = min(directed)
    cycle = [start]
    while directed[cycle[-1]] != start:
        cycle.append(directed[cycle[-1]])
        if len(cycle) > len(directed):
            raise BadMesh("boundary is not a single cycle")
    if len(cycle) != len(directed):
        raise BadMesh("boundary has several components")
    return cycle


@dataclass
class CapReport(ValidationReport):
    max_face_angle: float = 0.0
    max_tilt: float = 0.0
    acute: bool = False

    def to_json(self) -> dict:
        out = super().to_json()
        out.update(max_face_angle_deg=math.degrees(self.max_face_angle),
                   max_tilt_deg=math.degrees(self.max_tilt), acute=self.acute)
        return out


def validate_cap(c: ConvexCap, require_acute: bool = False) -> CapReport:
    """Check tilt, injective projection, convex dihedrals and (optionally) strict acuteness."""
    rep = CapReport()
    tilts = c.tilts()
    angles = c.corner_angles()
    rep.max_tilt = float(tilts.max())
    rep.max_face_angle = float(angles.max())
    rep.acute = bool(rep.max_face_angle < RIGHT - EPS_ANG)
    if rep.max_tilt >= RIGHT:
        rep.add("tilt", f"max tilt {math.degrees(rep.max_tilt):.3f} deg")
    if rep.max_tilt > c.phi + EPS_ANG:
        rep.add("tilt", f"tilt exceeds recorded phi {math.degrees(c.phi):.3f} deg")
    g = PlaneGraph(c.xy, c.edges())
    planar = validate(g, math.radians(179.0))
    for kind, detail in planar.violations:
        if kind != "angle":
            rep.add("projection-" + kind, detail)
    eps = eps_len(c.vertices)
    normals = _face_normals(c.vertices, c.triangles)
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    for (a, b), fs in c.edge_faces().items():
        if len(fs) != 2:
            continue
        f1, f2 = fs
        other = next(int(v) for v in c.triangles[f2] if v not in (a, b))
        if float(np.dot(c.vertices[other] - c.vertices[a], normals[f1])) > eps:
            rep.add("reflex-dihedral", f"edge ({a}, {b})")
    if require_acute and not rep.acute:
        bad = np.argwhere(angles >= RIGHT - EPS_ANG)
        for f, k in bad[:10]:
            rep.add("not-acute", f"face {int(f)} corner {int(c.triangles[f, k])}: "
                                 f"{math.degrees(angles[f, k]):.3f} deg")
    rep.max_angle = rep.max_face_angle
    return rep


def project(c: ConvexCap, check: bool = True) -> PlaneGraph:
    """Vertical projection as a plane graph; must be non-obtuse."""
    g = PlaneGraph(c.xy, c.edges())
    if check:
        rep = validate(g, RIGHT)
        if not rep.ok:
            raise ObtuseProjection(f"projection invalid: {sorted(rep.kinds())}")
        alpha_max = float(c.corner_angles().max())
        if alpha_max + max_angle_distortion(c.phi) >= RIGHT:
            warnings.warn("alpha_max + Delta(phi) >= 90deg: non-obtuse projection is not guaranteed, "
                          "but holds for this cap", stacklevel=2)
    return g


def corner_distortions(c: ConvexCap) -> tuple[np.ndarray, np.ndarray]:
    """Per-corner ``|alpha_3d - alpha_proj|`` and a bound ``Delta(tilt of its face)``.

    Tilts are rounded up to whole degrees before evaluating ``Delta``; since
    ``Delta`` is increasing this keeps a valid bound with few evaluations.
    """
    a3 = c.corner_angles()
    a2 = _corner_angles(c.xy, c.triangles)
    step = math.radians(1.0)
    bound = np.array([max_angle_distortion(min(math.ceil(t / step - 1e-9) * step, RIGHT - 1e-6))
                      for t in c.tilts()])
    return np.abs(a3 - a2), np.repeat(bound[:, None], 3, axis=1)


# ---------------------------------------------------------------------------
# lifting the forest
# ---------------------------------------------------------------------------


@dataclass
class TurnRecord:
    vertex: int
    prev: int
    next: int
    left3d: float
    right3d: float
    left2d: float
    faces_left: int
    faces_right: int

    @property
    def planar_turn(self) -> float:
        return math.pi - self.left2d

    @property
    def turn_left(self) -> float:
        """Turn measured through the surface on the path's left side."""
        return math.pi - self.left3d

    @property
    def turn_right(self) -> float:
        return self.right3d - math.pi

    @property
    def max_turn(self) -> float:
        return max(abs(self.turn_left), abs(self.turn_right))


@dataclass
class CutForest3D:
    edges: list[tuple[int, int]]  # (child, parent)
    roots: list[int]
    paths: list[list[int]]  # leaf-to-root vertex sequences
    turns: list[TurnRecord] = field(default_factory=list)

    def flagged(self, limit: float = RIGHT) -> list[TurnRecord]:
        return [t for t in self.turns if t.max_turn > limit + EPS_ANG]


class _Fans:
    """Counterclockwise neighbour order and corner angles around every interior vertex."""

    def __init__(self, c: ConvexCap):
        self.c = c
        a3 = c.corner_angles()
        a2 = _corner_angles(c.xy, c.triangles)
        # corner at v in face (v, p, q) (CCW) spans from neighbour p to neighbour q
        self.next_nbr: dict[tuple[int, int], tuple[int, float, float, int]] = {}
        for f, tri in enumerate(c.triangles):
            for k in range(3):
                v, p, q = int(tri[k]), int(tri[(k + 1) % 3]), int(tri[(k + 2) % 3])
                self.next_nbr[(v, p)] = (q, float(a3[f, k]), float(a2[f, k]), f)

    def sweep(self, v: int, start: int, stop: int) -> tuple[float, float, int, list[int]]:
        """Sum corner angles at ``v`` going counterclockwise from ``start`` to ``stop``."""
        s3 = s2 = 0.0
        faces = []
        u = start
        for _ in range(len(self.next_nbr)):
            if u == stop:
                return s3, s2, len(faces), faces
            if (v, u) not in self.next_nbr:
                raise LiftMismatch(f"fan at {v} is open between {start} and {stop}")
            u, a3, a2, f = self.next_nbr[(v, u)]
            s3 += a3
            s2 += a2
            faces.append(f)
        raise LiftMismatch(f"{stop} is not a neighbour of {v}")


def lift_forest(f: SpanningForest, c: ConvexCap) -> CutForest3D:
    """Lift the planar forest to cut edges of the cap and measure turn angles on the surface."""
    mesh_edges = c.edge_faces()
    edges = []
    children: dict[int, list[int]] = {}
    for j in range(4):
        for v, (u, _) in sorted(f.parents[j].items()):
            if (min(u, v), max(u, v)) not in mesh_edges:
                raise LiftMismatch(f"forest edge ({v}, {u}) is not a mesh edge")
            edges.append((v, u))
            children.setdefault(u, []).append(v)
    roots = sorted(r for j in range(4) for r in f.roots[j])
    fans = _Fans(c)
    turns = []
    for v, u in edges:  # v -> u toward the root; turn at u for every child v
        for j in range(4):
            if u in f.parents[j] and v in f.parents[j]:
                w = f.parents[j][u][0]
                # standing at u facing w, the left side runs CCW from u->w round to u->v
                l3, l2, kl, _ = fans.sweep(u, w, v)
                r3, _, kr, _ = fans.sweep(u, v, w)
                turns.append(TurnRecord(u, v, w, l3, r3, l2, kl, kr))
    leaves = sorted(v for v, _ in edges if v not in children)
    paths = []
    for leaf in leaves:
        j = f.assignment[leaf]
        paths.append(f.path_to_root(j, leaf))
    return CutForest3D(edges, roots, paths, turns)


# ---------------------------------------------------------------------------
# unfolding
# ---------------------------------------------------------------------------


@dataclass
class UnfoldedLayout:
    placed: np.ndarray  # (m, 3, 2), corner order as in cap.triangles
    root_face: int
    dual_tree: list[tuple[int, int]]  # (parent face, child face)
    cut_images: list[dict] = field(default_factory=list)  # per cut path: vertices, left, right polylines

    def face_areas(self) -> np.ndarray:
        p = self.placed
        a, b, cc = p[:, 0], p[:, 1], p[:, 2]
        return 0.5 * np.abs((b[:, 0] - a[:, 0]) * (cc[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (cc[:, 0] - a[:, 0]))


def _place_third(pa, pb, la, lb, lab):
    """Point at distances ``la`` from ``pa`` and ``lb`` from ``pb``, left of ``pa -> pb``."""
    x = (la * la - lb * lb + lab * lab) / (2.0 * lab)
    y = math.sqrt(max(la * la - x * x, 0.0))
    e = (pb - pa) / lab
    n = np.array([-e[1], e[0]])
    return pa + x * e + y * n


def root_face_at(c: ConvexCap, s: int) -> int:
    """Face at ``s`` whose counterclockwise corner sector contains (or starts at) direction 0."""
    best, best_key = None, None
    for f, tri in enumerate(c.triangles):
        for k in range(3):
            if int(tri[k]) != s:
                continue
            p, q = c.xy[tri[(k + 1) % 3]] - c.xy[s], c.xy[tri[(k + 2) % 3]] - c.xy[s]
            a0 = math.atan2(p[1], p[0]) % (2 * math.pi)
            width = (math.atan2(q[1], q[0]) - a0) % (2 * math.pi)
            contains = (2 * math.pi - a0) % (2 * math.pi) <= width + EPS_ANG or a0 <= EPS_ANG
            key = (0 if contains else 1, a0, f)
            if best_key is None or key < best_key:
                best, best_key = f, key
    if best is None:
        raise BadMesh(f"vertex {s} has no faces")
    return best


def unfold(c: ConvexCap, cuts: CutForest3D, root_face: int | None = None, source: int | None = None) -> UnfoldedLayout:
    """Edge-unfold ``c`` along ``cuts`` by hinging faces over a breadth-first dual tree."""
    cut = {(min(a, b), max(a, b)) for a, b in cuts.edges}
    ef = c.edge_faces()
    adj: dict[int, list[tuple[int, tuple[int, int]]]] = {f: [] for f in range(len(c.triangles))}
    for e, fs in sorted(ef.items()):
        if len(fs) == 2 and e not in cut:
            adj[fs[0]].append((fs[1], e))
            adj[fs[1]].append((fs[0], e))
    if root_face is None:
        root_face = root_face_at(c, source) if source is not None else 0
    V = c.vertices
    m = len(c.triangles)
    placed = np.full((m, 3, 2), np.nan)
    pos: list[dict[int, np.ndarray]] = [dict() for _ in range(m)]

    t0 = c.triangles[root_face]
    a, b, cc = (int(v) for v in t0)
    pa = c.xy[a].copy()
    d2 = c.xy[b] - c.xy[a]
    lab = float(np.linalg.norm(V[b] - V[a]))
    pb = pa + d2 / np.linalg.norm(d2) * lab
    pc = _place_third(pa, pb, float(np.linalg.norm(V[cc] - V[a])), float(np.linalg.norm(V[cc] - V[b])), lab)
    pos[root_face] = {a: pa, b: pb, cc: pc}

    seen = {root_face}
    tree = []
    queue = deque([root_face])
    while queue:
        f = queue.popleft()
        for g2, (u, v) in adj[f]:
            if g2 in seen:
                continue
            tri = [int(x) for x in c.triangles[g2]]
            k = next(i for i in range(3) if tri[i] not in (u, v))
            w, p, q = tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]
            # g2 is CCW (w, p, q): w lies left of p -> q
            pp, pq = pos[f][p], pos[f][q]
            lpq = float(np.linalg.norm(pq - pp))
            pw = _place_third(pp, pq, float(np.linalg.norm(V[w] - V[p])), float(np.linalg.norm(V[w] - V[q])), lpq)
            pos[g2] = {p: pp, q: pq, w: pw}
            seen.add(g2)
            tree.append((f, g2))
            queue.append(g2)
    if len(seen) != m:
        raise CutsDisconnectSurface(f"{m - len(seen)} faces unreachable from the root face")
    for f in range(m):
        placed[f] = [pos[f][int(v)] for v in c.triangles[f]]

    tol = max(eps_len(V) * 10.0, 1e-9 * max(1.0, float(np.ptp(V[:, :2], axis=0).max())))
    tree_pairs = {frozenset(p) for p in tree}
    for f in range(m):
        for g2, (u, v) in adj[f]:
            if f < g2 and frozenset((f, g2)) not in tree_pairs:
                for x in (u, v):
                    if np.linalg.norm(pos[f][x] - pos[g2][x]) > tol:
                        raise DevelopmentInconsistent(f"faces {f} and {g2} disagree at vertex {x}")
    layout = UnfoldedLayout(placed, root_face, tree)
    layout.cut_images = develop_cut_paths(c, cuts)
    return layout


def develop_cut_paths(c: ConvexCap, cuts: CutForest3D) -> list[dict]:
    """Develop each leaf-to-root cut path along its left and right sides.

    Each side is rebuilt in the plane from 3D edge lengths and the surface
    angle on that side at every interior path vertex, which is how the path
    appears on that side of the net when no other cut branches off it there.
    """
    fans = _Fans(c)
    V = c.vertices
    out = []
    for path in cuts.paths:
        sides = {}
        for side in ("left", "right"):
            pts = [np.zeros(2)]
            heading = 0.0
            for i in range(len(path) - 1):
                if i > 0:
                    prev, v, nxt = path[i - 1], path[i], path[i + 1]
                    if side == "left":
                        ang = fans.sweep(v, nxt, prev)[0]
                        heading += math.pi - ang
                    else:
                        ang = fans.sweep(v, prev, nxt)[0]
                        heading -= math.pi - ang
                length = float(np.linalg.norm(V[path[i + 1]] - V[path[i]]))
                pts.append(pts[-1] + length * np.array([math.cos(heading), math.sin(heading)]))
            sides[side] = np.array(pts)
        out.append({"vertices": list(path), "left": sides["left"], "right": sides["right"]})
    return out


def overlap_check(layout: UnfoldedLayout, eps: float | None = None) -> list[tuple[int, int]]:
    """Face pairs whose placed open interiors overlap by more than ``eps``."""
    tris = np.ascontiguousarray(layout.placed, dtype=float)
    if eps is None:
        eps = eps_len(tris.reshape(-1, 2)) * 10.0
    pairs = _kernels.triangle_overlaps(tris, float(eps))
    return [(int(i), int(j)) for i, j in pairs]


def radial_monotone_check(polyline, eps: float | None = None) -> bool:
    """Every vertex's distances to the later vertices never decrease.

    This is an operational stand-in for radial monotonicity.
    """
    p = np.asarray(polyline, dtype=float)
    if len(p) < 2:
        raise ValueError("need at least two points")
    if eps is None:
        eps = eps_len(p)
    for i in range(len(p) - 1):
        d = np.linalg.norm(p[i + 1:] - p[i], axis=1)
        if np.any(np.diff(d) < -eps):
            return False
    return True


# ---------------------------------------------------------------------------
# generation and the full pipeline
# ---------------------------------------------------------------------------


def lift_paraboloid(xy: np.ndarray, tris: np.ndarray, h: float, R: float) -> ConvexCap:
    r2 = np.einsum("ij,ij->i", xy, xy)
    z = h * (1.0 - r2 / (R * R))
    return ConvexCap.from_mesh(np.column_stack([xy, z]), tris)


def _triangles_of(g: PlaneGraph) -> np.ndarray:
    faces = [f for f in g.faces() if len(f) == 3 and _signed_area(g.xy, f) > 0]
    return np.array(sorted(tuple(f[f.index(min(f)):] + f[:f.index(min(f))]) for f in faces), dtype=np.int64)


def _signed_area(xy, f) -> float:
    a, b, c = (xy[v] for v in f)
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def hex_size_for(n: int) -> int:
    """Hexagonal patch radius whose vertex count ``3k(k+1)+1`` is closest to ``n``."""
    return max(1, round((math.sqrt(12 * n - 3) - 3) / 6))


def generate_cap(n: int, phi_target: float, seed: int = 0, jitter: float = 0.15) -> ConvexCap:
    """Jittered hexagonal patch of the equilateral lattice lifted onto ``z = h (1 - r^2/R^2)``.

    ``h`` is the largest height (found by bisection) whose maximum face tilt
    does not exceed ``phi_target``.
    """
    if n < 4:
        raise ValueError("need n >= 4")
    if not 0.0 <= phi_target < RIGHT:
        raise ProjectionUndefined("phi_target must lie in [0, 90deg)")
    rng = np.random.default_rng(seed)
    k = hex_size_for(n)
    for _ in range(10):
        g = hex_patch(k, rng, jitter)
        if validate(g, RIGHT).ok:
            break
        jitter *= 0.5
    else:
        raise GenerationFailed("could not jitter a non-obtuse patch")
    xy = g.xy - g.xy.mean(axis=0)
    tris = _triangles_of(g)
    R = float(np.sqrt(np.einsum("ij,ij->i", xy, xy)).max())
    if phi_target == 0.0:
        return lift_paraboloid(xy, tris, 0.0, R)
    lo, hi = 0.0, R
    for _ in range(60):
        if lift_paraboloid(xy, tris, hi, R).phi > phi_target:
            break
        hi *= 2.0
    else:
        raise GenerationFailed("tilt never reaches the target")
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        if lift_paraboloid(xy, tris, mid, R).phi <= phi_target:
            lo = mid
        else:
            hi = mid
    cap = lift_paraboloid(xy, tris, lo, R)
    if abs(cap.phi - phi_target) > math.radians(0.01):
        raise GenerationFailed(f"reached tilt {math.degrees(cap.phi):.4f} deg")
    return cap


def center_vertex(c: ConvexCap) -> int:
    interior = c.interior_vertices()
    d = np.linalg.norm(c.xy[interior] - c.xy.mean(axis=0), axis=1)
    return int(interior[int(np.argmin(d))])


@dataclass
class PipelineResult:
    n: int
    faces: int
    phi_deg: float
    source: int
    cut_edges: int
    overlaps: list[tuple[int, int]]
    radial_failures: int
    cut_paths: int
    max_turn_deg: float
    turns_over_90: int
    turn_bound_violations: int
    layout: UnfoldedLayout | None = None
    forest: SpanningForest | None = None
    cuts: CutForest3D | None = None

    def to_json(self) -> dict:
        return {
            "n": self.n, "faces": self.faces, "phi_deg": round(self.phi_deg, 9), "source": self.source,
            "cut_edges": self.cut_edges, "overlap_count": len(self.overlaps),
            "overlaps": [list(p) for p in self.overlaps],
            "cut_paths": self.cut_paths, "radial_monotone_failures": self.radial_failures,
            "max_turn_deg": round(self.max_turn_deg, 9), "turns_over_90": self.turns_over_90,
            "turn_bound_violations": self.turn_bound_violations,
        }


def run_pipeline(c: ConvexCap, source: int | None = None) -> PipelineResult:
    """project -> forest -> lift -> unfold -> overlap and radial-monotone checks."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        g = project(c)
    s = center_vertex(c) if source is None else source
    forest = algorithm1_forest(augment(g, RIGHT), s)
    cuts = lift_forest(forest, c)
    layout = unfold(c, cuts, source=s)
    overlaps = overlap_check(layout)
    radial = sum(1 for img in layout.cut_images for side in ("left", "right")
                 if not radial_monotone_check(img[side]))
    delta = max_angle_distortion(c.phi)
    bound_viol = sum(
        1 for t in cuts.turns
        if abs(t.turn_left - t.planar_turn) > t.faces_left * delta + 1e-9
        or abs(t.turn_right - t.planar_turn) > t.faces_right * delta + 1e-9
    )
    return PipelineResult(
        n=c.n, faces=len(c.triangles), phi_deg=math.degrees(c.phi), source=s, cut_edges=len(cuts.edges),
        overlaps=overlaps, radial_failures=radial, cut_paths=len(layout.cut_images),
        max_turn_deg=math.degrees(max((t.max_turn for t in cuts.turns), default=0.0)),
        turns_over_90=len(cuts.flagged()), turn_bound_violations=bound_viol,
        layout=layout, forest=forest, cuts=cuts,
    )
