"""Plane straight-line graphs with hull marking, and their ray augmentation.

An :class:`AugmentedGraph` stores every outgoing *dart* (directed edge or
exterior ray) of every vertex in one CSR block, sorted counterclockwise by
direction.  Rays have ``head == -1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._config import EPS_ANG, eps_len
from .geometry import (
    TAU, DegenerateHull, ccw_offset, canon, convex_hull, direction, in_wedge_dir,
    polygon_area,
)


class BadGraph(ValueError):
    """Malformed graph: bad indices, self loops or duplicate edges."""


class PlaneGraph:
    """Straight-line embedded graph over a 2D point set."""

    def __init__(self, vertices, edges):
        xy = np.asarray(vertices, dtype=float)
        if xy.size == 0:
            xy = xy.reshape(0, 2)
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise BadGraph("vertices must be an (n, 2) array")
        if not np.all(np.isfinite(xy)):
            raise BadGraph("non-finite coordinates")
        n = len(xy)
        canon_edges = set()
        for e in edges:
            if len(e) != 2:
                raise BadGraph(f"edge {e!r} is not a pair")
            i, j = int(e[0]), int(e[1])
            if not (0 <= i < n and 0 <= j < n):
                raise BadGraph(f"edge ({i}, {j}) references a missing vertex")
            if i == j:
                raise BadGraph(f"self loop at {i}")
            key = (min(i, j), max(i, j))
            if key in canon_edges:
                raise BadGraph(f"duplicate edge {key}")
            canon_edges.add(key)
        self.xy = xy
        self.edges = np.array(sorted(canon_edges), dtype=np.int64).reshape(-1, 2)
        self._edge_ids = {(int(i), int(j)): k for k, (i, j) in enumerate(self.edges)}
        self.eps = eps_len(xy)
        self.diam = float(np.linalg.norm(xy.max(axis=0) - xy.min(axis=0))) if n else 0.0
        self._build_incidence()
        try:
            hull = convex_hull(xy, self.eps)
            self.hull = list(hull.indices)
        except DegenerateHull:
            self.hull = []
        self.hull_flags = np.zeros(n, dtype=bool)
        self.hull_flags[self.hull] = True

    def _build_incidence(self):
        n = len(self.xy)
        inc: list[list[tuple[float, int, int]]] = [[] for _ in range(n)]
        for k, (i, j) in enumerate(self.edges):
            d = self.xy[j] - self.xy[i]
            if d[0] == 0.0 and d[1] == 0.0:
                raise BadGraph(f"edge ({i}, {j}) has zero length")
            inc[i].append((direction(d), int(j), k))
            inc[j].append((direction(-d), int(i), k))
        for lst in inc:
            lst.sort()
        self.incidence = inc

    @property
    def n(self) -> int:
        return len(self.xy)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> list[int]:
        return [u for _, u, _ in self.incidence[v]]

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._edge_ids

    def edge_id(self, u: int, v: int) -> int:
        """Index into :attr:`edges` of edge ``uv``; ``KeyError`` if absent."""
        return self._edge_ids[(min(u, v), max(u, v))]

    def edge_dir(self, u: int, v: int) -> float:
        return direction(self.xy[v] - self.xy[u])

    def interior_vertices(self) -> list[int]:
        return [v for v in range(self.n) if not self.hull_flags[v]]

    def faces(self) -> list[list[int]]:
        """Vertex cycles of all faces; bounded faces come out CCW, the outer one CW."""
        pos = [{u: k for k, (_, u, _) in enumerate(lst)} for lst in self.incidence]
        seen = set()
        out = []
        for u in range(self.n):
            for _, v, _ in self.incidence[u]:
                if (u, v) in seen:
                    continue
                cycle = []
                a, b = u, v
                while (a, b) not in seen:
                    seen.add((a, b))
                    cycle.append(a)
                    lst = self.incidence[b]
                    k = pos[b][a]
                    a, b = b, lst[(k - 1) % len(lst)][1]
                out.append(cycle)
        return out

    def face_angles(self, face: list[int]) -> list[float]:
        """Interior angle at each corner of a CCW face."""
        out = []
        k = len(face)
        for i in range(k):
            p, v, q = face[i - 1], face[i], face[(i + 1) % k]
            out.append(ccw_offset(self.edge_dir(v, p), self.edge_dir(v, q)))
        return out

    def bounded_faces(self) -> list[list[int]]:
        return [f for f in self.faces() if polygon_area(self.xy[f]) > 0.0]

    def to_json(self, augmented: "AugmentedGraph | None" = None) -> dict:
        out = {
            "vertices": [[float(x), float(y)] for x, y in self.xy],
            "edges": [[int(i), int(j)] for i, j in self.edges],
            "hull": [int(i) for i in self.hull],
        }
        if augmented is not None:
            out["rays"] = [[r.origin, round(math.degrees(r.dir), 12)] for r in augmented.rays]
        return out


@dataclass
class ValidationReport:
    violations: list[tuple[str, str]] = field(default_factory=list)
    max_angle: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, detail: str):
        self.violations.append((kind, detail))

    def kinds(self) -> set[str]:
        return {k for k, _ in self.violations}

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "max_angle_deg": math.degrees(self.max_angle),
            "violations": [{"kind": k, "detail": d} for k, d in self.violations],
        }


def validate(g: PlaneGraph, gamma: float = math.pi / 2) -> ValidationReport:
    """Check that ``g`` is a plane triangulation of its hull with angles at most ``gamma``."""
    if not (math.radians(60) - EPS_ANG <= gamma < math.pi):
        raise ValueError("gamma must lie in [60deg, 180deg)")
    rep = ValidationReport()
    if not g.hull:
        rep.add("hull", "vertex set is degenerate (collinear)")
        return rep
    for v in range(g.n):
        if not g.incidence[v]:
            rep.add("isolated", f"vertex {v} has no edges")
    for i, j in _kernels.edge_crossings(g.xy, g.edges, g.eps):
        rep.add("crossing", f"edges {tuple(g.edges[i])} and {tuple(g.edges[j])} intersect")
    if rep.violations:
        return rep

    outer = []
    for f in g.faces():
        area = polygon_area(g.xy[f])
        if area <= 0.0:
            outer.append(f)
            continue
        if len(f) != 3:
            rep.add("face", f"internal face {f} is not a triangle")
            continue
        for v, ang in zip(f, g.face_angles(f)):
            rep.max_angle = max(rep.max_angle, ang)
            if ang > gamma + EPS_ANG:
                rep.add("angle", f"angle {math.degrees(ang):.6f}deg at vertex {v} of face {f}")
    if len(outer) != 1:
        rep.add("hull", f"expected one outer face, found {len(outer)}")
    elif not _same_cycle(outer[0][::-1], g.hull):
        rep.add("hull", "outer face does not match the convex hull")
    return rep


def _same_cycle(a: list[int], b: list[int]) -> bool:
    if len(a) != len(b) or set(a) != set(b):
        return False
    k = a.index(b[0])
    return a[k:] + a[:k] == list(b)


@dataclass(frozen=True)
class Ray:
    origin: int
    dir: float


class AugmentedGraph:
    """A :class:`PlaneGraph` plus exterior rays at hull vertices."""

    def __init__(self, base: PlaneGraph, rays: list[Ray], gamma: float):
        self.base = base
        self.rays = list(rays)
        self.gamma = gamma
        n = base.n
        per_vertex: list[list[tuple[float, int, int, int]]] = [[] for _ in range(n)]
        for v in range(n):
            for d, u, k in base.incidence[v]:
                per_vertex[v].append((d, u, k, -1))
        for r_id, r in enumerate(self.rays):
            per_vertex[r.origin].append((r.dir, -1, -1, r_id))
        for lst in per_vertex:
            lst.sort()
        offsets = np.zeros(n + 1, dtype=np.int64)
        for v in range(n):
            offsets[v + 1] = offsets[v] + len(per_vertex[v])
        D = int(offsets[-1])
        self.offsets = offsets
        self.dart_tail = np.empty(D, dtype=np.int64)
        self.dart_head = np.empty(D, dtype=np.int64)
        self.dart_dir = np.empty(D, dtype=np.float64)
        self.dart_edge = np.empty(D, dtype=np.int64)
        self.dart_ray = np.empty(D, dtype=np.int64)
        idx = {}
        for v in range(n):
            for k, (d, u, e, r) in enumerate(per_vertex[v]):
                i = offsets[v] + k
                self.dart_tail[i] = v
                self.dart_head[i] = u
                self.dart_dir[i] = d
                self.dart_edge[i] = e
                self.dart_ray[i] = r
                if u >= 0:
                    idx[(v, u)] = i
        self.dart_twin = np.array(
            [idx[(int(h), int(t))] if h >= 0 else -1 for t, h in zip(self.dart_tail, self.dart_head)],
            dtype=np.int64,
        )
        self._dart_index = idx

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def xy(self) -> np.ndarray:
        return self.base.xy

    def darts(self, v: int) -> range:
        return range(int(self.offsets[v]), int(self.offsets[v + 1]))

    def dart(self, u: int, v: int) -> int:
        return self._dart_index[(u, v)]

    def is_ray(self, d: int) -> bool:
        return self.dart_head[d] < 0

    def max_gap(self, v: int) -> float:
        dirs = [self.dart_dir[d] for d in self.darts(v)]
        if len(dirs) == 1:
            return TAU
        return max(ccw_offset(dirs[(i + 1) % len(dirs)], dirs[i]) for i in range(len(dirs)))

    def all_dirs(self) -> np.ndarray:
        return self.dart_dir


def augment(g: PlaneGraph, gamma: float = math.pi / 2) -> AugmentedGraph:
    """Subdivide each hull vertex's exterior angle evenly into pieces of at most ``min(gamma, 90deg)``."""
    step = min(gamma, math.pi / 2)
    rays = []
    h = g.hull
    for k, v in enumerate(h):
        prev, nxt = h[k - 1], h[(k + 1) % len(h)]
        d_prev = g.edge_dir(v, prev)
        ext = ccw_offset(g.edge_dir(v, nxt), d_prev)
        count = math.ceil(ext / step - 1e-9) - 1
        for i in range(1, count + 1):
            rays.append(Ray(v, canon(d_prev + ext * i / (count + 1))))
    return AugmentedGraph(g, rays, gamma)


def dart_offset(theta: float, beta: float, gamma: float) -> float:
    """CCW offset of direction ``theta`` from the lower ray ``beta - gamma/2``.

    Values just below zero (within tolerance) are reported as small negatives
    so that boundary darts sort first.
    """
    off = ccw_offset(theta, beta - 0.5 * gamma)
    if off > TAU - EPS_ANG:
        off -= TAU
    return off


def wedge_incidence(gp: AugmentedGraph, v: int, beta: float, gamma: float) -> list[int]:
    """Darts at ``v`` inside the closed wedge, sorted from the lower ray to the upper one."""
    hits = [d for d in gp.darts(v) if in_wedge_dir(gp.dart_dir[d], beta, gamma)]
    hits.sort(key=lambda d: dart_offset(gp.dart_dir[d], beta, gamma))
    return hits


def check_augmented(gp: AugmentedGraph, gamma: float | None = None) -> list[str]:
    """Problems with the augmentation: oversized angular gaps or rays crossing edges."""
    gamma = gp.gamma if gamma is None else gamma
    problems = []
    for v in range(gp.n):
        gap = gp.max_gap(v)
        if gap > gamma + EPS_ANG:
            problems.append(f"vertex {v}: angular gap {math.degrees(gap):.6f}deg exceeds width")
    g = gp.base
    for r_id, r in enumerate(gp.rays):
        o = g.xy[r.origin]
        u = np.array([math.cos(r.dir), math.sin(r.dir)])
        for i, j in g.edges:
            if r.origin in (i, j):
                continue
            if _ray_hits_segment(o, u, g.xy[i], g.xy[j], g.eps):
                problems.append(f"ray {r_id} from {r.origin} crosses edge ({i}, {j})")
    return problems


def _ray_hits_segment(o, u, a, b, eps) -> bool:
    # solve o + t u = a + s (b - a), t >= 0, s in [0, 1]
    w = b - a
    den = u[0] * (-w[1]) - u[1] * (-w[0])
    rhs = a - o
    if abs(den) < 1e-15:
        # parallel: hit only if collinear and ahead
        if abs(u[0] * rhs[1] - u[1] * rhs[0]) > eps:
            return False
        return max(float((a - o) @ u), float((b - o) @ u)) >= -eps
    t = (rhs[0] * (-w[1]) - rhs[1] * (-w[0])) / den
    s = (u[0] * rhs[1] - u[1] * rhs[0]) / den
    return t >= -eps and -eps <= s <= 1 + eps
