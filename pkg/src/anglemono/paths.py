"""Angle-monotone reachability from a source vertex.

For a wedge direction ``beta`` and width ``gamma`` a beta-path only uses darts
whose direction lies in the closed wedge.  :func:`reach_set` is the closure of
all such paths from ``s``; :func:`envelope` follows the most counterclockwise
(upper) or most clockwise (lower) dart; :func:`critical_angles` lists the
directions at which the reach set can change.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._config import EPS_ANG
from .geometry import (
    TAU, Polygon2, canon, in_wedge_dir, min_enclosing_arc, polygon_area,
)
from .graph import AugmentedGraph, augment, wedge_incidence

RIGHT = math.pi / 2


class NotAPath(ValueError):
    """Consecutive path vertices are not joined by an edge."""


@dataclass
class ReachSet:
    source: int
    beta: float
    width: float
    reached: set[int]
    used: set[int]
    preds: dict[int, list[tuple[int, int]]] = field(default_factory=dict)  # v -> [(u, edge id)]
    order: list[int] = field(default_factory=list)

    def path_to(self, t: int) -> list[int] | None:
        """Backtrack first-discovered predecessors from ``t`` to the source."""
        if t not in self.reached:
            return None
        out = [t]
        while out[-1] != self.source:
            out.append(self.preds[out[-1]][0][0])
        return out[::-1]


def _as_augmented(g, gamma: float) -> AugmentedGraph:
    if isinstance(g, AugmentedGraph):
        return g
    return augment(g, gamma)


def reach_set(gp: AugmentedGraph, s: int, beta: float, gamma: float = RIGHT) -> ReachSet:
    """Breadth-first closure of beta-paths from ``s``; rays are recorded but end exploration."""
    reached = {s}
    used: set[int] = set()
    preds: dict[int, list[tuple[int, int]]] = {}
    order = [s]
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for d in gp.darts(u):
            if not in_wedge_dir(gp.dart_dir[d], beta, gamma):
                continue
            used.add(d)
            v = int(gp.dart_head[d])
            if v < 0:
                continue
            preds.setdefault(v, []).append((u, int(gp.dart_edge[d])))
            if v not in reached:
                reached.add(v)
                order.append(v)
                queue.append(v)
    return ReachSet(s, beta, gamma, reached, used, preds, order)


@dataclass
class EnvelopePath:
    kind: str
    vertices: list[int]
    darts: list[int]

    @property
    def last_vertex(self) -> int:
        return self.vertices[-1]


def envelope(gp: AugmentedGraph, s: int, beta: float, gamma: float = RIGHT, kind: str = "upper") -> EnvelopePath:
    """Greedy most-CCW (``upper``) or most-CW (``lower``) maximal beta-path from ``s``."""
    if kind not in ("upper", "lower"):
        raise ValueError("kind must be 'upper' or 'lower'")
    verts = [s]
    darts = []
    v = s
    for _ in range(gp.n + 1):
        inc = wedge_incidence(gp, v, beta, gamma)
        if not inc:
            # only possible when the angle bound is violated at v
            break
        d = inc[-1] if kind == "upper" else inc[0]
        darts.append(d)
        if gp.is_ray(d):
            break
        v = int(gp.dart_head[d])
        verts.append(v)
    return EnvelopePath(kind, verts, darts)


@dataclass
class Region:
    polygon: Polygon2
    degenerate: bool


def region_between(gp: AugmentedGraph, lower: EnvelopePath, upper: EnvelopePath) -> Region:
    """Polygon bounded by ``upper``, the hull arc back to ``lower``'s exit, and ``lower`` reversed."""
    hull = gp.base.hull
    pos = {v: k for k, v in enumerate(hull)}
    u_end, l_end = upper.last_vertex, lower.last_vertex
    arc = [u_end]
    if u_end != l_end and u_end in pos and l_end in pos:
        k = pos[u_end]
        while hull[k] != l_end:
            k = (k - 1) % len(hull)
            arc.append(hull[k])
    ring = list(upper.vertices) + arc[1:] + list(lower.vertices[::-1])[1:]
    if len(ring) > 1 and ring[-1] == ring[0]:
        ring.pop()
    ring = ring[::-1]  # traversal above is clockwise
    pts = gp.xy[ring]
    degenerate = abs(polygon_area(pts)) <= gp.base.eps * max(gp.base.diam, 1e-300)
    return Region(Polygon2(pts, tuple(ring)), degenerate)


def region(gp: AugmentedGraph, s: int, beta: float, gamma: float = RIGHT) -> Region:
    up = envelope(gp, s, beta, gamma, "upper")
    lo = envelope(gp, s, beta, gamma, "lower")
    return region_between(gp, lo, up)


@dataclass
class CriticalAngleList:
    angles: list[float]
    midpoints: list[float]

    def scan(self) -> list[float]:
        """Criticals and midpoints, interleaved in increasing order."""
        return sorted(self.angles + self.midpoints)


def critical_angles_for_directions(dirs, gamma: float) -> CriticalAngleList:
    cand = sorted(canon(t + sgn * 0.5 * gamma) for t in dirs for sgn in (1.0, -1.0))
    out: list[float] = []
    for a in cand:
        if not out or a - out[-1] > EPS_ANG:
            out.append(a)
    if len(out) > 1 and out[0] + TAU - out[-1] <= EPS_ANG:
        out.pop()
    mids = []
    for i, a in enumerate(out):
        b = out[(i + 1) % len(out)]
        gap = (b - a) % TAU if len(out) > 1 else TAU
        mids.append(canon(a + 0.5 * gap))
    return CriticalAngleList(out, mids)


def critical_angles(gp: AugmentedGraph, gamma: float = RIGHT) -> CriticalAngleList:
    return critical_angles_for_directions(gp.dart_dir, gamma)


@dataclass
class AnglePath:
    vertices: list[int]
    beta: float


def verify_monotone(path: list[int], g, gamma: float = RIGHT) -> tuple[bool, float | None]:
    """``(ok, witness)``: ok iff the path's edge directions fit in one wedge of width ``gamma``."""
    base = g.base if isinstance(g, AugmentedGraph) else g
    if len(path) < 2:
        return True, None
    dirs = []
    for u, v in zip(path, path[1:]):
        if not base.has_edge(u, v):
            raise NotAPath(f"({u}, {v}) is not an edge")
        dirs.append(base.edge_dir(u, v))
    width, center = min_enclosing_arc(dirs)
    if width <= gamma + EPS_ANG:
        return True, center
    return False, None


def path_in_wedge(path: list[int], g, beta: float, gamma: float = RIGHT) -> bool:
    base = g.base if isinstance(g, AugmentedGraph) else g
    return all(in_wedge_dir(base.edge_dir(u, v), beta, gamma) for u, v in zip(path, path[1:]))


def spanning_ratio(path: list[int], g) -> float:
    base = g.base if isinstance(g, AugmentedGraph) else g
    if len(path) < 2 or path[0] == path[-1]:
        return 1.0
    xy = base.xy
    length = sum(float(np.linalg.norm(xy[v] - xy[u])) for u, v in zip(path, path[1:]))
    return length / float(np.linalg.norm(xy[path[-1]] - xy[path[0]]))


# ---------------------------------------------------------------------------
# all-directions sweep
# ---------------------------------------------------------------------------


@dataclass
class Sweep:
    """Reachability of every vertex from one source, for every scan direction at once."""

    gp: AugmentedGraph
    source: int
    width: float
    betas: np.ndarray
    masks: np.ndarray
    reach: np.ndarray

    def first_hits(self) -> np.ndarray:
        return _kernels.lowest_bits(self.reach)

    def covered(self) -> np.ndarray:
        return (self.reach != 0).any(axis=1)

    def reached_at(self, k: int) -> set[int]:
        w, b = k >> 6, np.uint64(k & 63)
        col = (self.reach[:, w] >> b) & np.uint64(1)
        return {int(v) for v in np.nonzero(col)[0]}

    def paths(self, targets=None) -> list[AnglePath | None]:
        targets = np.arange(self.gp.n) if targets is None else np.asarray(targets, dtype=np.int64)
        hits = self.first_hits()[targets]
        off, verts = _kernels.backtrack_paths(
            self.gp.offsets, self.gp.dart_head, self.gp.dart_twin, self.masks, self.reach,
            self.source, targets, hits)
        out: list[AnglePath | None] = []
        for i, t in enumerate(targets):
            p = verts[off[i]:off[i + 1]]
            if t == self.source:
                out.append(AnglePath([int(t)], 0.0))
            elif len(p) == 0:
                out.append(None)
            else:
                out.append(AnglePath([int(v) for v in p], float(self.betas[hits[i]])))
        return out

    def raw_paths(self):
        """``(path_off, path_verts, first_hits)`` for all vertices, without Python objects."""
        targets = np.arange(self.gp.n, dtype=np.int64)
        hits = self.first_hits()
        off, verts = _kernels.backtrack_paths(
            self.gp.offsets, self.gp.dart_head, self.gp.dart_twin, self.masks, self.reach,
            self.source, targets, hits)
        return off, verts, hits


class SweepContext:
    """Wedge masks for one graph and width, shared by sweeps from every source."""

    def __init__(self, g, gamma: float = RIGHT):
        self.gp = _as_augmented(g, gamma)
        self.width = gamma
        self.betas = np.array(critical_angles(self.gp, gamma).scan())
        self.masks = _kernels.wedge_masks(self.gp.dart_dir, self.betas, gamma)
        self.full = _kernels.full_bits(len(self.betas))

    def sweep(self, s: int) -> Sweep:
        reach = _kernels.propagate_reach(self.gp.offsets, self.gp.dart_head, self.masks, int(s), self.full)
        return Sweep(self.gp, int(s), self.width, self.betas, self.masks, reach)


def find_path(g, s: int, t: int, gamma: float = RIGHT, ctx: SweepContext | None = None) -> AnglePath | None:
    """Angle-monotone path from ``s`` to ``t`` of width ``gamma``, or ``None``.

    Scans critical directions (and the midpoints between them) in increasing
    order and returns a path from the first reach set containing ``t``.
    """
    if s == t:
        return AnglePath([s], 0.0)
    ctx = ctx if ctx is not None else SweepContext(g, gamma)
    return ctx.sweep(s).paths([t])[0]


def find_path_scan(g, s: int, t: int, gamma: float = RIGHT) -> AnglePath | None:
    """Reference version of :func:`find_path`: one breadth-first reach set per scan direction."""
    if s == t:
        return AnglePath([s], 0.0)
    gp = _as_augmented(g, gamma)
    for beta in critical_angles(gp, gamma).scan():
        r = reach_set(gp, s, beta, gamma)
        if t in r.reached:
            return AnglePath(r.path_to(t), float(beta))
    return None


def union_coverage(gp: AugmentedGraph, s: int, gamma: float = RIGHT, critical_only: bool = True) -> set[int]:
    """Union of ``V(beta)`` over critical directions (optionally with midpoints)."""
    crit = critical_angles(gp, gamma)
    betas = crit.angles if critical_only else crit.scan()
    out: set[int] = set()
    for b in betas:
        out |= reach_set(gp, s, b, gamma).reached
    return out


def is_self_approaching(points, eps: float = 0.0) -> bool:
    """Distances from every vertex to later vertices never decrease."""
    p = np.asarray(points, dtype=float)
    for i in range(len(p) - 1):
        d = np.linalg.norm(p[i + 1:] - p[i], axis=1)
        if np.any(np.diff(d) < -eps):
            return False
    return True
