"""Angle-monotone spanning trees and forests.

* :func:`prune_to_tree` keeps one incoming edge per vertex of a reach set.
* :func:`tree45` builds a spanning tree on graphs whose edges all lie at
  multiples of 45deg, by keeping every upper envelope and pruning between them.
* :func:`spanning_tree_oracle` decides (within a budget) whether any
  angle-monotone spanning tree rooted at ``s`` exists.
* :func:`counterexample_graph` builds a certified instance with none.
* :func:`algorithm1_forest` grows the quadrant forest used for unfolding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._config import EPS_ANG
from .geometry import TAU, angdist, canon, direction, point_in_polygon
from .graph import PlaneGraph, augment, validate, wedge_incidence
from .paths import (
    RIGHT, ReachSet, _as_augmented, envelope, path_in_wedge, reach_set, region_between,
    verify_monotone, SweepContext,
)


class NotA45Graph(ValueError):
    """An edge direction is not a multiple of 45 degrees."""


class TreeConstructionFailed(RuntimeError):
    """A constructed tree failed its own verification (should not happen on valid input)."""


class ConstructionFailed(RuntimeError):
    """A counterexample instance failed one of its certification checks."""


# ---------------------------------------------------------------------------
# trees
# ---------------------------------------------------------------------------


@dataclass
class RootedTree:
    root: int
    parent: dict[int, tuple[int, int]] = field(default_factory=dict)  # v -> (u, edge id)
    members: set[int] = field(default_factory=set)

    def __post_init__(self):
        self.members = set(self.members) | {self.root} | set(self.parent)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for v, (u, _) in self.parent.items())

    def path_from_root(self, v: int) -> list[int]:
        out = [v]
        for _ in range(len(self.members)):
            if out[-1] == self.root:
                return out[::-1]
            out.append(self.parent[out[-1]][0])
        raise TreeConstructionFailed("parent pointers contain a cycle")

    def is_tree(self) -> bool:
        try:
            return all(self.path_from_root(v)[0] == self.root for v in self.members)
        except (KeyError, TreeConstructionFailed):
            return False

    def verify(self, g, gamma: float = RIGHT) -> list[int]:
        """Members whose root path is not angle-monotone at width ``gamma``."""
        return [v for v in sorted(self.members) if not verify_monotone(self.path_from_root(v), g, gamma)[0]]

    def to_json(self) -> dict:
        return {"root": self.root, "edges": [list(e) for e in self.edges], "members": sorted(self.members)}


def prune_to_tree(r: ReachSet) -> RootedTree:
    """Keep the first-discovered incoming edge of every reached vertex."""
    parent = {v: r.preds[v][0] for v in r.order[1:]}
    return RootedTree(r.source, parent, set(r.reached))


def _edge_dirs_multiple_of_45(g: PlaneGraph) -> bool:
    q = math.pi / 4
    for i, j in g.edges:
        a = g.edge_dir(int(i), int(j))
        if angdist(a, round(a / q) * q) > EPS_ANG:
            return False
    return True


def tree45(g: PlaneGraph, s: int) -> RootedTree:
    """Angle-monotone (width 90deg) spanning tree rooted at ``s`` on a 45deg graph.

    The upper envelopes ``U(k * 45deg)`` are kept whole; every other vertex
    lies in a sector between two consecutive envelopes and is attached to its
    first breadth-first predecessor, under the sector's larger direction,
    that does not leave the sector.
    """
    if not _edge_dirs_multiple_of_45(g):
        raise NotA45Graph("all edge directions must be multiples of 45 degrees")
    gp = augment(g, RIGHT)
    betas = [k * math.pi / 4 for k in range(8)]
    ups = [envelope(gp, s, b, RIGHT, "upper") for b in betas]

    parent: dict[int, tuple[int, int]] = {}
    on_env: set[int] = {s}
    for env in ups:
        for u, v in zip(env.vertices, env.vertices[1:]):
            if v not in on_env:
                parent[v] = (u, g.edge_id(u, v))
                on_env.add(v)

    rest = [v for v in range(g.n) if v not in on_env]
    for i in range(8):
        if not rest:
            break
        lo, hi = ups[i], ups[(i + 1) % 8]
        reg = region_between(gp, lo, hi)
        if reg.degenerate:
            continue
        sector_env = set(lo.vertices) | set(hi.vertices)
        r = reach_set(gp, s, betas[(i + 1) % 8], RIGHT)
        inside = {v for v in rest if v in r.reached
                  and point_in_polygon(g.xy[v], reg.polygon, g.eps) != "outside"}
        if not inside:
            continue
        depth = _bfs_depth(r)
        for v in sorted(inside, key=lambda v: (depth[v], v)):
            for u, e in r.preds[v]:
                if depth[u] < depth[v] and (u in sector_env or u in inside):
                    parent[v] = (u, e)
                    break
        rest = [v for v in rest if v not in parent]
    if rest:
        raise TreeConstructionFailed(f"vertices {rest} lie in no sector")
    tree = RootedTree(s, parent, set(range(g.n)))
    bad = tree.verify(g, RIGHT) if tree.is_tree() else ["cycle"]
    if bad:
        raise TreeConstructionFailed(f"root paths of {bad} are not angle-monotone")
    return tree


def _bfs_depth(r: ReachSet) -> dict[int, int]:
    depth = {r.source: 0}
    for v in r.order[1:]:
        depth[v] = depth[r.preds[v][0][0]] + 1
    return depth


# ---------------------------------------------------------------------------
# path enumeration and the existence oracle
# ---------------------------------------------------------------------------


class BudgetExceeded(RuntimeError):
    """The enumeration or search budget ran out before an answer was found."""


def _extend_arc(lo: float, width: float, d: float) -> tuple[float, float]:
    """Smallest arc containing arc ``[lo, lo+width]`` and direction ``d``."""
    off = (d - lo) % TAU
    if off <= width + EPS_ANG or off >= TAU - EPS_ANG:
        return lo, width
    ccw = off
    cw = width + TAU - off
    return (lo, ccw) if ccw <= cw else (d, cw)


def monotone_paths(g: PlaneGraph, s: int, gamma: float = RIGHT, limit: int = 1_000_000) -> dict[int, list[tuple[int, ...]]]:
    """Every angle-monotone path of width ``gamma`` from ``s``, grouped by endpoint.

    Depth-first search pruned as soon as the directions used no longer fit in
    one wedge.  With ``gamma < 180deg`` such paths advance strictly along the
    wedge axis, so they are simple and the search is finite.
    """
    out: dict[int, list[tuple[int, ...]]] = {v: [] for v in range(g.n)}
    out[s].append((s,))
    count = 1
    stack = [((s,), 0.0, -1.0)]  # path, arc start, arc width (-1: empty)
    while stack:
        path, lo, width = stack.pop()
        u = path[-1]
        for d, v, _ in reversed(g.incidence[u]):
            if width < 0:
                nlo, nw = d, 0.0
            else:
                nlo, nw = _extend_arc(lo, width, d)
                if nw > gamma + EPS_ANG:
                    continue
            p = path + (v,)
            out[v].append(p)
            count += 1
            if count > limit:
                raise BudgetExceeded(f"more than {limit} monotone paths from {s}")
            stack.append((p, nlo, nw))
    for v in out:
        out[v].sort()
    return out


@dataclass
class Tree:
    tree: RootedTree
    nodes: int
    kind: str = "Tree"


@dataclass
class NoTree:
    nodes: int
    reason: str
    kind: str = "NoTree"


@dataclass
class BudgetExhausted:
    nodes: int
    kind: str = "BudgetExceeded"


OracleResult = Tree | NoTree | BudgetExhausted


def spanning_tree_oracle(g: PlaneGraph, s: int, gamma: float = RIGHT, budget: int = 200_000) -> OracleResult:
    """Decide whether ``g`` has an angle-monotone spanning tree rooted at ``s``.

    A spanning tree is the same thing as a choice of one root path per vertex
    such that the choice for every vertex on a chosen path is that path's
    prefix.  Candidates are all monotone paths (see :func:`monotone_paths`);
    the search assigns the most constrained vertex first and forward-checks
    every other vertex's candidates after each assignment.  ``budget`` bounds
    both the number of enumerated paths and the number of search nodes.
    """
    try:
        cands = monotone_paths(g, s, gamma, limit=budget)
    except BudgetExceeded:
        return BudgetExhausted(0)
    missing = [v for v, ps in cands.items() if not ps]
    if missing:
        return NoTree(0, f"no monotone path to {missing}")

    assign: dict[int, tuple[int, ...]] = {s: (s,)}
    nodes = 0

    def consistent(q: tuple[int, ...]) -> bool:
        for i, w in enumerate(q):
            a = assign.get(w)
            if a is not None and a != q[:i + 1]:
                return False
        return True

    def solve(domains: dict[int, list[tuple[int, ...]]]) -> bool:
        nonlocal nodes
        if not domains:
            return True
        v = min(domains, key=lambda u: (len(domains[u]), u))
        for p in domains[v]:
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded
            added = [w for w in p if w not in assign]
            for i, w in enumerate(p):
                assign.setdefault(w, p[:i + 1])
            nd = {}
            ok = True
            for u, dom in domains.items():
                if u in assign:
                    continue
                f = [q for q in dom if consistent(q)]
                if not f:
                    ok = False
                    break
                nd[u] = f
            if ok and solve(nd):
                return True
            for w in added:
                del assign[w]
        return False

    domains = {v: ps for v, ps in cands.items() if v != s}
    try:
        found = solve(domains)
    except BudgetExceeded:
        return BudgetExhausted(nodes)
    if not found:
        return NoTree(nodes, "search exhausted")
    parent = {v: (p[-2], g.edge_id(p[-2], v)) for v, p in assign.items() if v != s}
    return Tree(RootedTree(s, parent, set(range(g.n))), nodes)


# ---------------------------------------------------------------------------
# quadrant forest
# ---------------------------------------------------------------------------


def quadrant_of(v, s) -> int:
    """Quadrant index of ``v`` around ``s``: ``[j*90deg, (j+1)*90deg)``, with ``s`` itself in 0."""
    d = np.asarray(v, dtype=float) - np.asarray(s, dtype=float)
    if d[0] == 0.0 and d[1] == 0.0:
        return 0
    a = direction(d)
    return int(math.floor((a + EPS_ANG) / RIGHT)) % 4


def in_closed_quadrant(v, s, j: int, eps: float = 0.0) -> bool:
    d = np.asarray(v, dtype=float) - np.asarray(s, dtype=float)
    c, sn = math.cos(-j * RIGHT), math.sin(-j * RIGHT)
    x, y = c * d[0] - sn * d[1], sn * d[0] + c * d[1]
    return x >= -eps and y >= -eps


@dataclass
class SpanningForest:
    source: int
    parents: list[dict[int, tuple[int, int]]]  # per quadrant: v -> (next vertex toward root, edge id)
    roots: list[set[int]]
    assignment: dict[int, int]  # vertex -> quadrant of the tree holding it
    paths: list[tuple[int, list[int]]] = field(default_factory=list)  # grown paths in order: (quadrant, vertices)

    @staticmethod
    def beta(j: int) -> float:
        return canon(math.pi / 4 + j * RIGHT)

    def trees(self, j: int) -> list[RootedTree]:
        members: dict[int, set[int]] = {r: set() for r in self.roots[j]}
        for v in self.parents[j]:
            members[self.root_of(j, v)].add(v)
        return [RootedTree(r, {v: self.parents[j][v] for v in members[r]}, members[r]) for r in sorted(members)]

    def root_of(self, j: int, v: int) -> int:
        for _ in range(len(self.parents[j]) + 1):
            if v not in self.parents[j]:
                return v
            v = self.parents[j][v][0]
        raise TreeConstructionFailed("forest has a cycle")

    def path_to_root(self, j: int, v: int) -> list[int]:
        out = [v]
        for _ in range(len(self.parents[j]) + 1):
            if out[-1] not in self.parents[j]:
                return out
            out.append(self.parents[j][out[-1]][0])
        raise TreeConstructionFailed("forest has a cycle")

    def edges(self) -> list[tuple[int, int, int]]:
        """``(quadrant, child, parent)`` triples."""
        return sorted((j, v, u) for j in range(4) for v, (u, _) in self.parents[j].items())

    def edge_ids(self) -> set[int]:
        return {e for j in range(4) for (_, e) in self.parents[j].values()}

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "quadrants": [
                {"beta_deg": round(math.degrees(self.beta(j)), 6),
                 "roots": sorted(self.roots[j]),
                 "edges": [[v, u] for v, (u, _) in sorted(self.parents[j].items())]}
                for j in range(4)
            ],
        }


def algorithm1_forest(gp, s: int) -> SpanningForest:
    """Grow ``beta_j``-paths (``beta_j = 45deg + j*90deg``) from every interior vertex of quadrant ``Q_j``.

    Vertices are taken in order of (quadrant, distance from ``s``, direction
    from ``s``).  Each step follows the most counterclockwise edge inside the
    wedge whose head stays in ``Q_j``; rays are never followed.  A path stops
    at a vertex already in ``F_j`` or at a hull vertex, which becomes a root.
    """
    gp = _as_augmented(gp, RIGHT)
    g = gp.base
    xy = g.xy
    origin = xy[s]
    quad = [quadrant_of(xy[v], origin) for v in range(g.n)]
    dist = np.linalg.norm(xy - origin, axis=1)
    ang = [0.0 if v == s else direction(xy[v] - origin) for v in range(g.n)]
    order = sorted(range(g.n), key=lambda v: (quad[v], dist[v], ang[v], v))

    parents: list[dict[int, tuple[int, int]]] = [{} for _ in range(4)]
    roots: list[set[int]] = [set() for _ in range(4)]
    assignment: dict[int, int] = {}
    grown: list[tuple[int, list[int]]] = []
    for v in order:
        j = quad[v]
        if g.hull_flags[v] or v in assignment:
            continue
        beta = SpanningForest.beta(j)
        path = [v]
        u = v
        for _ in range(g.n):
            if u in assignment or g.hull_flags[u]:
                break
            step = None
            for d in reversed(wedge_incidence(gp, u, beta, RIGHT)):
                h = int(gp.dart_head[d])
                if h >= 0 and quadrant_of(xy[h], origin) == j:
                    step = (h, int(gp.dart_edge[d]))
                    break
            if step is None:
                break
            parents[j][u] = step
            assignment[u] = j
            u = step[0]
            path.append(u)
        if u not in assignment:
            assignment[u] = j
            roots[j].add(u)
        grown.append((j, path))
    return SpanningForest(s, parents, roots, assignment, grown)


def check_forest(f: SpanningForest, g: PlaneGraph) -> list[tuple[str, object]]:
    """Violations of the forest properties: coverage, disjointness, roots, monotonicity, confinement."""
    out: list[tuple[str, object]] = []
    origin = g.xy[f.source]
    seen: dict[int, int] = {}
    for j in range(4):
        members = set(f.parents[j]) | f.roots[j]
        for v in members:
            if v in seen:
                out.append(("shared-vertex", (v, seen[v], j)))
            seen[v] = j
        for r in f.roots[j]:
            if not g.hull_flags[r]:
                out.append(("interior-root", (j, r)))
            if r in f.parents[j]:
                out.append(("root-has-parent", (j, r)))
        for v in sorted(f.parents[j]):
            try:
                p = f.path_to_root(j, v)
            except TreeConstructionFailed:
                out.append(("cycle", (j, v)))
                continue
            if p[-1] not in f.roots[j]:
                out.append(("dangling", (j, v)))
            if not path_in_wedge(p, g, f.beta(j), RIGHT):
                out.append(("not-monotone", (j, v)))
            for w in p:
                if w != f.source and not in_closed_quadrant(g.xy[w], origin, j, g.eps):
                    out.append(("leaves-quadrant", (j, v, w)))
                    break
    for v in g.interior_vertices():
        if v not in seen:
            out.append(("uncovered", v))
    return out


# ---------------------------------------------------------------------------
# counterexample to spanning trees
# ---------------------------------------------------------------------------

# Half-angle of the wedge a-s-b, and the tilt of a->x from vertical.
_CEX_ALPHA = math.radians(44.0)
_CEX_RHO = math.radians(35.0)
# Left-half free coordinates, found by a penalty-driven search and rounded;
# the right half is the mirror image in the y-axis.
_CEX_W_DIR, _CEX_W_DIST = math.radians(198.7), 1.42
_CEX_LEFT = {"C": (0.0, 2.2), "c": (-1.64, -0.3), "d": (0.0, -0.83), "D": (-1.79, -1.6), "E": (0.0, -1.91)}
_CEX_MIRROR = {"b": "a", "B": "A", "y": "w", "e": "c", "F": "D"}
CEX_NAMES = ("s", "a", "b", "x", "w", "y", "c", "d", "e", "A", "B", "C", "D", "E", "F")
CEX_EDGES = (
    "AC Aw Ax BC Bx By Cx DE Dc Dd EF Ed Fd Fe ab ac as aw ax be bs bx by cd cs cw de ds es ey wx xy"
).split()
CEX_SHIFT_MAX = math.radians(4.4)


@dataclass
class Counterexample:
    graph: PlaneGraph
    s: int
    labels: dict[str, int]
    shift: float
    acute: float
    certificate: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> int:
        return self.labels[name]

    def named(self, path) -> str:
        inv = {i: k for k, i in self.labels.items()}
        return "".join(inv[v] for v in path)


def _cex_points(shift: float, acute: float) -> dict[str, np.ndarray]:
    dirv = lambda t: np.array([math.cos(t), math.sin(t)])  # noqa: E731
    a = dirv(RIGHT + _CEX_ALPHA)
    x = a + (-a[0] / math.cos(RIGHT - _CEX_RHO)) * dirv(RIGHT - _CEX_RHO)
    w = x + _CEX_W_DIST * dirv(_CEX_W_DIR)
    # A sits on the circle with diameter xw (so angle xAw is right); the
    # shift slides it along that circle, away from B.
    d_a = math.pi - _CEX_ALPHA + shift
    A = x + _CEX_W_DIST * math.cos(_CEX_W_DIR - d_a) * dirv(d_a)
    if acute:
        # push A just outside the circle, making every face angle strictly acute
        mid = 0.5 * (x + w)
        A = mid + (A - mid) * (1.0 + acute)
    pts = {"s": np.zeros(2), "a": a, "x": x, "w": w, "A": A}
    pts.update({k: np.array(v) for k, v in _CEX_LEFT.items()})
    for right, left in _CEX_MIRROR.items():
        pts[right] = pts[left] * np.array([-1.0, 1.0])
    return pts


def counterexample_graph(shift: float = math.radians(2.0), acute: float = 0.0, certify: bool | None = None,
                         budget: int = 200_000) -> Counterexample:
    """Non-obtuse triangulation with no angle-monotone spanning tree rooted at ``s``.

    Center ``s``; inner vertices ``a, b, c, d, e, w, x, y``; hull vertices
    ``A..F`` plus ``c, e, w, y``.  ``shift`` (radians) rotates ``A`` and ``B``
    about ``x`` away from each other; at ``shift = 0`` both ``(s,a,x,A)`` and
    ``(s,b,x,A)`` are angle-monotone (and symmetrically for ``B``), while any
    ``0 < shift <= CEX_SHIFT_MAX`` leaves exactly one path to each, and those
    two paths close the cycle ``(s,a,x,b)``.  ``acute > 0`` moves ``A`` and
    ``B`` slightly outward so that no face angle equals 90deg.

    With ``certify`` (default: ``shift > 0``) every claimed property is
    checked and a failure raises :class:`ConstructionFailed`.
    """
    if shift < 0 or shift > CEX_SHIFT_MAX + EPS_ANG:
        raise ConstructionFailed(f"shift must lie in [0, {math.degrees(CEX_SHIFT_MAX):.2f} deg]")
    pts = _cex_points(shift, acute)
    labels = {k: i for i, k in enumerate(CEX_NAMES)}
    g = PlaneGraph([pts[k] for k in CEX_NAMES], [(labels[e[0]], labels[e[1]]) for e in CEX_EDGES])
    cex = Counterexample(g, labels["s"], labels, shift, acute)
    if certify is None:
        certify = shift > 0
    cex.certificate = certify_counterexample(cex, budget) if certify else {}
    return cex


def certify_counterexample(cex: Counterexample, budget: int = 200_000) -> dict:
    """Check every claimed property; raise :class:`ConstructionFailed` on the first failure."""
    g, s, L = cex.graph, cex.s, cex.labels
    rep = validate(g, RIGHT)
    if not rep.ok:
        raise ConstructionFailed(f"not a valid non-obtuse triangulation: {rep.kinds()}")
    if cex.acute and rep.max_angle >= RIGHT:
        raise ConstructionFailed("acute variant has a right angle")
    paths = monotone_paths(g, s, RIGHT, limit=budget)
    to_a = [cex.named(p) for p in paths[L["A"]]]
    to_b = [cex.named(p) for p in paths[L["B"]]]
    if to_a != ["saxA"] or to_b != ["sbxB"]:
        raise ConstructionFailed(f"paths to A: {to_a}, to B: {to_b}")
    oracle = spanning_tree_oracle(g, s, RIGHT, budget)
    if oracle.kind != "NoTree":
        raise ConstructionFailed(f"oracle returned {oracle.kind}")
    ctx = SweepContext(g, RIGHT)
    missing = [(u, v) for u in range(g.n) for v, p in enumerate(ctx.sweep(u).paths()) if p is None]
    if missing:
        raise ConstructionFailed(f"pairs without a monotone path: {missing[:5]}")
    return {
        "max_angle_deg": math.degrees(rep.max_angle),
        "paths_to_A": to_a,
        "paths_to_B": to_b,
        "cycle": "saxb",
        "oracle": oracle.kind,
        "oracle_nodes": oracle.nodes,
        "path_counts": {k: len(paths[i]) for k, i in L.items()},
    }
