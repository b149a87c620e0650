"""Planar vector algebra, angles, wedges, hulls and polygon predicates.

Angles are radians in ``[0, 2*pi)``.  Wedges are closed on both bounding rays;
membership ties within ``EPS_ANG`` resolve to inclusion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._config import EPS_ANG, eps_len

TAU = 2.0 * math.pi


class DegenerateVector(ValueError):
    """Direction requested for a zero vector."""


class DegenerateHull(ValueError):
    """All input points are collinear (or fewer than three distinct)."""


def canon(angle: float) -> float:
    a = angle % TAU
    # -0.0 and values that round up to TAU
    return 0.0 if a >= TAU or a == 0.0 else a


def deg(angle_deg: float) -> float:
    return canon(math.radians(angle_deg))


def direction(v) -> float:
    x, y = float(v[0]), float(v[1])
    if x == 0.0 and y == 0.0:
        raise DegenerateVector("zero vector has no direction")
    return canon(math.atan2(y, x))


def angdist(a: float, b: float) -> float:
    """Unsigned circular distance between two angles, in ``[0, pi]``."""
    return abs((a - b + math.pi) % TAU - math.pi)


def ccw_offset(a: float, start: float) -> float:
    """Counterclockwise sweep from ``start`` to ``a``, in ``[0, 2*pi)``."""
    return (a - start) % TAU


def in_wedge_dir(theta: float, center: float, width: float, eps: float = EPS_ANG) -> bool:
    return angdist(theta, center) <= 0.5 * width + eps


def in_wedge(v, center: float, width: float, eps: float = EPS_ANG) -> bool:
    """True iff vector ``v`` points into the closed wedge ``(center, width)``."""
    return in_wedge_dir(direction(v), center, width, eps)


def rotate(v, delta: float) -> np.ndarray:
    c, s = math.cos(delta), math.sin(delta)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def min_enclosing_arc(dirs: Iterable[float]) -> tuple[float, float]:
    """Smallest closed arc holding every direction.

    Returns ``(width, center)``; the center is a witness wedge direction.
    """
    d = sorted(canon(a) for a in dirs)
    if not d:
        raise ValueError("min_enclosing_arc of an empty set")
    if len(d) == 1:
        return 0.0, d[0]
    best_gap, best_i = -1.0, 0
    for i in range(len(d)):
        nxt = d[(i + 1) % len(d)]
        gap = (nxt - d[i]) % TAU if i + 1 < len(d) else nxt + TAU - d[i]
        if gap > best_gap:
            best_gap, best_i = gap, i
    width = TAU - best_gap
    start = d[(best_i + 1) % len(d)]
    return width, canon(start + 0.5 * width)


def cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class Wedge:
    apex: tuple[float, float]
    center: float
    width: float

    def __post_init__(self):
        if not 0.0 < self.width < math.pi:
            raise ValueError("wedge width must lie in (0, pi)")

    def contains(self, p) -> bool:
        v = (p[0] - self.apex[0], p[1] - self.apex[1])
        if v == (0.0, 0.0):
            return True
        return in_wedge(v, self.center, self.width)


@dataclass
class Polygon2:
    """Closed polygon; ``indices`` ties vertices back to a point set when known."""

    vertices: np.ndarray
    indices: tuple[int, ...] | None = None

    def __len__(self):
        return len(self.vertices)

    @property
    def signed_area(self) -> float:
        return polygon_area(self.vertices)


def polygon_area(pts) -> float:
    p = np.asarray(pts, dtype=float)
    if len(p) < 3:
        return 0.0
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def convex_hull(points: Sequence, eps: float | None = None) -> Polygon2:
    """CCW convex hull keeping every input point that lies on the hull boundary."""
    pts = np.asarray(points, dtype=float)
    if eps is None:
        eps = eps_len(pts)
    order = sorted(range(len(pts)), key=lambda i: (pts[i, 0], pts[i, 1]))
    if len(order) < 3:
        raise DegenerateHull("need at least three points")

    def chain(idx):
        out: list[int] = []
        for i in idx:
            while len(out) >= 2 and cross(pts[out[-2]], pts[out[-1]], pts[i]) <= 0.0:
                out.pop()
            out.append(i)
        return out

    lower = chain(order)
    upper = chain(order[::-1])
    corners = lower[:-1] + upper[:-1]
    if len(corners) < 3 or abs(polygon_area(pts[corners])) <= eps * eps:
        raise DegenerateHull("points are collinear")

    # Re-insert points lying on hull edges (collinear boundary vertices).
    cset = set(corners)
    hull: list[int] = []
    for k, a in enumerate(corners):
        b = corners[(k + 1) % len(corners)]
        pa, pb = pts[a], pts[b]
        ab = pb - pa
        L2 = float(ab @ ab)
        on_edge = []
        for i in range(len(pts)):
            if i in cset:
                continue
            ap = pts[i] - pa
            t = float(ap @ ab) / L2
            if t <= 0.0 or t >= 1.0:
                continue
            dist = abs(ab[0] * ap[1] - ab[1] * ap[0]) / math.sqrt(L2)
            if dist <= eps:
                on_edge.append((t, i))
        hull.append(a)
        hull.extend(i for _, i in sorted(on_edge))
    # a point may sit on two edges only if duplicated; keep first occurrence
    seen: set[int] = set()
    uniq = [i for i in hull if not (i in seen or seen.add(i))]
    return Polygon2(pts[uniq], tuple(uniq))


def segment_distance(p, a, b) -> float:
    p, a, b = (np.asarray(x, dtype=float) for x in (p, a, b))
    ab = b - a
    L2 = float(ab @ ab)
    if L2 == 0.0:
        return float(np.linalg.norm(p - a))
    t = min(1.0, max(0.0, float((p - a) @ ab) / L2))
    return float(np.linalg.norm(p - (a + t * ab)))


def winding_number(p, poly) -> int:
    """Winding number of ``poly`` around ``p`` (any orientation, may self-touch)."""
    pts = np.asarray(poly, dtype=float)
    wn = 0
    px, py = float(p[0]), float(p[1])
    n = len(pts)
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        if y0 <= py:
            if y1 > py and (x1 - x0) * (py - y0) - (px - x0) * (y1 - y0) > 0:
                wn += 1
        elif y1 <= py and (x1 - x0) * (py - y0) - (px - x0) * (y1 - y0) < 0:
            wn -= 1
    return wn


def point_in_polygon(p, poly, eps: float | None = None) -> str:
    """Classify ``p`` as ``"inside"``, ``"boundary"`` or ``"outside"``."""
    pts = poly.vertices if isinstance(poly, Polygon2) else np.asarray(poly, dtype=float)
    if eps is None:
        eps = eps_len(pts)
    n = len(pts)
    for i in range(n):
        if segment_distance(p, pts[i], pts[(i + 1) % n]) <= eps:
            return "boundary"
    if n < 3:
        return "outside"
    return "inside" if winding_number(p, pts) != 0 else "outside"


def segments_cross(a, b, c, d, eps: float = 0.0) -> bool:
    """Segments ab and cd share a point other than a common endpoint.

    ``eps`` is a length: a vertex within ``eps`` of the other segment's
    interior counts as touching, and so as a crossing.
    """
    a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
    lab = float(np.linalg.norm(b - a))
    lcd = float(np.linalg.norm(d - c))
    if lab == 0.0 or lcd == 0.0:
        return False
    d1, d2 = cross(c, d, a) / lcd, cross(c, d, b) / lcd
    d3, d4 = cross(a, b, c) / lab, cross(a, b, d) / lab
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
        (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    ):
        return True
    ends_ab = (a, b)
    ends_cd = (c, d)
    for p, (s0, s1), other in ((a, ends_cd, ends_cd), (b, ends_cd, ends_cd),
                               (c, ends_ab, ends_ab), (d, ends_ab, ends_ab)):
        if any(np.linalg.norm(p - q) <= eps for q in other):
            continue
        if segment_distance(p, s0, s1) <= eps:
            return True
    return False
