"""Deterministic SVG figures: graphs with marked edges, envelopes, forests and nets.

A fixed stylesheet maps roles to colours: plain edges grey, ``P(beta)`` edges
red, upper envelopes purple, lower envelopes teal, the four quadrant forests
in four distinct colours and cut edges bold.  Coordinates are printed with
six decimals and elements are emitted in sorted order, so equal input gives
byte-identical output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

QUADRANT_COLORS = ("#d62728", "#1f77b4", "#2ca02c", "#ff7f0e")

STYLE = """
.face { fill: #eef2f7; stroke: #9aa5b1; stroke-width: 0.6; }
.edge { stroke: #9aa5b1; stroke-width: 1; }
.marked { stroke: #e4572e; stroke-width: 2.5; }
.upper { stroke: #7b2cbf; stroke-width: 3; fill: none; }
.lower { stroke: #1b998b; stroke-width: 3; fill: none; }
.ray { stroke: #9aa5b1; stroke-width: 1; stroke-dasharray: 4 3; }
.cut { stroke: #111111; stroke-width: 3; fill: none; }
.axis { stroke: #555555; stroke-width: 1; stroke-dasharray: 6 4; }
.vertex { fill: #333333; }
.source { fill: #e4572e; stroke: #111111; stroke-width: 1; }
""" + "".join(
    f".q{j} {{ stroke: {c}; stroke-width: 2.5; fill: none; }}\n" for j, c in enumerate(QUADRANT_COLORS)
)


@dataclass
class Scene:
    """What to draw.  ``kind`` is ``graph``, ``reach``, ``forest`` or ``layout``."""

    kind: str
    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    edges: list[tuple[int, int]] = field(default_factory=list)
    marked: list[tuple[int, int]] = field(default_factory=list)
    upper: list[int] = field(default_factory=list)
    lower: list[int] = field(default_factory=list)
    rays: list[tuple[int, float]] = field(default_factory=list)  # (origin, direction)
    forest: list[tuple[int, int, int]] = field(default_factory=list)  # (quadrant, child, parent)
    source: int | None = None
    faces: np.ndarray | None = None  # (m, 3, 2) placed triangles
    cuts: list[np.ndarray] = field(default_factory=list)  # polylines
    axes_at: tuple[float, float] | None = None


def graph_scene(g, marked=(), upper=(), lower=(), source=None, augmented=None) -> Scene:
    rays = []
    if augmented is not None:
        rays = [(r.origin, r.dir) for r in augmented.rays]
    kind = "reach" if marked or upper or lower else "graph"
    return Scene(kind, g.xy, [tuple(map(int, e)) for e in g.edges], sorted(marked), list(upper), list(lower),
                 rays, source=source)


def forest_scene(g, forest) -> Scene:
    return Scene("forest", g.xy, [tuple(map(int, e)) for e in g.edges], forest=forest.edges(),
                 source=forest.source)


def layout_scene(layout, triangles=None, cut_edges=(), axes_at=None) -> Scene:
    """Placed faces of a net, with both images of every cut edge drawn bold."""
    pts = layout.placed.reshape(-1, 2)
    cut = {(min(a, b), max(a, b)) for a, b in cut_edges}
    polys = []
    if triangles is not None:
        for f, tri in enumerate(triangles):
            for k in range(3):
                a, b = int(tri[k]), int(tri[(k + 1) % 3])
                if (min(a, b), max(a, b)) in cut:
                    polys.append(np.array([layout.placed[f, k], layout.placed[f, (k + 1) % 3]]))
    return Scene("layout", pts, faces=layout.placed, cuts=polys, axes_at=axes_at)


def _fmt(v: float) -> str:
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def to_svg(scene: Scene, width: int = 640) -> str:
    pts = np.asarray(scene.points, dtype=float).reshape(-1, 2)
    if len(pts):
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
    else:
        lo, hi, span = np.zeros(2), np.ones(2), 1.0
    pad = 0.08 * span
    ray_len = 0.12 * span
    scale = width / (span + 2 * pad)

    def xy(p):
        return _fmt((p[0] - lo[0] + pad) * scale), _fmt((hi[1] - p[1] + pad) * scale)

    w = _fmt((hi[0] - lo[0] + 2 * pad) * scale) if len(pts) else "1"
    h = _fmt((hi[1] - lo[1] + 2 * pad) * scale) if len(pts) else "1"
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{w}" height="{h}">',
        f"<style>{STYLE}</style>",
        f'<g class="{scene.kind}">',
    ]

    def line(a, b, cls):
        (x1, y1), (x2, y2) = xy(a), xy(b)
        out.append(f'<line class="{cls}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')

    def polyline(seq, cls):
        if len(seq) >= 2:
            coords = " ".join(",".join(xy(p)) for p in seq)
            out.append(f'<polyline class="{cls}" points="{coords}"/>')

    if scene.faces is not None:
        for tri in scene.faces:
            coords = " ".join(",".join(xy(p)) for p in tri)
            out.append(f'<polygon class="face" points="{coords}"/>')
    marked = {tuple(sorted(e)) for e in scene.marked}
    for i, j in sorted(scene.edges):
        line(pts[i], pts[j], "marked" if (min(i, j), max(i, j)) in marked else "edge")
    for v, d in sorted(scene.rays):
        line(pts[v], pts[v] + ray_len * np.array([math.cos(d), math.sin(d)]), "ray")
    polyline([pts[v] for v in scene.lower], "lower")
    polyline([pts[v] for v in scene.upper], "upper")
    for j, child, parent in sorted(scene.forest):
        line(pts[child], pts[parent], f"q{j}")
    for poly in scene.cuts:
        polyline(np.asarray(poly), "cut")
    if scene.axes_at is not None:
        o = np.asarray(scene.axes_at, dtype=float)
        for d in ((1, 0), (0, 1), (-1, 0), (0, -1)):
            line(o, o + 0.5 * span * np.array(d), "axis")
    if scene.kind != "layout":
        for k, p in enumerate(pts):
            x, y = xy(p)
            cls = "source" if k == scene.source else "vertex"
            r = "5" if k == scene.source else "2.5"
            out.append(f'<circle class="{cls}" cx="{x}" cy="{y}" r="{r}"/>')
    out += ["</g>", "</svg>"]
    return "\n".join(out) + "\n"


def render_svg(scene: Scene, path=None) -> str:
    """Render ``scene``; write it to ``path`` when given.  Returns the SVG text."""
    text = to_svg(scene)
    if path is not None:
        Path(path).write_text(text)
    return text
