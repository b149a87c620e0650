"""Graph JSON and OFF mesh reading/writing.

Graph JSON::

    {"vertices": [[x, y], ...], "edges": [[i, j], ...]}

Writers emit one vertex or edge per line, edges sorted with ``i < j``, and
floats in shortest round-trip form, so output is stable and diffable.  They
also add the derived ``"hull"`` cycle and the exterior ``"rays"`` (origin,
direction in degrees) of the width-90deg augmentation; readers ignore both.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .graph import BadGraph, PlaneGraph, ValidationReport, augment, validate


class ParseError(ValueError):
    """Malformed input; the message names the line or element at fault."""


class InvalidGraph(ValueError):
    """Well-formed input describing a graph that fails validation."""

    def __init__(self, report: ValidationReport):
        super().__init__("; ".join(f"{k}: {d}" for k, d in report.violations[:5]))
        self.report = report


def _num(x) -> str:
    return json.dumps(float(x))


def graph_to_json(g: PlaneGraph, extra: dict | None = None, gamma: float = math.pi / 2) -> str:
    lines = ["{", '  "vertices": [']
    verts = [f"    [{_num(x)}, {_num(y)}]" for x, y in g.xy]
    lines.append(",\n".join(verts))
    lines.append("  ],")
    lines.append('  "edges": [')
    lines.append(",\n".join(f"    [{int(i)}, {int(j)}]" for i, j in g.edges))
    lines.append("  ],")
    lines.append(f'  "hull": {json.dumps([int(v) for v in g.hull])},')
    rays = augment(g, gamma).rays if g.hull else []
    lines.append('  "rays": [' + ", ".join(f"[{r.origin}, {_num(round(math.degrees(r.dir), 12))}]" for r in rays)
                 + "]" + ("," if extra else ""))
    if extra:
        body = json.dumps(extra, indent=2, sort_keys=True)
        lines.append(body[1:-1].strip("\n"))
    lines.append("}")
    return "\n".join(line for line in lines if line != "") + "\n"


def write_graph(g: PlaneGraph, path, extra: dict | None = None) -> None:
    Path(path).write_text(graph_to_json(g, extra))


def graph_from_json(text: str, source: str = "<string>") -> PlaneGraph:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(obj, dict):
        raise ParseError(f"{source}: top level must be an object")
    for key in ("vertices", "edges"):
        if key not in obj or not isinstance(obj[key], list):
            raise ParseError(f"{source}: missing list '{key}'")
    verts = []
    for k, v in enumerate(obj["vertices"]):
        if not (isinstance(v, list) and len(v) == 2 and all(isinstance(c, (int, float)) for c in v)):
            raise ParseError(f"{source}: vertices[{k}] must be [x, y]")
        if not all(math.isfinite(c) for c in v):
            raise ParseError(f"{source}: vertices[{k}] is not finite")
        verts.append((float(v[0]), float(v[1])))
    edges = []
    seen: dict[tuple[int, int], int] = {}
    for k, e in enumerate(obj["edges"]):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(c, int) for c in e)):
            raise ParseError(f"{source}: edges[{k}] must be [i, j] with integer indices")
        key = (min(e), max(e))
        if key in seen:
            raise ParseError(f"{source}: edges[{k}] duplicates edges[{seen[key]}] {list(key)}")
        seen[key] = k
        if not all(0 <= c < len(verts) for c in e):
            raise ParseError(f"{source}: edges[{k}] references a missing vertex")
        if e[0] == e[1]:
            raise ParseError(f"{source}: edges[{k}] is a self loop")
        edges.append(tuple(e))
    try:
        return PlaneGraph(np.array(verts, dtype=float).reshape(-1, 2), edges)
    except BadGraph as e:
        raise ParseError(f"{source}: {e}") from None


def parse_graph(path, gamma: float | None = math.pi / 2) -> PlaneGraph:
    """Read and (unless ``gamma`` is None) validate a graph JSON file."""
    p = Path(path)
    g = graph_from_json(p.read_text(), str(p))
    if gamma is not None:
        rep = validate(g, gamma)
        if not rep.ok:
            raise InvalidGraph(rep)
    return g


def off_text(vertices, triangles) -> str:
    v = np.asarray(vertices, dtype=float)
    t = np.asarray(triangles, dtype=np.int64)
    out = ["OFF", f"{len(v)} {len(t)} 0"]
    out += [" ".join(_num(c) for c in row) for row in v]
    out += ["3 " + " ".join(str(int(i)) for i in row) for row in t]
    return "\n".join(out) + "\n"


def write_off(cap, path) -> None:
    Path(path).write_text(off_text(cap.vertices, cap.triangles))


def read_off(path):
    """Triangle mesh from an OFF file, as a :class:`~anglemono.cap.ConvexCap`."""
    from .cap import ConvexCap

    p = Path(path)
    rows = []
    for lineno, raw in enumerate(p.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows or rows[0][1][0] != "OFF":
        raise ParseError(f"{p}:1: missing OFF header")
    # counts may share the header line ("OFF 4 2 0") or follow it
    if len(rows[0][1]) > 1:
        counts, body = rows[0][1][1:], rows[1:]
    elif len(rows) > 1:
        counts, body = rows[1][1], rows[2:]
    else:
        raise ParseError(f"{p}: missing count line")
    try:
        nv, nf = int(counts[0]), int(counts[1])
    except (IndexError, ValueError):
        raise ParseError(f"{p}: bad count line") from None
    if len(body) < nv + nf:
        raise ParseError(f"{p}: expected {nv} vertices and {nf} faces")
    verts, faces = [], []
    for lineno, tok in body[:nv]:
        try:
            xyz = [float(t) for t in tok[:3]]
        except ValueError:
            raise ParseError(f"{p}:{lineno}: bad vertex") from None
        if len(xyz) != 3:
            raise ParseError(f"{p}:{lineno}: vertex needs three coordinates")
        verts.append(xyz)
    for lineno, tok in body[nv:nv + nf]:
        try:
            ids = [int(t) for t in tok]
        except ValueError:
            raise ParseError(f"{p}:{lineno}: bad face") from None
        if ids[0] != 3 or len(ids) < 4:
            raise ParseError(f"{p}:{lineno}: only triangles are supported")
        faces.append(ids[1:4])
    return ConvexCap.from_mesh(np.array(verts), np.array(faces))
