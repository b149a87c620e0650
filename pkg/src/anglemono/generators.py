"""Random non-obtuse triangulations for tests, sweeps and the CLI.

Families:

* square grids with a random diagonal per cell, on random column widths and
  row heights (every triangle is right-angled, so never obtuse);
* unit square grids with random diagonals (every edge at a multiple of 45deg);
* parallelogram and hexagonal patches of the equilateral lattice, with the
  interior vertices jittered.  Hull vertices stay on the lattice so the
  boundary remains convex.
"""
from __future__ import annotations

import math

import numpy as np

from .graph import PlaneGraph, validate

SQ3 = math.sqrt(3.0)


def rectilinear_grid(nx: int, ny: int, rng: np.random.Generator, spacing=(0.6, 1.4), diag45=False) -> PlaneGraph:
    """``(nx+1) x (ny+1)`` grid; ``diag45`` keeps unit spacing so diagonals sit at 45deg."""
    if diag45:
        xs = np.arange(nx + 1, dtype=float)
        ys = np.arange(ny + 1, dtype=float)
    else:
        xs = np.concatenate([[0.0], np.cumsum(rng.uniform(*spacing, size=nx))])
        ys = np.concatenate([[0.0], np.cumsum(rng.uniform(*spacing, size=ny))])
    idx = lambda i, j: j * (nx + 1) + i  # noqa: E731
    pts = [(x, y) for y in ys for x in xs]
    edges = []
    for j in range(ny + 1):
        for i in range(nx + 1):
            if i < nx:
                edges.append((idx(i, j), idx(i + 1, j)))
            if j < ny:
                edges.append((idx(i, j), idx(i, j + 1)))
            if i < nx and j < ny:
                if rng.random() < 0.5:
                    edges.append((idx(i, j), idx(i + 1, j + 1)))
                else:
                    edges.append((idx(i + 1, j), idx(i, j + 1)))
    return PlaneGraph(pts, edges)


def grid45(nx: int, ny: int, rng: np.random.Generator) -> PlaneGraph:
    return rectilinear_grid(nx, ny, rng, diag45=True)


def _jitter(pts: np.ndarray, movable: np.ndarray, amount: float, rng: np.random.Generator) -> np.ndarray:
    if amount <= 0:
        return pts
    out = pts.copy()
    k = int(movable.sum())
    r = amount * np.sqrt(rng.random(k))
    t = rng.uniform(0, 2 * math.pi, k)
    out[movable] += np.column_stack([r * np.cos(t), r * np.sin(t)])
    return out


def equilateral_parallelogram(cols: int, rows: int, rng: np.random.Generator | None = None,
                              jitter: float = 0.0) -> PlaneGraph:
    """``cols x rows`` lattice points spanned by unit vectors at 0deg and 60deg."""
    idx = lambda i, j: j * cols + i  # noqa: E731
    pts = np.array([(i + 0.5 * j, 0.5 * SQ3 * j) for j in range(rows) for i in range(cols)])
    edges = []
    for j in range(rows):
        for i in range(cols):
            if i + 1 < cols:
                edges.append((idx(i, j), idx(i + 1, j)))
            if j + 1 < rows:
                edges.append((idx(i, j), idx(i, j + 1)))
            if i + 1 < cols and j + 1 < rows:
                edges.append((idx(i + 1, j), idx(i, j + 1)))
    movable = np.array([0 < i < cols - 1 and 0 < j < rows - 1 for j in range(rows) for i in range(cols)])
    if rng is not None:
        pts = _jitter(pts, movable, jitter, rng)
    return PlaneGraph(pts, edges)


def hex_patch(k: int, rng: np.random.Generator | None = None, jitter: float = 0.0) -> PlaneGraph:
    """Equilateral lattice points within hexagonal distance ``k`` of the origin."""
    coords = [(q, r) for r in range(-k, k + 1) for q in range(-k, k + 1) if abs(q + r) <= k]
    index = {c: i for i, c in enumerate(coords)}
    pts = np.array([(q + 0.5 * r, 0.5 * SQ3 * r) for q, r in coords])
    edges = []
    for (q, r), i in index.items():
        for dq, dr in ((1, 0), (0, 1), (-1, 1)):
            j = index.get((q + dq, r + dr))
            if j is not None:
                edges.append((i, j))
    movable = np.array([max(abs(q), abs(r), abs(q + r)) < k for q, r in coords])
    if rng is not None:
        pts = _jitter(pts, movable, jitter, rng)
    return PlaneGraph(pts, edges)


def hex_patch_size(k: int) -> int:
    return 3 * k * (k + 1) + 1


def random_triangulation(rng: np.random.Generator, n_min: int = 20, n_max: int = 200,
                         jitter: float = 0.15, gamma: float = math.pi / 2) -> PlaneGraph:
    """A random non-obtuse triangulation with ``n_min..n_max`` vertices.

    Picks one of three families (random-spaced square grids with random
    diagonals, jittered equilateral parallelograms, jittered hexagons); the
    jitter is halved until the result validates at ``gamma``.
    """
    for _ in range(200):
        target = int(rng.integers(n_min, n_max + 1))
        family = int(rng.integers(3))
        if family == 0:
            nx = int(rng.integers(2, max(3, int(math.sqrt(target)) + 3)))
            ny = max(1, round(target / (nx + 1)) - 1)
            size = (nx + 1) * (ny + 1)
            build = lambda amount, nx=nx, ny=ny: rectilinear_grid(nx, ny, rng)  # noqa: E731
        elif family == 1:
            cols = int(rng.integers(3, max(4, int(math.sqrt(target)) + 3)))
            rows = max(3, round(target / cols))
            size = cols * rows
            build = lambda amount, c=cols, r=rows: equilateral_parallelogram(c, r, rng, amount)  # noqa: E731
        else:
            k = max(2, min(7, round((math.sqrt(12 * target - 3) - 3) / 6)))
            size = hex_patch_size(k)
            build = lambda amount, k=k: hex_patch(k, rng, amount)  # noqa: E731
        if not n_min <= size <= n_max:
            continue
        amount = jitter
        for _ in range(20):
            g = build(amount)
            if validate(g, gamma).ok:
                return g
            amount *= 0.5
    raise RuntimeError(f"could not generate a valid triangulation with {n_min}..{n_max} vertices")


def random_small_triangulation(rng: np.random.Generator, n_min: int = 6, n_max: int = 40) -> PlaneGraph:
    return random_triangulation(rng, n_min, n_max)
