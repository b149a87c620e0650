"""Hot inner loops, in two interchangeable flavours.

Every kernel has a pure-numpy implementation (``*_np``) and, when numba is
importable, a ``@njit`` twin (``*_nb``).  The public names resolve to the
numba version unless ``ANGLEMONO_NUMBA=0``.  Both flavours must return
identical results; ``tests/test_kernels.py`` pins that.

Bitsets: a row of ``W`` uint64 words, bit ``k`` lives in word ``k >> 6`` at
position ``k & 63``.
"""
from __future__ import annotations

import math
from collections import deque

import numpy as np

from ._config import EPS_ANG, USE_NUMBA, HAVE_NUMBA

TAU = 2.0 * math.pi

# ---------------------------------------------------------------------------
# wedge masks (numpy only; cheap relative to propagation)
# ---------------------------------------------------------------------------


def wedge_masks(dirs: np.ndarray, betas: np.ndarray, width: float) -> np.ndarray:
    """Bit ``k`` of row ``d`` set iff direction ``dirs[d]`` lies in wedge ``(betas[k], width)``."""
    dirs = np.asarray(dirs, dtype=np.float64)
    betas = np.asarray(betas, dtype=np.float64)
    K = len(betas)
    W = max(1, (K + 63) // 64)
    dist = np.abs(np.mod(dirs[:, None] - betas[None, :] + math.pi, TAU) - math.pi)
    inside = dist <= 0.5 * width + EPS_ANG
    padded = np.zeros((len(dirs), W * 64), dtype=bool)
    padded[:, :K] = inside
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64).reshape(len(dirs), W)


def full_bits(K: int) -> np.ndarray:
    W = max(1, (K + 63) // 64)
    out = np.zeros(W, dtype=np.uint64)
    for k in range(K):
        out[k >> 6] |= np.uint64(1) << np.uint64(k & 63)
    return out


def lowest_bits(reach: np.ndarray) -> np.ndarray:
    """Index of the lowest set bit per row, ``-1`` for empty rows."""
    n, W = reach.shape
    out = np.full(n, -1, dtype=np.int64)
    nz = reach != 0
    has = nz.any(axis=1)
    first_word = np.argmax(nz, axis=1)
    words = reach[np.arange(n), first_word]
    low = words & (~words + np.uint64(1))
    with np.errstate(divide="ignore"):
        pos = np.where(has, np.log2(np.where(low == 0, 1, low).astype(np.float64)), 0)
    out[has] = (first_word[has] * 64 + np.rint(pos[has]).astype(np.int64))
    return out


def bit_is_set(row: np.ndarray, k: int) -> bool:
    return bool((int(row[k >> 6]) >> (k & 63)) & 1)


# ---------------------------------------------------------------------------
# reachability propagation over all wedge directions at once
# ---------------------------------------------------------------------------


def propagate_reach_np(offsets, heads, masks, source, full):
    n = len(offsets) - 1
    W = len(full)
    reach = np.zeros((n, W), dtype=np.uint64)
    reach[source] = full
    queue = deque([source])
    queued = np.zeros(n, dtype=bool)
    queued[source] = True
    while queue:
        u = queue.popleft()
        queued[u] = False
        lo, hi = offsets[u], offsets[u + 1]
        hv = heads[lo:hi]
        keep = hv >= 0
        hv = hv[keep]
        add = reach[u][None, :] & masks[lo:hi][keep]
        new = add & ~reach[hv]
        grew = new.any(axis=1)
        if not grew.any():
            continue
        reach[hv[grew]] |= new[grew]
        for v in hv[grew]:
            if not queued[v]:
                queued[v] = True
                queue.append(int(v))
    return reach


def backtrack_paths_np(offsets, heads, twins, masks, reach, source, targets, bits):
    n = len(offsets) - 1
    chunks = []
    path_off = np.zeros(len(targets) + 1, dtype=np.int64)
    for i, t in enumerate(targets):
        k = int(bits[i])
        if t == source:
            p = [source]
        elif k < 0:
            p = []
        else:
            w, b = k >> 6, np.uint64(k & 63)
            p = [int(t)]
            v = int(t)
            steps = 0
            while v != source and steps <= n:
                found = -1
                for d in range(offsets[v], offsets[v + 1]):
                    u = heads[d]
                    if u < 0:
                        continue
                    tw = twins[d]
                    if (masks[tw, w] >> b) & np.uint64(1) and (reach[u, w] >> b) & np.uint64(1):
                        found = int(u)
                        break
                if found < 0:
                    p = []
                    break
                p.append(found)
                v = found
                steps += 1
            p.reverse()
        chunks.append(p)
        path_off[i + 1] = path_off[i] + len(p)
    verts = np.array([v for p in chunks for v in p], dtype=np.int64)
    return path_off, verts


# ---------------------------------------------------------------------------
# per-path statistics: enclosing-arc width/center and length ratio
# ---------------------------------------------------------------------------


def path_stats_np(path_off, path_verts, xy):
    m = len(path_off) - 1
    widths = np.zeros(m)
    centers = np.zeros(m)
    lengths = np.zeros(m)
    chords = np.zeros(m)
    for i in range(m):
        p = path_verts[path_off[i]:path_off[i + 1]]
        if len(p) < 2:
            continue
        vec = xy[p[1:]] - xy[p[:-1]]
        lengths[i] = np.sqrt((vec ** 2).sum(axis=1)).sum()
        chords[i] = math.hypot(*(xy[p[-1]] - xy[p[0]]))
        d = np.sort(np.mod(np.arctan2(vec[:, 1], vec[:, 0]), TAU))
        gaps = np.empty(len(d))
        gaps[:-1] = d[1:] - d[:-1]
        gaps[-1] = d[0] + TAU - d[-1]
        j = int(np.argmax(gaps))
        widths[i] = TAU - gaps[j]
        start = d[(j + 1) % len(d)]
        centers[i] = math.fmod(start + 0.5 * widths[i], TAU)
    return widths, centers, lengths, chords


# ---------------------------------------------------------------------------
# segment crossings and triangle overlaps
# ---------------------------------------------------------------------------


def _seg_pair_cross(ax, ay, bx, by, cx, cy, dx, dy, eps):
    lab = math.hypot(bx - ax, by - ay)
    lcd = math.hypot(dx - cx, dy - cy)
    if lab == 0.0 or lcd == 0.0:
        return False
    d1 = ((dx - cx) * (ay - cy) - (dy - cy) * (ax - cx)) / lcd
    d2 = ((dx - cx) * (by - cy) - (dy - cy) * (bx - cx)) / lcd
    d3 = ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax)) / lab
    d4 = ((bx - ax) * (dy - ay) - (by - ay) * (dx - ax)) / lab
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
        (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    ):
        return True
    return False


def _point_on_open_segment(px, py, ax, ay, bx, by, eps):
    if math.hypot(px - ax, py - ay) <= eps or math.hypot(px - bx, py - by) <= eps:
        return False
    ux, uy = bx - ax, by - ay
    L2 = ux * ux + uy * uy
    t = ((px - ax) * ux + (py - ay) * uy) / L2
    if t <= 0.0 or t >= 1.0:
        return False
    qx, qy = ax + t * ux, ay + t * uy
    return math.hypot(px - qx, py - qy) <= eps


def edge_crossings_np(xy, edges, eps):
    """Pairs ``(i, j)``, ``i < j``, of edges that cross or touch away from shared endpoints."""
    m = len(edges)
    if m < 2:
        return np.zeros((0, 2), dtype=np.int64)
    a = xy[edges[:, 0]]
    b = xy[edges[:, 1]]
    lo = np.minimum(a, b) - eps
    hi = np.maximum(a, b) + eps
    out = []
    for i in range(m - 1):
        j = np.arange(i + 1, m)
        ov = (lo[j, 0] <= hi[i, 0]) & (lo[i, 0] <= hi[j, 0]) & (lo[j, 1] <= hi[i, 1]) & (lo[i, 1] <= hi[j, 1])
        for jj in j[ov]:
            if _edges_conflict(xy, edges, i, int(jj), eps):
                out.append((i, int(jj)))
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def _edges_conflict(xy, edges, i, j, eps):
    p, q = edges[i]
    r, s = edges[j]
    ax, ay = xy[p]
    bx, by = xy[q]
    cx, cy = xy[r]
    dx, dy = xy[s]
    shared = (p == r) or (p == s) or (q == r) or (q == s)
    if not shared and _seg_pair_cross(ax, ay, bx, by, cx, cy, dx, dy, eps):
        return True
    if p != r and p != s and _point_on_open_segment(ax, ay, cx, cy, dx, dy, eps):
        return True
    if q != r and q != s and _point_on_open_segment(bx, by, cx, cy, dx, dy, eps):
        return True
    if r != p and r != q and _point_on_open_segment(cx, cy, ax, ay, bx, by, eps):
        return True
    if s != p and s != q and _point_on_open_segment(dx, dy, ax, ay, bx, by, eps):
        return True
    return False


def _tri_separated(t1, t2, eps):
    for tri in (t1, t2):
        for e in range(3):
            x0, y0 = tri[e, 0], tri[e, 1]
            x1, y1 = tri[(e + 1) % 3, 0], tri[(e + 1) % 3, 1]
            nx, ny = y1 - y0, x0 - x1
            L = math.hypot(nx, ny)
            if L == 0.0:
                continue
            nx /= L
            ny /= L
            amin = amax = t1[0, 0] * nx + t1[0, 1] * ny
            for k in range(1, 3):
                v = t1[k, 0] * nx + t1[k, 1] * ny
                amin = min(amin, v)
                amax = max(amax, v)
            bmin = bmax = t2[0, 0] * nx + t2[0, 1] * ny
            for k in range(1, 3):
                v = t2[k, 0] * nx + t2[k, 1] * ny
                bmin = min(bmin, v)
                bmax = max(bmax, v)
            if amax <= bmin + eps or bmax <= amin + eps:
                return True
    return False


def triangle_overlaps_np(tris, eps):
    """Pairs of placed triangles whose open interiors intersect by more than ``eps``."""
    F = len(tris)
    lo = tris.min(axis=1)
    hi = tris.max(axis=1)
    out = []
    for i in range(F - 1):
        j = np.arange(i + 1, F)
        ov = (lo[j, 0] < hi[i, 0] - eps) & (lo[i, 0] < hi[j, 0] - eps) & \
             (lo[j, 1] < hi[i, 1] - eps) & (lo[i, 1] < hi[j, 1] - eps)
        for jj in j[ov]:
            if not _tri_separated(tris[i], tris[jj], eps):
                out.append((i, int(jj)))
    return np.array(out, dtype=np.int64).reshape(-1, 2)


# ---------------------------------------------------------------------------
# numba twins
# ---------------------------------------------------------------------------

propagate_reach_nb = backtrack_paths_nb = path_stats_nb = None
edge_crossings_nb = triangle_overlaps_nb = None

if HAVE_NUMBA:
    from numba import njit

    _JIT = dict(cache=True, nogil=True)

    @njit(**_JIT)
    def propagate_reach_nb(offsets, heads, masks, source, full):
        n = offsets.shape[0] - 1
        W = full.shape[0]
        reach = np.zeros((n, W), dtype=np.uint64)
        for w in range(W):
            reach[source, w] = full[w]
        queue = np.empty(n, dtype=np.int64)
        queued = np.zeros(n, dtype=np.bool_)
        front = 0
        size = 1
        queue[0] = source
        queued[source] = True
        while size > 0:
            u = queue[front]
            front = (front + 1) % n
            size -= 1
            queued[u] = False
            for d in range(offsets[u], offsets[u + 1]):
                v = heads[d]
                if v < 0:
                    continue
                grew = False
                for w in range(W):
                    add = reach[u, w] & masks[d, w]
                    if (add & ~reach[v, w]) != 0:
                        reach[v, w] |= add
                        grew = True
                if grew and not queued[v]:
                    queue[(front + size) % n] = v
                    size += 1
                    queued[v] = True
        return reach

    @njit(**_JIT)
    def backtrack_paths_nb(offsets, heads, twins, masks, reach, source, targets, bits):
        n = offsets.shape[0] - 1
        T = targets.shape[0]
        path_off = np.zeros(T + 1, dtype=np.int64)
        buf = np.empty(T * (n + 1), dtype=np.int64)
        tmp = np.empty(n + 1, dtype=np.int64)
        one = np.uint64(1)
        pos = 0
        for i in range(T):
            t = targets[i]
            k = bits[i]
            if t == source:
                buf[pos] = source
                pos += 1
            elif k >= 0:
                w = k >> 6
                b = np.uint64(k & 63)
                length = 0
                tmp[length] = t
                length += 1
                v = t
                ok = True
                steps = 0
                while v != source:
                    found = -1
                    for d in range(offsets[v], offsets[v + 1]):
                        u = heads[d]
                        if u < 0:
                            continue
                        tw = twins[d]
                        if ((masks[tw, w] >> b) & one) != 0 and ((reach[u, w] >> b) & one) != 0:
                            found = u
                            break
                    steps += 1
                    if found < 0 or steps > n:
                        ok = False
                        break
                    tmp[length] = found
                    length += 1
                    v = found
                if ok:
                    for j in range(length):
                        buf[pos + j] = tmp[length - 1 - j]
                    pos += length
            path_off[i + 1] = pos
        return path_off, buf[:pos].copy()

    @njit(**_JIT)
    def path_stats_nb(path_off, path_verts, xy):
        m = path_off.shape[0] - 1
        widths = np.zeros(m)
        centers = np.zeros(m)
        lengths = np.zeros(m)
        chords = np.zeros(m)
        tau = 2.0 * np.pi
        for i in range(m):
            lo = path_off[i]
            hi = path_off[i + 1]
            k = hi - lo - 1
            if k < 1:
                continue
            d = np.empty(k)
            total = 0.0
            for j in range(k):
                a = path_verts[lo + j]
                b = path_verts[lo + j + 1]
                vx = xy[b, 0] - xy[a, 0]
                vy = xy[b, 1] - xy[a, 1]
                total += np.sqrt(vx * vx + vy * vy)
                ang = np.arctan2(vy, vx) % tau
                d[j] = ang
            lengths[i] = total
            s = path_verts[lo]
            t = path_verts[hi - 1]
            chords[i] = np.sqrt((xy[t, 0] - xy[s, 0]) ** 2 + (xy[t, 1] - xy[s, 1]) ** 2)
            d = np.sort(d)
            best = -1.0
            bj = 0
            for j in range(k):
                if j + 1 < k:
                    gap = d[j + 1] - d[j]
                else:
                    gap = d[0] + tau - d[j]
                if gap > best:
                    best = gap
                    bj = j
            widths[i] = tau - best
            start = d[(bj + 1) % k]
            centers[i] = np.fmod(start + 0.5 * widths[i], tau)
        return widths, centers, lengths, chords

    @njit(**_JIT)
    def _seg_pair_cross_nb(ax, ay, bx, by, cx, cy, dx, dy, eps):
        lab = np.hypot(bx - ax, by - ay)
        lcd = np.hypot(dx - cx, dy - cy)
        if lab == 0.0 or lcd == 0.0:
            return False
        d1 = ((dx - cx) * (ay - cy) - (dy - cy) * (ax - cx)) / lcd
        d2 = ((dx - cx) * (by - cy) - (dy - cy) * (bx - cx)) / lcd
        d3 = ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax)) / lab
        d4 = ((bx - ax) * (dy - ay) - (by - ay) * (dx - ax)) / lab
        return ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
            (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps))

    @njit(**_JIT)
    def _point_on_open_segment_nb(px, py, ax, ay, bx, by, eps):
        if np.hypot(px - ax, py - ay) <= eps or np.hypot(px - bx, py - by) <= eps:
            return False
        ux = bx - ax
        uy = by - ay
        L2 = ux * ux + uy * uy
        t = ((px - ax) * ux + (py - ay) * uy) / L2
        if t <= 0.0 or t >= 1.0:
            return False
        return np.hypot(px - (ax + t * ux), py - (ay + t * uy)) <= eps

    @njit(**_JIT)
    def edge_crossings_nb(xy, edges, eps):
        m = edges.shape[0]
        out = np.empty((max(m, 1) * 4, 2), dtype=np.int64)
        cnt = 0
        for i in range(m - 1):
            p = edges[i, 0]
            q = edges[i, 1]
            ax, ay, bx, by = xy[p, 0], xy[p, 1], xy[q, 0], xy[q, 1]
            for j in range(i + 1, m):
                r = edges[j, 0]
                s = edges[j, 1]
                cx, cy, dx, dy = xy[r, 0], xy[r, 1], xy[s, 0], xy[s, 1]
                if max(cx, dx) < min(ax, bx) - eps or max(ax, bx) < min(cx, dx) - eps:
                    continue
                if max(cy, dy) < min(ay, by) - eps or max(ay, by) < min(cy, dy) - eps:
                    continue
                shared = p == r or p == s or q == r or q == s
                hit = False
                if not shared and _seg_pair_cross_nb(ax, ay, bx, by, cx, cy, dx, dy, eps):
                    hit = True
                elif p != r and p != s and _point_on_open_segment_nb(ax, ay, cx, cy, dx, dy, eps):
                    hit = True
                elif q != r and q != s and _point_on_open_segment_nb(bx, by, cx, cy, dx, dy, eps):
                    hit = True
                elif r != p and r != q and _point_on_open_segment_nb(cx, cy, ax, ay, bx, by, eps):
                    hit = True
                elif s != p and s != q and _point_on_open_segment_nb(dx, dy, ax, ay, bx, by, eps):
                    hit = True
                if hit:
                    if cnt == out.shape[0]:
                        grown = np.empty((2 * cnt, 2), dtype=np.int64)
                        grown[:cnt] = out
                        out = grown
                    out[cnt, 0] = i
                    out[cnt, 1] = j
                    cnt += 1
        return out[:cnt].copy()

    @njit(**_JIT)
    def _tri_separated_nb(t1, t2, eps):
        for which in range(2):
            tri = t1 if which == 0 else t2
            for e in range(3):
                x0 = tri[e, 0]
                y0 = tri[e, 1]
                x1 = tri[(e + 1) % 3, 0]
                y1 = tri[(e + 1) % 3, 1]
                nx = y1 - y0
                ny = x0 - x1
                L = np.hypot(nx, ny)
                if L == 0.0:
                    continue
                nx /= L
                ny /= L
                amin = np.inf
                amax = -np.inf
                bmin = np.inf
                bmax = -np.inf
                for k in range(3):
                    va = t1[k, 0] * nx + t1[k, 1] * ny
                    vb = t2[k, 0] * nx + t2[k, 1] * ny
                    amin = min(amin, va)
                    amax = max(amax, va)
                    bmin = min(bmin, vb)
                    bmax = max(bmax, vb)
                if amax <= bmin + eps or bmax <= amin + eps:
                    return True
        return False

    @njit(**_JIT)
    def triangle_overlaps_nb(tris, eps):
        F = tris.shape[0]
        out = np.empty((max(F, 1), 2), dtype=np.int64)
        cnt = 0
        for i in range(F - 1):
            lo0 = min(tris[i, 0, 0], min(tris[i, 1, 0], tris[i, 2, 0]))
            hi0 = max(tris[i, 0, 0], max(tris[i, 1, 0], tris[i, 2, 0]))
            lo1 = min(tris[i, 0, 1], min(tris[i, 1, 1], tris[i, 2, 1]))
            hi1 = max(tris[i, 0, 1], max(tris[i, 1, 1], tris[i, 2, 1]))
            for j in range(i + 1, F):
                jlo0 = min(tris[j, 0, 0], min(tris[j, 1, 0], tris[j, 2, 0]))
                jhi0 = max(tris[j, 0, 0], max(tris[j, 1, 0], tris[j, 2, 0]))
                jlo1 = min(tris[j, 0, 1], min(tris[j, 1, 1], tris[j, 2, 1]))
                jhi1 = max(tris[j, 0, 1], max(tris[j, 1, 1], tris[j, 2, 1]))
                if not (jlo0 < hi0 - eps and lo0 < jhi0 - eps and jlo1 < hi1 - eps and lo1 < jhi1 - eps):
                    continue
                if not _tri_separated_nb(tris[i], tris[j], eps):
                    if cnt == out.shape[0]:
                        grown = np.empty((2 * cnt, 2), dtype=np.int64)
                        grown[:cnt] = out
                        out = grown
                    out[cnt, 0] = i
                    out[cnt, 1] = j
                    cnt += 1
        return out[:cnt].copy()


def _pick(name):
    nb = globals()[name + "_nb"]
    return nb if (USE_NUMBA and nb is not None) else globals()[name + "_np"]


propagate_reach = _pick("propagate_reach")
backtrack_paths = _pick("backtrack_paths")
path_stats = _pick("path_stats")
edge_crossings = _pick("edge_crossings")
triangle_overlaps = _pick("triangle_overlaps")

BACKEND = "numba" if (USE_NUMBA and propagate_reach_nb is not None) else "numpy"
