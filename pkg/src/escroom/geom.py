"""Small 2D/3D geometry helpers shared by the navmesh pipeline.

Plan-view points are (x, z) pairs; polygons are CCW by positive shoelace
area in the (x, z) plane.
"""

from __future__ import annotations

import math

import numpy as np

Vec2 = tuple[float, float]
Vec3 = tuple[float, float, float]


def area2(a: Vec2, b: Vec2, c: Vec2) -> float:
    """Twice the signed area of triangle abc (positive = CCW)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def polygon_area(points: list[Vec2]) -> float:
    total = 0.0
    n = len(points)
    for i in range(n):
        x0, z0 = points[i]
        x1, z1 = points[(i + 1) % n]
        total += x0 * z1 - x1 * z0
    return 0.5 * total


def ensure_ccw(points: list) -> list:
    if polygon_area([(p[0], p[1]) if len(p) == 2 else (p[0], p[2]) for p in points]) < 0:
        return list(reversed(points))
    return list(points)


def is_convex(points: list[Vec2], eps: float = 1e-9) -> bool:
    """True for a CCW polygon whose corners never turn clockwise."""
    n = len(points)
    if n < 3:
        return False
    for i in range(n):
        if area2(points[i - 1], points[i], points[(i + 1) % n]) < -eps:
            return False
    return True


def point_in_convex(pt: Vec2, points: list[Vec2], tol: float = 1e-9) -> bool:
    """Point-in-CCW-convex-polygon with a distance tolerance on the boundary."""
    n = len(points)
    for i in range(n):
        ax, az = points[i]
        bx, bz = points[(i + 1) % n]
        ex, ez = bx - ax, bz - az
        cross = ex * (pt[1] - az) - ez * (pt[0] - ax)
        length = math.hypot(ex, ez)
        if length > 0 and cross < -tol * length:
            return False
    return True


def dist_point_segment(pt: Vec2, a: Vec2, b: Vec2) -> float:
    ax, az = a
    bx, bz = b
    dx, dz = bx - ax, bz - az
    denom = dx * dx + dz * dz
    if denom <= 0:
        return math.hypot(pt[0] - ax, pt[1] - az)
    t = ((pt[0] - ax) * dx + (pt[1] - az) * dz) / denom
    t = min(1.0, max(0.0, t))
    return math.hypot(pt[0] - (ax + t * dx), pt[1] - (az + t * dz))


def douglas_peucker(points: list, epsilon: float) -> list:
    """Simplify a polyline keeping both endpoints.

    Points may carry extra payload beyond (x, z); only the first two
    coordinates drive the distance test. Ties pick the lowest index, and a
    canonical orientation keeps the result identical under reversal.
    """
    if len(points) <= 2:
        return list(points)
    first = (points[0][0], points[0][1])
    last = (points[-1][0], points[-1][1])
    if last < first:
        return list(reversed(douglas_peucker(list(reversed(points)), epsilon)))

    keep = [0, len(points) - 1]
    stack = [(0, len(points) - 1)]
    while stack:
        i0, i1 = stack.pop()
        a = (points[i0][0], points[i0][1])
        b = (points[i1][0], points[i1][1])
        best = -1.0
        best_i = -1
        for i in range(i0 + 1, i1):
            d = dist_point_segment((points[i][0], points[i][1]), a, b)
            if d > best + 1e-12:
                best = d
                best_i = i
        if best > epsilon and best_i >= 0:
            keep.append(best_i)
            stack.append((i0, best_i))
            stack.append((best_i, i1))
    keep.sort()
    return [points[i] for i in keep]


def ear_clip(points: list[Vec2]) -> list[tuple[int, int, int]]:
    """Triangulate a simple CCW polygon; returns index triples into points.

    Collinear vertices are dropped without emitting degenerate triangles.
    """
    n = len(points)
    idx = list(range(n))
    tris: list[tuple[int, int, int]] = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10 * n + 100:
            raise ValueError("ear clipping failed to converge (non-simple polygon?)")
        clipped = False
        m = len(idx)
        for k in range(m):
            i_prev, i_cur, i_next = idx[k - 1], idx[k], idx[(k + 1) % m]
            a, b, c = points[i_prev], points[i_cur], points[i_next]
            cross = area2(a, b, c)
            if cross < -1e-12:
                continue  # reflex corner
            if abs(cross) <= 1e-12:
                idx.pop(k)  # collinear: remove without a triangle
                clipped = True
                break
            contains = False
            for j in idx:
                if j in (i_prev, i_cur, i_next):
                    continue
                p = points[j]
                if (
                    area2(a, b, p) > 1e-12
                    and area2(b, c, p) > 1e-12
                    and area2(c, a, p) > 1e-12
                ):
                    contains = True
                    break
            if contains:
                continue
            tris.append((i_prev, i_cur, i_next))
            idx.pop(k)
            clipped = True
            break
        if not clipped:
            # Numerically pinched polygon: clip the widest corner to progress.
            m = len(idx)
            k = max(range(m),
                    key=lambda k: area2(points[idx[k - 1]], points[idx[k]],
                                        points[idx[(k + 1) % m]]))
            tris.append((idx[k - 1], idx[k], idx[(k + 1) % m]))
            idx.pop(k)
    if len(idx) == 3:
        a, b, c = (points[i] for i in idx)
        if abs(area2(a, b, c)) > 1e-12:
            tris.append(tuple(idx))
    return tris


def merge_convex(points: list[Vec2], tris: list[tuple[int, ...]],
                 max_verts: int = 6,
                 heights: list[float] | None = None,
                 planar_tol: float = 1e-4) -> list[list[int]]:
    """Greedily merge triangles into convex polygons of at most max_verts.

    When heights are given, a merge is also rejected if the merged polygon
    would deviate from a fitted plane by more than planar_tol.
    """
    polys: list[list[int] | None] = [list(t) for t in tris]

    def edges_of(poly: list[int]):
        for i in range(len(poly)):
            yield poly[i], poly[(i + 1) % len(poly)]

    def planar(poly: list[int]) -> bool:
        if heights is None or len(poly) < 4:
            return True
        coords = np.array([[points[i][0], points[i][1], 1.0] for i in poly])
        ys = np.array([heights[i] for i in poly])
        sol, *_ = np.linalg.lstsq(coords, ys, rcond=None)
        return bool(np.max(np.abs(coords @ sol - ys)) <= planar_tol)

    changed = True
    while changed:
        changed = False
        edge_owner: dict[tuple[int, int], int] = {}
        for pi, poly in enumerate(polys):
            if poly is None:
                continue
            for a, b in edges_of(poly):
                edge_owner[(a, b)] = pi
        for pi in range(len(polys)):
            poly = polys[pi]
            if poly is None:
                continue
            merged_here = False
            for a, b in list(edges_of(poly)):
                qi = edge_owner.get((b, a))
                if qi is None or qi == pi or polys[qi] is None:
                    continue
                other = polys[qi]
                if len(poly) + len(other) - 2 > max_verts:
                    continue
                ia = poly.index(a)
                merged = poly[: ia + 1] + _chain_after(other, a, b) + poly[ia + 1:]
                pts = [points[i] for i in merged]
                if not is_convex(pts, eps=1e-9) or not planar(merged):
                    continue
                polys[pi] = merged
                polys[qi] = None
                changed = True
                merged_here = True
                break
            if merged_here:
                break
    return [p for p in polys if p is not None]


def _chain_after(poly: list[int], start: int, stop: int) -> list[int]:
    """Vertices of poly strictly between start and stop, walking forward."""
    i = poly.index(start)
    out = []
    while True:
        i = (i + 1) % len(poly)
        if poly[i] == stop:
            return out
        out.append(poly[i])


def fit_plane(points3: list[Vec3]) -> tuple[float, float, float]:
    """Least-squares plane y = a*x + b*z + c through 3D points."""
    arr = np.asarray(points3, dtype=float)
    coords = np.column_stack([arr[:, 0], arr[:, 2], np.ones(len(arr))])
    sol, *_ = np.linalg.lstsq(coords, arr[:, 1], rcond=None)
    return float(sol[0]), float(sol[1]), float(sol[2])


def clip_poly_axis(poly: list[Vec3], axis: int, value: float,
                   keep_below: bool) -> list[Vec3]:
    """Clip a 3D polygon against an axis-aligned plane (axis 0=x, 2=z)."""
    out: list[Vec3] = []
    n = len(poly)
    for i in range(n):
        cur = poly[i]
        nxt = poly[(i + 1) % n]
        c_in = (cur[axis] <= value) == keep_below or cur[axis] == value
        n_in = (nxt[axis] <= value) == keep_below or nxt[axis] == value
        if c_in:
            out.append(cur)
        if c_in != n_in:
            t = (value - cur[axis]) / (nxt[axis] - cur[axis])
            out.append(tuple(cur[k] + t * (nxt[k] - cur[k]) for k in range(3)))
    return out
