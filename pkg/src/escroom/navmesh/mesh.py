"""Polygonal navigation mesh: structure, blockers, and movement clamping.

Polygons are convex, CCW in plan view, with at most six vertices each.
Adjacency is computed from overlapping collinear boundary segments, so an
edge may border several neighbours (T-junctions from carving are fine) and
meshes assembled from separately authored pieces still connect.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field

from shapely.geometry import LineString, Polygon as ShPolygon
from shapely.ops import split as sh_split, unary_union

from ..errors import NavMeshError, PrevOffMesh, UnknownBlocker
from ..geom import (Vec2, Vec3, area2, dist_point_segment, ear_clip,
                    ensure_ccw, fit_plane, is_convex, merge_convex,
                    point_in_convex, polygon_area)

MAX_POLY_VERTS = 6
_WELD = 9          # decimals used to weld vertices
_AREA_EPS = 1e-9   # slivers below this plan area are dropped


@dataclass(frozen=True)
class Portal:
    neighbor: int
    a: Vec3
    b: Vec3


@dataclass
class Hole:
    """Plan-view footprint to cut out of the mesh."""
    points: list[Vec2]
    source: str = ""


@dataclass
class Blocker:
    polys: frozenset[int]
    active: bool = False


@dataclass
class NavMesh:
    vertices: list[Vec3]
    polygons: list[list[int]]
    regions: list[int]
    step_tolerance: float = 0.3
    blockers: dict[str, Blocker] = dc_field(default_factory=dict)

    def __post_init__(self):
        self._rebuild()

    # -- construction ---------------------------------------------------

    @classmethod
    def from_polygons(cls, vertices: list[Vec3], polygons: list[list[int]],
                      regions: list[int] | None = None,
                      step_tolerance: float = 0.3) -> "NavMesh":
        """Build a mesh from explicit convex polygons; adjacency is derived."""
        verts = [tuple(float(c) for c in v) for v in vertices]
        polys = []
        for poly in polygons:
            if len(poly) < 3 or len(poly) > MAX_POLY_VERTS:
                raise NavMeshError(f"polygon with {len(poly)} vertices")
            pts2 = [(verts[i][0], verts[i][2]) for i in poly]
            if polygon_area(pts2) < 0:
                poly = list(reversed(poly))
                pts2.reverse()
            if not is_convex(pts2, eps=1e-7):
                raise NavMeshError("non-convex polygon in from_polygons")
            polys.append(list(poly))
        if regions is None:
            regions = [0] * len(polys)
        return cls(verts, polys, list(regions), step_tolerance)

    def _rebuild(self) -> None:
        self._poly2d = [[(self.vertices[i][0], self.vertices[i][2])
                         for i in poly] for poly in self.polygons]
        self._planes: list[tuple[float, float, float] | None] = \
            [None] * len(self.polygons)
        self._grid: dict[tuple[int, int], list[int]] = {}
        for pi, pts in enumerate(self._poly2d):
            xs = [p[0] for p in pts]
            zs = [p[1] for p in pts]
            for cx in range(math.floor(min(xs)), math.floor(max(xs)) + 1):
                for cz in range(math.floor(min(zs)), math.floor(max(zs)) + 1):
                    self._grid.setdefault((cx, cz), []).append(pi)
        self.adjacency = _build_adjacency(self.vertices, self.polygons,
                                          self.step_tolerance)
        self._refresh_blocked()

    def _refresh_blocked(self) -> None:
        counts = [0] * len(self.polygons)
        for blocker in self.blockers.values():
            if blocker.active:
                for pi in blocker.polys:
                    counts[pi] += 1
        self._blocked = counts

    # -- queries ----------------------------------------------------------

    def poly_points2(self, pi: int) -> list[Vec2]:
        return self._poly2d[pi]

    def is_active(self, pi: int) -> bool:
        return self._blocked[pi] == 0

    def plane(self, pi: int) -> tuple[float, float, float]:
        cached = self._planes[pi]
        if cached is None:
            cached = fit_plane([self.vertices[i] for i in self.polygons[pi]])
            self._planes[pi] = cached
        return cached

    def surface_y(self, pi: int, x: float, z: float) -> float:
        a, b, c = self.plane(pi)
        return a * x + b * z + c

    def area(self) -> float:
        return sum(polygon_area(pts) for pts in self._poly2d)

    def _candidates(self, x: float, z: float) -> list[int]:
        return self._grid.get((math.floor(x), math.floor(z)), [])

    def locate(self, point, tol: float = 1e-7,
               active_only: bool = True, scan: bool = False) -> int | None:
        """Polygon containing the plan-view point.

        A strict hit always beats a within-tolerance one (otherwise a
        sliver neighbour can capture boundary points), and the closest
        surface height breaks ties when the point carries one.
        """
        x, z = point[0], point[-1]
        y = point[1] if len(point) == 3 else None
        best = None
        best_margin = -math.inf
        best_dy = math.inf
        indices = range(len(self._poly2d)) if scan else self._candidates(x, z)
        for pi in indices:
            if active_only and not self.is_active(pi):
                continue
            margin = min(_containment_margin((x, z), self._poly2d[pi]), 0.0)
            if margin < -tol:
                continue
            dy = 0.0 if y is None else abs(self.surface_y(pi, x, z) - y)
            if margin > best_margin + 1e-12 or (
                    margin >= best_margin - 1e-12 and dy < best_dy - 1e-12):
                best, best_margin, best_dy = pi, margin, dy
        return best

    def nearest_active(self, point) -> tuple[int | None, Vec2]:
        """Closest active polygon and the nearest plan-view point inside it."""
        x, z = point[0], point[-1]
        pi = self.locate(point)
        if pi is not None:
            return pi, (x, z)
        best = None
        best_d = math.inf
        best_pt = (x, z)
        for pj, pts in enumerate(self._poly2d):
            if not self.is_active(pj):
                continue
            n = len(pts)
            for i in range(n):
                d = dist_point_segment((x, z), pts[i], pts[(i + 1) % n])
                if d < best_d - 1e-12:
                    best_d = d
                    best = pj
                    best_pt = _closest_on_segment((x, z), pts[i], pts[(i + 1) % n])
        return best, best_pt

    # -- blockers ---------------------------------------------------------

    def register_blocker(self, blocker_id: str, footprint: list[Vec2],
                         active: bool = False) -> None:
        """Cut the footprint outline into the mesh and remember which
        polygons it covers, so toggling later never reshapes geometry."""
        shape = ShPolygon(footprint)
        if not shape.is_valid:
            shape = shape.buffer(0)
        verts, polys, regions, mapping = _resurface(self, shape,
                                                    drop_inside=False)
        self._adopt(verts, polys, regions, mapping)
        covered = []
        for pi, pts in enumerate(self._poly2d):
            piece = ShPolygon(pts)
            if piece.intersection(shape).area >= piece.area - 1e-9:
                covered.append(pi)
        self.blockers[blocker_id] = Blocker(frozenset(covered), active)
        self._refresh_blocked()

    def set_blocker(self, blocker_id: str, active: bool) -> None:
        if blocker_id not in self.blockers:
            raise UnknownBlocker(blocker_id)
        if self.blockers[blocker_id].active != active:
            self.blockers[blocker_id].active = active
            self._refresh_blocked()

    def _adopt(self, verts, polys, regions, mapping) -> None:
        self.vertices = verts
        self.polygons = polys
        self.regions = regions
        self.blockers = {
            bid: Blocker(frozenset(np for op in blk.polys
                                   for np in mapping.get(op, [])), blk.active)
            for bid, blk in self.blockers.items()
        }
        self._rebuild()

    # -- carving ----------------------------------------------------------

    def carve_holes(self, holes: list[Hole]) -> "NavMesh":
        """New mesh with the hole footprints removed. An empty hole list
        returns self unchanged."""
        if not holes:
            return self
        shapes = []
        for hole in holes:
            shp = ShPolygon(hole.points)
            if not shp.is_valid:
                shp = shp.buffer(0)
            if shp.area > 0:
                shapes.append(shp)
        union = unary_union(shapes) if shapes else None
        if union is None or union.is_empty:
            return self
        verts, polys, regions, mapping = _resurface(self, union,
                                                    drop_inside=True)
        if not polys:
            raise NavMeshError("carving removed the entire mesh")
        out = NavMesh(verts, polys, regions, self.step_tolerance)
        out.blockers = {
            bid: Blocker(frozenset(np for op in blk.polys
                                   for np in mapping.get(op, [])), blk.active)
            for bid, blk in self.blockers.items()
        }
        out._refresh_blocked()
        return out

    # -- movement ---------------------------------------------------------

    def constrain_move(self, prev, desired) -> Vec3:
        """Clamp a straight move so the result stays on active polygons.

        The walk crosses shared portals while they are open and stops on
        the boundary otherwise; the returned point keeps the surface height
        of the polygon it lands on.
        """
        start = self._locate_tolerant(prev)
        if start is None:
            raise PrevOffMesh(tuple(prev))
        cur = (float(prev[0]), float(prev[-1]))
        goal = (float(desired[0]), float(desired[-1]))
        poly = start
        seen: set[tuple[int, float, float]] = set()
        for _ in range(4 * len(self.polygons) + 16):
            t, edge = _exit_edge(self._poly2d[poly], cur, goal)
            if edge is None:
                return (goal[0], self.surface_y(poly, *goal), goal[1])
            exit_pt = (cur[0] + t * (goal[0] - cur[0]),
                       cur[1] + t * (goal[1] - cur[1]))
            key = (poly, round(exit_pt[0], 9), round(exit_pt[1], 9))
            if key in seen:
                break
            seen.add(key)
            hop = None
            for portal in self.adjacency.get((poly, edge), ()):
                if not self.is_active(portal.neighbor):
                    continue
                pa = (portal.a[0], portal.a[2])
                pb = (portal.b[0], portal.b[2])
                if dist_point_segment(exit_pt, pa, pb) <= 1e-7:
                    hop = portal.neighbor
                    break
            if hop is None:
                return (exit_pt[0], self.surface_y(poly, *exit_pt), exit_pt[1])
            poly = hop
            cur = exit_pt
        return (cur[0], self.surface_y(poly, *cur), cur[1])

    def _locate_tolerant(self, point) -> int | None:
        pi = self.locate(point, tol=1e-3)
        if pi is not None:
            return pi
        # The cell grid can miss a point sitting just outside a polygon
        # near a cell border; fall back to a full scan before giving up.
        return self.locate(point, tol=1e-3, scan=True)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        adjacency = sorted(
            [pi, ei, portal.neighbor]
            for (pi, ei), portals in self.adjacency.items()
            for portal in portals
        )
        return {
            "version": 1,
            "vertices": [list(v) for v in self.vertices],
            "polygons": [list(p) for p in self.polygons],
            "adjacency": adjacency,
            "regions": list(self.regions),
            "blockers": {bid: sorted(blk.polys)
                         for bid, blk in sorted(self.blockers.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict | str) -> "NavMesh":
        if isinstance(data, str):
            data = json.loads(data)
        if data.get("version") != 1:
            raise NavMeshError(f"unsupported mesh version {data.get('version')!r}")
        mesh = cls.from_polygons([tuple(v) for v in data["vertices"]],
                                 [list(p) for p in data["polygons"]],
                                 list(data.get("regions") or []) or None)
        for bid, polys in (data.get("blockers") or {}).items():
            mesh.blockers[bid] = Blocker(frozenset(polys), False)
        mesh._refresh_blocked()
        return mesh


# -- module-level API mirroring the mesh methods --------------------------

def carve_holes(mesh: NavMesh, holes: list[Hole]) -> NavMesh:
    return mesh.carve_holes(holes)


def constrain_move(mesh: NavMesh, prev, desired) -> Vec3:
    return mesh.constrain_move(prev, desired)


def set_blocker(mesh: NavMesh, blocker_id: str, active: bool) -> None:
    mesh.set_blocker(blocker_id, active)


def register_blocker(mesh: NavMesh, blocker_id: str, footprint: list[Vec2],
                     active: bool = False) -> None:
    mesh.register_blocker(blocker_id, footprint, active)


# -- internals -------------------------------------------------------------

def _containment_margin(pt: Vec2, pts: list[Vec2]) -> float:
    """Signed distance from the point to the CCW polygon boundary.

    Positive inside, negative outside; degenerate edges are skipped.
    """
    margin = math.inf
    n = len(pts)
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        length = math.hypot(b[0] - a[0], b[1] - a[1])
        if length <= 1e-12:
            continue
        margin = min(margin, area2(a, b, pt) / length)
    return margin


def _closest_on_segment(pt: Vec2, a: Vec2, b: Vec2) -> Vec2:
    dx, dz = b[0] - a[0], b[1] - a[1]
    denom = dx * dx + dz * dz
    if denom <= 0:
        return a
    t = ((pt[0] - a[0]) * dx + (pt[1] - a[1]) * dz) / denom
    t = min(1.0, max(0.0, t))
    return (a[0] + t * dx, a[1] + t * dz)


def _exit_edge(pts: list[Vec2], cur: Vec2, goal: Vec2):
    """First edge the segment cur->goal leaves through, as (t, edge_index).

    Returns (1.0, None) when the goal stays inside. cur is assumed on or
    inside the polygon; tiny negative clearances are clamped.
    """
    t_best = 1.0
    edge = None
    n = len(pts)
    for i in range(n):
        ax, az = pts[i]
        bx, bz = pts[(i + 1) % n]
        ex, ez = bx - ax, bz - az
        scale = math.hypot(ex, ez)
        if scale <= 0:
            continue
        fa = ex * (cur[1] - az) - ez * (cur[0] - ax)
        fb = ex * (goal[1] - az) - ez * (goal[0] - ax)
        if fa < 0:
            fa = 0.0
        if fb >= -1e-12 * scale:
            continue
        t = fa / (fa - fb)
        if t < t_best:
            t_best = t
            edge = i
    return t_best, edge


def _build_adjacency(vertices, polygons, step_tolerance
                     ) -> dict[tuple[int, int], list[Portal]]:
    edges = []
    for pi, poly in enumerate(polygons):
        for ei in range(len(poly)):
            a = vertices[poly[ei]]
            b = vertices[poly[(ei + 1) % len(poly)]]
            edges.append((pi, ei, a, b))

    # Spatial hash of edge bounding boxes; exact collinearity test per pair.
    cell = 0.5
    buckets: dict[tuple[int, int], list[int]] = {}
    for k, (_, _, a, b) in enumerate(edges):
        x0, x1 = sorted((a[0], b[0]))
        z0, z1 = sorted((a[2], b[2]))
        for cx in range(math.floor(x0 / cell), math.floor(x1 / cell) + 1):
            for cz in range(math.floor(z0 / cell), math.floor(z1 / cell) + 1):
                buckets.setdefault((cx, cz), []).append(k)

    adjacency: dict[tuple[int, int], list[Portal]] = {}
    tested: set[tuple[int, int]] = set()
    for bucket in buckets.values():
        for ii in range(len(bucket)):
            for jj in range(ii + 1, len(bucket)):
                ki, kj = bucket[ii], bucket[jj]
                pair = (ki, kj) if ki < kj else (kj, ki)
                if pair in tested:
                    continue
                tested.add(pair)
                e1, e2 = edges[pair[0]], edges[pair[1]]
                if e1[0] == e2[0]:
                    continue
                portal = _edge_overlap(e1, e2, step_tolerance)
                if portal is None:
                    continue
                (a1, b1), (a2, b2) = portal
                adjacency.setdefault((e1[0], e1[1]), []).append(
                    Portal(e2[0], a1, b1))
                adjacency.setdefault((e2[0], e2[1]), []).append(
                    Portal(e1[0], a2, b2))
    for portals in adjacency.values():
        portals.sort(key=lambda p: p.neighbor)
    return adjacency


def _edge_overlap(e1, e2, step_tolerance, tol: float = 1e-6):
    """Overlap of two collinear plan-view edges, or None.

    Returns portal endpoints interpolated on each source edge so either
    side keeps its own surface height.
    """
    _, _, a1, b1 = e1
    _, _, a2, b2 = e2
    d1 = (b1[0] - a1[0], b1[2] - a1[2])
    len1 = math.hypot(*d1)
    if len1 <= tol:
        return None
    u = (d1[0] / len1, d1[1] / len1)
    # Both endpoints of e2 must sit on e1's carrier line.
    for p in (a2, b2):
        off = (p[0] - a1[0]) * -u[1] + (p[2] - a1[2]) * u[0]
        if abs(off) > tol:
            return None
    s_a2 = (a2[0] - a1[0]) * u[0] + (a2[2] - a1[2]) * u[1]
    s_b2 = (b2[0] - a1[0]) * u[0] + (b2[2] - a1[2]) * u[1]
    lo = max(0.0, min(s_a2, s_b2))
    hi = min(len1, max(s_a2, s_b2))
    if hi - lo <= tol:
        return None

    def on_e1(s: float) -> Vec3:
        t = s / len1
        return (a1[0] + t * (b1[0] - a1[0]), a1[1] + t * (b1[1] - a1[1]),
                a1[2] + t * (b1[2] - a1[2]))

    def on_e2(s: float) -> Vec3:
        denom = s_b2 - s_a2
        t = (s - s_a2) / denom
        return (a2[0] + t * (b2[0] - a2[0]), a2[1] + t * (b2[1] - a2[1]),
                a2[2] + t * (b2[2] - a2[2]))

    mid = 0.5 * (lo + hi)
    if abs(on_e1(mid)[1] - on_e2(mid)[1]) > step_tolerance:
        return None
    return (on_e1(lo), on_e1(hi)), (on_e2(lo), on_e2(hi))


def _iter_polygons(geom):
    if geom.is_empty:
        return
    if geom.geom_type == "Polygon":
        yield geom
    elif geom.geom_type in ("MultiPolygon", "GeometryCollection"):
        for part in geom.geoms:
            yield from _iter_polygons(part)


def _simple_pieces(sh_poly):
    """Split away interior rings with vertical cuts until pieces are simple."""
    stack = [sh_poly]
    out = []
    guard = 0
    while stack:
        guard += 1
        if guard > 10000:
            raise NavMeshError("ring splitting did not converge")
        g = stack.pop()
        if g.area <= _AREA_EPS:
            continue
        if not g.interiors:
            out.append(g)
            continue
        ring = g.interiors[0]
        cx = ring.centroid.x
        z0, z1 = g.bounds[1] - 1.0, g.bounds[3] + 1.0
        pieces = sh_split(g, LineString([(cx, z0), (cx, z1)]))
        for part in _iter_polygons(pieces):
            stack.append(part)
    return out


def _resurface(mesh: NavMesh, shape, drop_inside: bool):
    """Re-polygonize mesh polygons against a plan-view shape.

    With drop_inside the covered parts disappear (carving); otherwise the
    shape outline is merely cut in so covered parts become standalone
    polygons. Returns (vertices, polygons, regions, old->new mapping).
    """
    verts: list[Vec3] = []
    vert_key: dict[tuple, int] = {}
    polys: list[list[int]] = []
    regions: list[int] = []
    mapping: dict[int, list[int]] = {}

    def add_vertex(pt: Vec3) -> int:
        key = (round(pt[0], _WELD), round(pt[1], _WELD), round(pt[2], _WELD))
        idx = vert_key.get(key)
        if idx is None:
            idx = len(verts)
            verts.append((float(pt[0]), float(pt[1]), float(pt[2])))
            vert_key[key] = idx
        return idx

    def add_poly(indices: list[int], region: int) -> int:
        polys.append(indices)
        regions.append(region)
        return len(polys) - 1

    for pi, poly in enumerate(mesh.polygons):
        pts2 = mesh.poly_points2(pi)
        region = mesh.regions[pi]
        shp = ShPolygon(pts2)
        inter_area = shp.intersection(shape).area
        new_ids: list[int] = []
        if inter_area <= _AREA_EPS:
            new_ids.append(add_poly([add_vertex(mesh.vertices[i]) for i in poly],
                                    region))
            mapping[pi] = new_ids
            continue
        outside = shp.difference(shape)
        if drop_inside and outside.area <= _AREA_EPS:
            mapping[pi] = []
            continue
        parts = list(_iter_polygons(outside))
        if not drop_inside:
            parts.extend(_iter_polygons(shp.intersection(shape)))
        plane = mesh.plane(pi)
        for part in parts:
            for piece in _simple_pieces(part):
                new_ids.extend(
                    add_poly(p, region)
                    for p in _polygonize_piece(piece, plane, add_vertex))
        mapping[pi] = new_ids
    return verts, polys, regions, mapping


def _polygonize_piece(piece, plane, add_vertex) -> list[list[int]]:
    """Convex-decompose a simple shapely polygon onto the given plane."""
    coords = list(piece.exterior.coords)[:-1]
    pts: list[Vec2] = []
    for x, z in coords:
        if pts and math.hypot(x - pts[-1][0], z - pts[-1][1]) <= 1e-9:
            continue
        pts.append((x, z))
    if len(pts) >= 2 and math.hypot(pts[0][0] - pts[-1][0],
                                    pts[0][1] - pts[-1][1]) <= 1e-9:
        pts.pop()
    if len(pts) < 3:
        return []
    pts = ensure_ccw(pts)
    if abs(polygon_area(pts)) <= _AREA_EPS:
        return []
    tris = ear_clip(pts)
    if not tris:
        return []
    merged = merge_convex(pts, tris, max_verts=MAX_POLY_VERTS)
    a, b, c = plane
    out = []
    for poly in merged:
        indices = [add_vertex((pts[i][0], a * pts[i][0] + b * pts[i][1] + c,
                               pts[i][1])) for i in poly]
        out.append(indices)
    return out
