"""Triangle rasterization into a column/span field plus walkability filters.

Spans keep float y extents; the cell height only acts as a merge tolerance
so flat floors keep their exact elevation instead of snapping to a grid.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from ..errors import NoWalkableSurface
from ..geom import Vec3, clip_poly_axis
from .params import AgentParams, BakeSettings

log = logging.getLogger("escroom.navmesh")

# Neighbour order mirrors the contour walk: W, N(+z), E, S(-z).
DIRS = ((-1, 0), (0, 1), (1, 0), (0, -1))


@dataclass
class Span:
    ymin: float
    ymax: float
    walkable: bool


@dataclass
class VoxelField:
    origin: tuple[float, float, float]
    cell_size: float
    width: int
    depth: int
    columns: list[list[Span]] = field(default_factory=list)

    def column(self, ix: int, iz: int) -> list[Span]:
        return self.columns[ix + iz * self.width]

    def in_bounds(self, ix: int, iz: int) -> bool:
        return 0 <= ix < self.width and 0 <= iz < self.depth

    def corner_x(self, ix: int) -> float:
        return self.origin[0] + ix * self.cell_size

    def corner_z(self, iz: int) -> float:
        return self.origin[2] + iz * self.cell_size

    def walkable_spans(self) -> list[tuple[int, int, int]]:
        """All walkable spans as (ix, iz, span_index), row-major order."""
        out = []
        for iz in range(self.depth):
            for ix in range(self.width):
                for si, span in enumerate(self.column(ix, iz)):
                    if span.walkable:
                        out.append((ix, iz, si))
        return out

    def ceiling(self, ix: int, iz: int, si: int) -> float:
        col = self.column(ix, iz)
        if si + 1 < len(col):
            return col[si + 1].ymin
        return math.inf


def rasterize(triangles: list[tuple[Vec3, Vec3, Vec3]],
              params: AgentParams,
              settings: BakeSettings) -> VoxelField:
    """Bin triangles into vertical spans; marks slope-walkable top surfaces."""
    cs = settings.cell_size
    ch = settings.cell_height
    cos_slope = math.cos(math.radians(params.max_slope_deg))

    xs = [v[0] for tri in triangles for v in tri]
    ys = [v[1] for tri in triangles for v in tri]
    zs = [v[2] for tri in triangles for v in tri]
    if not xs:
        raise NoWalkableSurface("no triangles to rasterize")
    origin = (min(xs), min(ys), min(zs))
    width = max(1, math.ceil((max(xs) - origin[0]) / cs - 1e-9))
    depth = max(1, math.ceil((max(zs) - origin[2]) / cs - 1e-9))

    field = VoxelField(origin, cs, width, depth,
                       [[] for _ in range(width * depth)])

    degenerate = 0
    for tri in triangles:
        a, b, c = tri
        ux, uy, uz = b[0] - a[0], b[1] - a[1], b[2] - a[2]
        vx, vy, vz = c[0] - a[0], c[1] - a[1], c[2] - a[2]
        nx = uy * vz - uz * vy
        ny = uz * vx - ux * vz
        nz = ux * vy - uy * vx
        norm = math.sqrt(nx * nx + ny * ny + nz * nz)
        if norm < 1e-12:
            degenerate += 1
            continue
        walkable = abs(ny) / norm >= cos_slope and ny != 0
        _rasterize_tri(field, [a, b, c], walkable, ch)

    if degenerate:
        log.warning("skipped %d degenerate triangles during rasterization",
                    degenerate)

    for col in field.columns:
        col.sort(key=lambda s: s.ymin)
        _merge_spans(col, ch)
    return field


def _rasterize_tri(field: VoxelField, poly: list[Vec3], walkable: bool,
                   merge_tol: float) -> None:
    cs = field.cell_size
    ox, _, oz = field.origin
    z0 = max(0, int((min(p[2] for p in poly) - oz) / cs))
    z1 = min(field.depth - 1, int((max(p[2] for p in poly) - oz) / cs))
    for iz in range(z0, z1 + 1):
        row = clip_poly_axis(poly, 2, oz + iz * cs, keep_below=False)
        row = clip_poly_axis(row, 2, oz + (iz + 1) * cs, keep_below=True)
        if len(row) < 3:
            continue
        x0 = max(0, int((min(p[0] for p in row) - ox) / cs))
        x1 = min(field.width - 1, int((max(p[0] for p in row) - ox) / cs))
        for ix in range(x0, x1 + 1):
            cell = clip_poly_axis(row, 0, ox + ix * cs, keep_below=False)
            cell = clip_poly_axis(cell, 0, ox + (ix + 1) * cs, keep_below=True)
            if len(cell) < 3:
                continue
            ys = [p[1] for p in cell]
            field.column(ix, iz).append(Span(min(ys), max(ys), walkable))


def _merge_spans(col: list[Span], tol: float) -> None:
    i = 0
    while i + 1 < len(col):
        cur, nxt = col[i], col[i + 1]
        if nxt.ymin <= cur.ymax + tol:
            if abs(nxt.ymax - cur.ymax) <= tol:
                cur.walkable = cur.walkable or nxt.walkable
            elif nxt.ymax > cur.ymax:
                cur.walkable = nxt.walkable
            cur.ymax = max(cur.ymax, nxt.ymax)
            cur.ymin = min(cur.ymin, nxt.ymin)
            col.pop(i + 1)
        else:
            i += 1


def filter_low_clearance(field: VoxelField, params: AgentParams) -> None:
    """Clear walkability where the gap to the span above is too small."""
    for iz in range(field.depth):
        for ix in range(field.width):
            col = field.column(ix, iz)
            for si, span in enumerate(col):
                if not span.walkable:
                    continue
                if field.ceiling(ix, iz, si) - span.ymax < params.height:
                    span.walkable = False


def filter_ledges(field: VoxelField, params: AgentParams) -> None:
    """Clear walkability next to drops taller than the climb limit.

    Only in-bounds neighbours count: the field boundary is handled by
    erosion, so an open AABB edge is not treated as a cliff.
    """
    climb = params.max_climb
    height = params.height
    doomed: list[Span] = []
    for iz in range(field.depth):
        for ix in range(field.width):
            for si, span in enumerate(field.column(ix, iz)):
                if not span.walkable:
                    continue
                top = span.ymax
                for dx, dz in DIRS:
                    nx, nz = ix + dx, iz + dz
                    if not field.in_bounds(nx, nz):
                        continue
                    landing = _probe(field.column(nx, nz), top, height, climb)
                    if landing is _BLOCKED:
                        continue
                    if landing is None or top - landing > climb:
                        doomed.append(span)
                        break
    for span in doomed:
        span.walkable = False


_BLOCKED = object()


def _probe(col: list[Span], y: float, height: float, climb: float):
    """Landing height when stepping sideways into a column at level y.

    Returns _BLOCKED when solid geometry occupies the body space, None when
    there is nothing to land on, else the floor height.
    """
    for span in col:
        if span.ymin < y + height and span.ymax > y + climb:
            return _BLOCKED
    floors = [span.ymax for span in col if span.ymax <= y + climb]
    return max(floors) if floors else None


def span_connections(field: VoxelField, params: AgentParams
                     ) -> dict[tuple[int, int, int], list]:
    """4-neighbour links between walkable spans the agent can step across."""
    climb = params.max_climb
    height = params.height
    spans = field.walkable_spans()
    by_cell: dict[tuple[int, int], list[tuple[int, float, float]]] = {}
    for ix, iz, si in spans:
        span = field.column(ix, iz)[si]
        by_cell.setdefault((ix, iz), []).append(
            (si, span.ymax, field.ceiling(ix, iz, si)))

    conns: dict[tuple[int, int, int], list] = {}
    for ix, iz, si in spans:
        span = field.column(ix, iz)[si]
        ceil_a = field.ceiling(ix, iz, si)
        links = []
        for d, (dx, dz) in enumerate(DIRS):
            target = None
            for sj, top_b, ceil_b in by_cell.get((ix + dx, iz + dz), ()):
                if abs(top_b - span.ymax) > climb:
                    continue
                if min(ceil_a, ceil_b) - max(span.ymax, top_b) < height:
                    continue
                target = (ix + dx, iz + dz, sj)
                break
            links.append(target)
        conns[(ix, iz, si)] = links
    return conns


def erode(field: VoxelField, params: AgentParams,
          settings: BakeSettings) -> None:
    """Remove walkable spans within the agent radius of any boundary."""
    cells = max(0, math.ceil(params.radius / settings.cell_size - 1e-9))
    if cells == 0:
        return
    conns = span_connections(field, params)
    dist: dict[tuple[int, int, int], int] = {}
    frontier = []
    for key, links in conns.items():
        if any(link is None for link in links):
            dist[key] = 1
            frontier.append(key)
    level = 1
    while frontier and level < cells:
        nxt = []
        for key in frontier:
            for link in conns[key]:
                if link is not None and link not in dist:
                    dist[link] = level + 1
                    nxt.append(link)
        frontier = nxt
        level += 1
    for (ix, iz, si), d in dist.items():
        if d <= cells:
            field.column(ix, iz)[si].walkable = False


def flood_reachable(field: VoxelField, params: AgentParams,
                    start: tuple[int, int, int]) -> set[tuple[int, int, int]]:
    """Walkable spans reachable from start; an independent connectivity oracle."""
    conns = span_connections(field, params)
    if start not in conns:
        return set()
    seen = {start}
    frontier = [start]
    while frontier:
        key = frontier.pop()
        for link in conns[key]:
            if link is not None and link not in seen:
                seen.add(link)
                frontier.append(link)
    return seen
