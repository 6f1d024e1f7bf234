"""End-to-end bake: triangles in, convex-polygon navmesh out.

Stages: rasterize triangles into spans, filter by slope/clearance/ledges,
erode by agent radius, partition into monotone regions, trace and simplify
contours, convex-decompose, then weld shared vertices.
"""

from __future__ import annotations

from ..errors import NoWalkableSurface
from ..geom import Vec3, ear_clip, ensure_ccw, merge_convex, polygon_area
from .mesh import MAX_POLY_VERTS, NavMesh
from .params import AgentParams, BakeSettings
from .regions import build_regions, trace_contours
from .voxel import erode, filter_ledges, filter_low_clearance, rasterize


def bake_navmesh(triangles: list[tuple[Vec3, Vec3, Vec3]],
                 params: AgentParams | None = None,
                 settings: BakeSettings | None = None) -> NavMesh:
    params = params or AgentParams()
    settings = settings or BakeSettings()
    if not triangles:
        raise NoWalkableSurface("no input triangles")

    field = rasterize(triangles, params, settings)
    filter_low_clearance(field, params)
    filter_ledges(field, params)
    erode(field, params, settings)
    if not field.walkable_spans():
        raise NoWalkableSurface("no walkable area survives filtering")

    regions = build_regions(field, params)
    contours = trace_contours(field, params, settings, regions)
    if not contours:
        raise NoWalkableSurface("no region produced a usable outline")

    vertices: list[Vec3] = []
    vert_key: dict[tuple, int] = {}
    polygons: list[list[int]] = []
    poly_regions: list[int] = []

    def add_vertex(pt: Vec3) -> int:
        key = (round(pt[0], 9), round(pt[1], 9), round(pt[2], 9))
        idx = vert_key.get(key)
        if idx is None:
            idx = len(vertices)
            vertices.append(pt)
            vert_key[key] = idx
        return idx

    for contour in contours:
        pts3 = ensure_ccw(contour.points)
        pts2 = [(p[0], p[2]) for p in pts3]
        if abs(polygon_area(pts2)) <= 1e-9:
            continue
        tris = ear_clip(pts2)
        if not tris:
            continue
        heights = [p[1] for p in pts3]
        merged = merge_convex(pts2, tris, max_verts=MAX_POLY_VERTS,
                              heights=heights)
        for poly in merged:
            indices = [add_vertex((pts3[i][0], pts3[i][1], pts3[i][2]))
                       for i in poly]
            polygons.append(indices)
            poly_regions.append(contour.rid)

    if not polygons:
        raise NoWalkableSurface("polygonization yielded nothing")
    return NavMesh(vertices, polygons, poly_regions,
                   step_tolerance=params.max_climb)
