"""Region partitioning and contour extraction over the walkable span field.

Regions are built monotone along z (one run of cells per row) so each
region is simply connected and its outline never self-intersects. Contours
walk the unit-cell boundary and are simplified per neighbour chain so both
sides of a shared border simplify to identical vertices.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..geom import douglas_peucker
from .params import AgentParams, BakeSettings
from .voxel import DIRS, VoxelField, span_connections

SpanKey = tuple[int, int, int]


@dataclass
class Region:
    rid: int
    spans: dict[tuple[int, int], SpanKey]  # (ix, iz) -> span key


def build_regions(field: VoxelField, params: AgentParams) -> list[Region]:
    conns = span_connections(field, params)
    region_of: dict[SpanKey, int] = {}
    regions: list[Region] = []

    for iz in range(field.depth):
        # Runs of left-right connected spans in this row.
        runs: list[list[SpanKey]] = []
        for ix in range(field.width):
            for si, span in enumerate(field.column(ix, iz)):
                if not span.walkable:
                    continue
                key = (ix, iz, si)
                if key not in conns:
                    continue
                west = conns[key][0]
                if runs and west is not None and runs[-1] and runs[-1][-1] == west:
                    runs[-1].append(key)
                else:
                    runs.append([key])

        # Count how many cells in this row connect down into each region.
        row_counts: Counter[int] = Counter()
        run_links: list[list[int]] = []
        for run in runs:
            links = []
            for key in run:
                south = conns[key][3]
                if south is not None and south in region_of:
                    links.append(region_of[south])
            run_links.append(links)
            row_counts.update(links)

        for run, links in zip(runs, run_links):
            ids = set(links)
            if len(ids) == 1:
                rid = next(iter(ids))
                if row_counts[rid] == len(links):
                    for key in run:
                        region_of[key] = rid
                        regions[rid].spans[key[:2]] = key
                    continue
            rid = len(regions)
            regions.append(Region(rid, {}))
            for key in run:
                region_of[key] = rid
                regions[rid].spans[key[:2]] = key
    return regions


@dataclass
class Contour:
    rid: int
    # Simplified outline as (x, y, z) world points; winding is normalized
    # during polygonization.
    points: list[tuple[float, float, float]]


def trace_contours(field: VoxelField, params: AgentParams,
                   settings: BakeSettings,
                   regions: list[Region]) -> list[Contour]:
    conns = span_connections(field, params)
    region_of: dict[SpanKey, int] = {}
    for region in regions:
        for key in region.spans.values():
            region_of[key] = region.rid

    eps_cells = settings.edge_error / settings.cell_size
    contours = []
    for region in regions:
        raw = _walk_region(field, conns, region_of, region)
        if raw is None:
            continue
        corners = _simplify(raw, eps_cells)
        world = [(field.corner_x(ix), y, field.corner_z(iz))
                 for ix, iz, y, _ in corners]
        if len(world) >= 3:
            contours.append(Contour(region.rid, world))
    return contours


def _walk_region(field, conns, region_of, region):
    """Walk the region outline, one raw vertex per boundary unit edge.

    Returns a list of (corner_ix, corner_iz, y, neighbour_region) where the
    neighbour is the region across the edge leaving this vertex, or None
    for unwalkable space.
    """
    flags: dict[tuple[int, int], int] = {}
    neighbour: dict[tuple[int, int], list] = {}
    for cell, key in region.spans.items():
        mask = 0
        across = [None] * 4
        for d in range(4):
            link = conns[key][d]
            rid = region_of.get(link) if link is not None else None
            if rid != region.rid:
                mask |= 1 << d
                across[d] = rid
        if mask:
            flags[cell] = mask
            neighbour[cell] = across
    if not flags:
        return None

    start_cell = min(flags, key=lambda c: (c[1], c[0]))
    start_dir = next(d for d in range(4) if flags[start_cell] & (1 << d))

    out = []
    cell, d = start_cell, start_dir
    for _ in range(200000):
        if flags.get(cell, 0) & (1 << d):
            ix, iz = cell
            if d == 1:
                corner = (ix, iz + 1)
            elif d == 2:
                corner = (ix + 1, iz + 1)
            elif d == 3:
                corner = (ix + 1, iz)
            else:
                corner = (ix, iz)
            span_key = region.spans[cell]
            y = field.column(span_key[0], span_key[1])[span_key[2]].ymax
            out.append((corner[0], corner[1], y, neighbour[cell][d]))
            flags[cell] &= ~(1 << d)
            d = (d + 1) & 3
        else:
            cell = (cell[0] + DIRS[d][0], cell[1] + DIRS[d][1])
            d = (d + 3) & 3
        if cell == start_cell and d == start_dir:
            break
    else:
        raise RuntimeError("contour walk did not terminate")
    return out


def _simplify(raw, epsilon):
    """Split the raw loop into chains per neighbour and simplify each.

    Chain endpoints (neighbour changes) are kept exactly, so regions on
    both sides of a border produce the same vertices.
    """
    n = len(raw)
    changes = [i for i in range(n) if raw[i][3] != raw[i - 1][3]]
    chains: list[list] = []
    if changes:
        order = changes + [changes[0] + n]
        for a, b in zip(order, order[1:]):
            chain = [raw[i % n] for i in range(a, b + 1)]
            chains.append(chain)
    else:
        # Single-neighbour loop: anchor at the two lexicographic extremes.
        lo = min(range(n), key=lambda i: (raw[i][0], raw[i][1]))
        hi = max(range(n), key=lambda i: (raw[i][0], raw[i][1]))
        if lo == hi:
            return []
        a, b = sorted((lo, hi))
        chains.append(raw[a:b + 1])
        chains.append(raw[b:] + raw[:a + 1])

    pts = []
    for chain in chains:
        simple = douglas_peucker(chain, epsilon)
        for corner in simple[:-1]:
            pts.append(corner)
    return pts
