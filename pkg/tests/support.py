"""Shared fixtures and independent oracles used across the test suite.

Everything here is deliberately naive: brute-force enumerators, grid
searches, and Monte-Carlo estimates that cross-check the real
implementations without sharing code paths with them.
"""

from __future__ import annotations

import heapq
import itertools
import math
import random
from pathlib import Path

import numpy as np

from escroom.markup import parse_scene
from escroom.statechart import GameEvent, build_statechart, dispatch, \
    initial_configuration

ROOT = Path(__file__).resolve().parents[1]
DEMO = ROOT / "demo"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


def plane_tris(width: float, depth: float, x0: float = 0.0, z0: float = 0.0,
               y: float = 0.0):
    """Two triangles covering [x0, x0+width] x [z0, z0+depth] at height y."""
    a = (x0, y, z0)
    b = (x0 + width, y, z0)
    c = (x0 + width, y, z0 + depth)
    d = (x0, y, z0 + depth)
    return [(a, b, c), (a, c, d)]


def box_tris(x0, y0, z0, x1, y1, z1):
    corners = [(x, y, z) for x in (x0, x1) for y in (y0, y1) for z in (z0, z1)]
    faces = [(0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1),
             (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3)]
    tris = []
    for a, b, c, d in faces:
        tris.append((corners[a], corners[b], corners[c]))
        tris.append((corners[a], corners[c], corners[d]))
    return tris


# ---------------------------------------------------------------------------
# Statechart generation and an abstract reachability model


def make_chart_doc(rooms: dict[str, list[str]], sequences: dict | None = None):
    """Scene text for rooms mapping room -> puzzle names."""
    parts = ["<a-scene>"]
    for room, puzzles in rooms.items():
        parts.append(
            f'<a-entity id="{room}" game-state="type: room; name: {room}">'
            f"</a-entity>")
        for puzzle in puzzles:
            parts.append(
                f'<a-entity id="{puzzle}" game-state="type: puzzle; '
                f'name: {puzzle}; room: {room}"></a-entity>')
    for name, spec in (sequences or {}).items():
        states = ", ".join(spec["states"])
        room = spec.get("room")
        room_clause = f"; room: {room}" if room else ""
        parts.append(
            f'<a-entity id="{name}" game-state="type: sequence; name: {name};'
            f' states: {states}{room_clause}"></a-entity>')
    parts.append("</a-scene>")
    return "\n".join(parts)


def build_chart(rooms, sequences=None):
    doc = parse_scene(make_chart_doc(rooms, sequences))
    chart = build_statechart(doc)
    return chart, initial_configuration(chart)


def chart_alphabet(rooms, sequences=None):
    events = ["loaded", "time-expired"]
    for puzzles in rooms.values():
        events += [f"solved:{p}" for p in puzzles]
    for name in (sequences or {}):
        events.append(f"next:{name}")
    return events


class AbstractModel:
    """Hand-rolled transition model: phase + solved set + sequence cursors.

    Used as the enumeration oracle; it knows nothing about paths, parallel
    regions, or run-to-completion, only the intended game meaning.
    """

    def __init__(self, rooms, sequences=None):
        self.puzzles = sorted(p for ps in rooms.values() for p in ps)
        self.sequences = {name: list(spec["states"])
                          for name, spec in (sequences or {}).items()}

    def initial(self):
        cursors = tuple((name, 0) for name in sorted(self.sequences))
        return ("initializing", frozenset(), cursors)

    def step(self, state, event):
        # Entering a final top state forgets puzzle/sequence history, the
        # same collapse the real chart performs when exiting `running`.
        phase, solved, cursors = state
        if phase == "initializing" and event == "loaded":
            return ("running", solved, cursors)
        if phase != "running":
            return state
        if event == "time-expired":
            return ("failed", frozenset(), ())
        if event.startswith("solved:"):
            name = event.split(":", 1)[1]
            if name in self.puzzles and name not in solved:
                solved = solved | {name}
                if len(solved) == len(self.puzzles):
                    return ("escaped", frozenset(), ())
            return (phase, solved, cursors)
        if event.startswith("next:"):
            name = event.split(":", 1)[1]
            if name in self.sequences:
                new = []
                for cname, idx in cursors:
                    if cname == name and idx + 1 < len(self.sequences[cname]):
                        idx += 1
                    new.append((cname, idx))
                return (phase, solved, tuple(new))
        return state

    def reachable(self, alphabet):
        start = self.initial()
        seen = {start}
        frontier = [start]
        while frontier:
            state = frontier.pop()
            for event in alphabet:
                nxt = self.step(state, event)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen


def abstract_of_config(chart, config, rooms, sequences=None):
    """Project a live configuration onto the abstract model's state shape."""
    active = config.active_paths
    if "failed" in active:
        return ("failed", frozenset(), ())
    if "escaped" in active:
        return ("escaped", frozenset(), ())
    phase = "initializing" if "initializing" in active else "running"
    solved = frozenset(
        p.rsplit(".", 2)[-2] for p in active if p.endswith(".solved"))
    cursors = []
    for name in sorted(sequences or {}):
        states = (sequences or {})[name]["states"]
        idx = 0
        for i, sname in enumerate(states):
            if any(a.endswith(f".{name}.{sname}") for a in active):
                idx = i
        cursors.append((name, idx))
    return (phase, solved, tuple(cursors))


def chart_reachable(chart, config, alphabet):
    seen = {config.active_paths}
    configs = {config.active_paths: config}
    frontier = [config]
    while frontier:
        cfg = frontier.pop()
        for name in alphabet:
            nxt, _, _ = dispatch(chart, cfg, GameEvent(name))
            if nxt.active_paths not in seen:
                seen.add(nxt.active_paths)
                configs[nxt.active_paths] = nxt
                frontier.append(nxt)
    return list(configs.values())


# ---------------------------------------------------------------------------
# Geometry oracles


def monte_carlo_area(contains, x0, z0, x1, z1, samples, seed=0):
    rng = np.random.default_rng(seed)
    xs = rng.uniform(x0, x1, samples)
    zs = rng.uniform(z0, z1, samples)
    inside = contains(xs, zs)
    return inside.mean() * (x1 - x0) * (z1 - z0)


def mesh_plan_union(mesh):
    """Shapely union of the active polygons, plan view."""
    from shapely.geometry import Polygon
    from shapely.ops import unary_union
    polys = []
    for pi, poly in enumerate(mesh.polygons):
        if mesh.is_active(pi):
            pts = [(mesh.vertices[i][0], mesh.vertices[i][2]) for i in poly]
            polys.append(Polygon(pts))
    return unary_union(polys)


def grid_shortest(contains_xy, x0, z0, x1, z1, start, goal, cell=0.05):
    """Dijkstra on an 8-connected grid of cell centers inside the region.

    Returns the path length, or None when no grid path exists. Start and
    goal are snapped to the nearest free cell center.
    """
    nx = int(round((x1 - x0) / cell))
    nz = int(round((z1 - z0) / cell))
    cx = x0 + (np.arange(nx) + 0.5) * cell
    cz = z0 + (np.arange(nz) + 0.5) * cell
    gx, gz = np.meshgrid(cx, cz, indexing="ij")
    free = contains_xy(gx.ravel(), gz.ravel()).reshape(nx, nz)

    def snap(p):
        ix = min(nx - 1, max(0, int((p[0] - x0) / cell)))
        iz = min(nz - 1, max(0, int((p[1] - z0) / cell)))
        if free[ix, iz]:
            return ix, iz
        best, best_d = None, math.inf
        for dx in range(-4, 5):
            for dz in range(-4, 5):
                jx, jz = ix + dx, iz + dz
                if 0 <= jx < nx and 0 <= jz < nz and free[jx, jz]:
                    d = dx * dx + dz * dz
                    if d < best_d:
                        best, best_d = (jx, jz), d
        return best

    src, dst = snap(start), snap(goal)
    if src is None or dst is None:
        return None
    diag = cell * math.sqrt(2)
    moves = [(1, 0, cell), (-1, 0, cell), (0, 1, cell), (0, -1, cell),
             (1, 1, diag), (1, -1, diag), (-1, 1, diag), (-1, -1, diag)]
    dist = {src: 0.0}
    heap = [(0.0, src)]
    while heap:
        d, node = heapq.heappop(heap)
        if node == dst:
            return d
        if d > dist.get(node, math.inf):
            continue
        for dx, dz, w in moves:
            jx, jz = node[0] + dx, node[1] + dz
            if not (0 <= jx < nx and 0 <= jz < nz) or not free[jx, jz]:
                continue
            nd = d + w
            if nd < dist.get((jx, jz), math.inf):
                dist[(jx, jz)] = nd
                heapq.heappush(heap, (nd, (jx, jz)))
    return None


# ---------------------------------------------------------------------------
# Random obstacle maps


def random_obstacle_mesh(seed, size=8.0, holes=3):
    """Bake a flat plane, then carve random rectangular holes."""
    from escroom.navmesh import Hole, bake_navmesh
    rng = random.Random(seed)
    mesh = bake_navmesh(plane_tris(size, size))
    cut = []
    for i in range(holes):
        w = rng.uniform(0.6, size / 3)
        d = rng.uniform(0.6, size / 3)
        x = rng.uniform(0, size - w)
        z = rng.uniform(0, size - d)
        cut.append(Hole([(x, z), (x + w, z), (x + w, z + d), (x, z + d)],
                        f"hole{i}"))
    try:
        return mesh.carve_holes(cut)
    except Exception:
        return mesh  # pathological cut removed everything; use the plain plane


def sample_mesh_points(mesh, count, seed):
    """Random points on the active mesh, found by rejection sampling."""
    rng = np.random.default_rng(seed)
    xs = [v[0] for v in mesh.vertices]
    zs = [v[2] for v in mesh.vertices]
    x0, x1, z0, z1 = min(xs), max(xs), min(zs), max(zs)
    out = []
    while len(out) < count:
        x = rng.uniform(x0, x1)
        z = rng.uniform(z0, z1)
        pi = mesh.locate((x, z))
        if pi is not None:
            out.append((x, mesh.surface_y(pi, x, z), z))
    return out


# ---------------------------------------------------------------------------
# Solvability oracle: try every puzzle order


def solvable_by_permutations(world):
    """Exhaustively try all puzzle solve orders; independent of the BFS."""
    from escroom.navmesh.pathfind import find_path
    from escroom.statechart import GameEvent, dispatch, state_matches
    from escroom.world import parse_vec3

    names = [p.rsplit(".", 1)[-1] for p in world.chart.puzzle_paths]
    positions = {}
    for name in names:
        entity = world._puzzle_entity(name)
        positions[name] = parse_vec3(entity.attr("position"))

    saved = {bid: blk.active for bid, blk in world.mesh.blockers.items()}

    def blockers_for(cfg):
        for binding in world.bindings:
            if binding.kind != "blocker":
                continue
            world.mesh.set_blocker(binding.params["id"],
                                   state_matches(cfg, binding.predicate))

    try:
        for order in itertools.permutations(names):
            cfg = world.config
            if "initializing" in cfg.active_paths:
                cfg, _, _ = dispatch(world.chart, cfg, GameEvent("loaded"))
            pos = world.player
            feasible = True
            for name in order:
                blockers_for(cfg)
                try:
                    find_path(world.mesh, pos, positions[name])
                except Exception:
                    feasible = False
                    break
                cfg, _, changed = dispatch(world.chart, cfg,
                                           GameEvent(f"solved:{name}"))
                if not changed:
                    feasible = False
                    break
                pos = positions[name]
            if feasible and "escaped" in cfg.active_paths:
                return True
        return False
    finally:
        for bid, active in saved.items():
            world.mesh.set_blocker(bid, active)
