"""World assembly and the fixed-order update loop.

A World ties the parsed scene, statechart, navmesh, assets, and panels
together. Each step runs: inputs -> clock -> event drain -> state bindings
(visibility and barriers) -> movement. The order is fixed so races resolve
deterministically (a solving input queued in the same step as expiry wins,
because inputs enter the bus first) and movement is always constrained by
the barriers implied by the freshly settled state.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (MissingSpawn, NoWalkableSurface, PuzzleWithoutPosition,
                     SceneAssemblyError, UnknownBlocker)
from .gltf import Asset, apply_gltf_hide, extract_triangles, load_gltf
from .markup import Entity, SceneDocument, Selector, parse_scene
from .navmesh import AgentParams, BakeSettings, Hole, NavMesh, bake_navmesh
from .navmesh.pathfind import find_path, path_length
from .panel import (ClockState, PanelLayout, clock_tick, dispatch_pointer,
                    hit_test, layout_panel)
from .statechart import (GAME_STATE_UPDATED, GameEvent, StateChart,
                         StateConfiguration, build_statechart, dispatch,
                         initial_configuration, state_matches, visibility_for)

log = logging.getLogger("escroom.world")

WALK_SPEED = 1.5      # m/s used by the simulator
DEFAULT_NAVMESH_SELECTOR = Selector("class", "navmesh")
DEFAULT_HOLE_SELECTOR = Selector("class", "navmesh-hole")


@dataclass
class StateBinding:
    kind: str            # hide-in-state | blocker | custom
    subject: str         # entity id
    predicate: str       # statechart dot-path
    params: dict


@dataclass
class SolutionScript:
    actions: list[dict]

    @classmethod
    def from_json(cls, data: dict | str) -> "SolutionScript":
        if isinstance(data, str):
            data = json.loads(data)
        actions = data.get("actions")
        if not isinstance(actions, list):
            raise ValueError("solution script must have an actions list")
        for action in actions:
            if not isinstance(action, dict) or len(action) != 1:
                raise ValueError(f"malformed action {action!r}")
            key = next(iter(action))
            if key not in ("move_to", "emit", "wait"):
                raise ValueError(f"unknown action {key!r}")
        return cls(actions)

    def to_json(self) -> dict:
        return {"actions": self.actions}


@dataclass
class FrameReport:
    step: int
    t: float
    dt: float
    events: list[GameEvent] = field(default_factory=list)
    state: list[str] = field(default_factory=list)
    state_changed: bool = False
    player: tuple[float, float, float] | None = None
    yaw: float = 0.0
    clock: dict | None = None
    updates: dict[str, str] = field(default_factory=dict)
    visibility: dict[str, bool] = field(default_factory=dict)
    blockers: dict[str, bool] = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return (not self.events and not self.state_changed
                and not self.updates and not self.errors)

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "t": self.t,
            "dt": self.dt,
            "events": [{"name": e.name, "payload": dict(e.payload or {})}
                       for e in self.events],
            "state": self.state,
            "state_changed": self.state_changed,
            "player": list(self.player) if self.player else None,
            "yaw": self.yaw,
            "clock": self.clock,
            "updates": self.updates,
            "visibility": self.visibility,
            "blockers": self.blockers,
            "errors": self.errors,
        }

    def digest(self) -> str:
        return hashlib.sha256(
            json.dumps(self.to_json(), sort_keys=True).encode()).hexdigest()


@dataclass
class World:
    doc: SceneDocument
    chart: StateChart
    config: StateConfiguration
    mesh: NavMesh
    assets: dict[str, Asset]
    panels: dict[str, PanelLayout]
    panel_poses: dict[str, np.ndarray]
    clock: ClockState | None
    bindings: list[StateBinding]
    player: tuple[float, float, float] | None
    yaw: float = 0.0
    bus: list[GameEvent] = field(default_factory=list)
    visibility: dict[str, bool] = field(default_factory=dict)
    hover_target: Entity | None = None
    step_count: int = 0
    time: float = 0.0
    scene_path: str = ""
    auto_load: bool = True

    def enqueue(self, event: GameEvent) -> None:
        self.bus.append(event)

    # -- update loop -------------------------------------------------------

    def step(self, dt: float, inputs: list[dict] | None = None) -> FrameReport:
        report = FrameReport(self.step_count + 1, self.time + dt, dt)
        moves: list[tuple[float, float, float]] = []

        # 1. inputs; once time starts flowing the world announces itself
        if self.auto_load and dt > 0 and "initializing" in self.config:
            self.enqueue(GameEvent("loaded"))
            self.auto_load = False
        for item in inputs or ():
            try:
                moves.extend(self._apply_input(item))
            except Exception as exc:  # input errors never kill the loop
                report.errors.append(f"bad input {item!r}: {exc}")

        # 2. clock
        if self.clock is not None and dt > 0:
            _, updates, events = clock_tick(self.clock, dt)
            report.updates.update(updates)
            for event in events:
                self.enqueue(event)

        # 3. event drain, run to completion
        before = self.config
        guard = 0
        while self.bus:
            guard += 1
            if guard > 10000:
                report.errors.append("event cascade exceeded 10000 events")
                self.bus.clear()
                break
            event = self.bus.pop(0)
            report.events.append(event)
            self.config, emitted, _ = dispatch(self.chart, self.config, event)
            self.bus.extend(emitted)
        report.state_changed = self.config != before

        # 4. bindings
        self._apply_bindings()

        # 5. movement
        for delta in moves:
            if self.player is None:
                report.errors.append("move input without a player spawn")
                break
            target = (self.player[0] + delta[0], self.player[1] + delta[1],
                      self.player[2] + delta[2])
            try:
                self.player = self.mesh.constrain_move(self.player, target)
            except Exception as exc:
                report.errors.append(f"movement failed: {exc}")
                break

        self.step_count += 1
        self.time += dt
        report.state = self.config.sorted()
        report.player = self.player
        report.yaw = self.yaw
        if self.clock is not None:
            report.clock = {"remaining": self.clock.remaining,
                            "display": f"{int(self.clock.remaining // 60):02d}:"
                                       f"{int(self.clock.remaining % 60):02d}"}
        report.visibility = dict(sorted(self.visibility.items()))
        report.blockers = {bid: blk.active
                           for bid, blk in sorted(self.mesh.blockers.items())}
        return report

    def _apply_input(self, item: dict) -> list[tuple[float, float, float]]:
        if "move" in item:
            vec = item["move"]
            if len(vec) == 2:
                vec = (vec[0], 0.0, vec[1])
            if len(vec) != 3 or any(not math.isfinite(c) for c in vec):
                raise ValueError("move expects 2 or 3 finite numbers")
            return [tuple(float(c) for c in vec)]
        if "emit" in item:
            self.enqueue(GameEvent(str(item["emit"]), item.get("payload")))
            return []
        if "pointer" in item:
            spec = item["pointer"]
            origin = tuple(float(c) for c in spec["origin"])
            direction = tuple(float(c) for c in spec["direction"])
            norm = math.sqrt(sum(c * c for c in direction))
            if norm <= 0:
                raise ValueError("pointer direction is zero")
            direction = tuple(c / norm for c in direction)
            action = spec.get("action", "click")
            hit = self._hit_panels(origin, direction)
            dispatch_pointer(self, hit, action)
            return []
        raise ValueError("expected one of move/emit/pointer")

    def _hit_panels(self, origin, direction):
        best = None
        best_t = math.inf
        for pid, layout in self.panels.items():
            pose = self.panel_poses[pid]
            inv = np.linalg.inv(pose)
            o = inv @ np.array([*origin, 1.0])
            d = inv @ np.array([*direction, 0.0])
            if abs(d[2]) < 1e-12:
                continue
            t = -o[2] / d[2]
            if t < 1e-9 or t >= best_t:
                continue
            hit = hit_test(layout, pose, origin, direction)
            if hit is not None:
                best = hit
                best_t = t
        return best

    def _apply_bindings(self) -> None:
        for binding in self.bindings:
            if binding.kind == "hide-in-state":
                visible = visibility_for(self.config, binding.params)
                if visible is not None:
                    self.visibility[binding.subject] = visible
            elif binding.kind == "blocker":
                active = state_matches(self.config, binding.predicate)
                try:
                    self.mesh.set_blocker(binding.params["id"], active)
                except UnknownBlocker:
                    pass  # blocker footprint missed the mesh entirely

    # -- solvability -------------------------------------------------------

    def _puzzle_entity(self, name: str) -> Entity | None:
        for entity in self.doc.root.walk():
            cmap = entity.component("game-state")
            if cmap is None or cmap.get("type") != "puzzle":
                continue
            if str(cmap.get("name") or entity.id or "") == name:
                return entity
        return self.doc.entities_by_id.get(name)

    def check_solvable(self, max_depth: int = 64) -> dict:
        """BFS over (state configuration, player region).

        Action edges move to a puzzle entity (when a path exists under the
        blockers implied by that configuration) and fire its solving event.
        """
        if self.player is None:
            raise MissingSpawn()
        puzzles = {}
        for path in self.chart.puzzle_paths:
            name = path.rsplit(".", 1)[-1]
            entity = self._puzzle_entity(name)
            if entity is None or entity.attr("position") is None:
                raise PuzzleWithoutPosition(name)
            puzzles[name] = (path, parse_vec3(entity.attr("position")))

        saved_config = self.config
        saved_blockers = {bid: blk.active
                          for bid, blk in self.mesh.blockers.items()}
        try:
            return self._solve(puzzles, max_depth)
        finally:
            self.config = saved_config
            for bid, active in saved_blockers.items():
                self.mesh.set_blocker(bid, active)

    def _solve(self, puzzles: dict, max_depth: int) -> dict:
        config = self.config
        if "initializing" in config.active_paths:
            config, _, _ = dispatch(self.chart, config, GameEvent("loaded"))

        def blockers_for(cfg: StateConfiguration) -> frozenset[str]:
            active = []
            for binding in self.bindings:
                if binding.kind != "blocker":
                    continue
                if state_matches(cfg, binding.predicate):
                    active.append(binding.params["id"])
            return frozenset(active)

        def apply_blockers(active: frozenset[str]) -> None:
            for bid in self.mesh.blockers:
                self.mesh.set_blocker(bid, bid in active)

        def region_at(point) -> int:
            pi = self.mesh.locate(point)
            if pi is None:
                pi, _ = self.mesh.nearest_active(point)
            return self.mesh.regions[pi] if pi is not None else -1

        start_pos = self.player
        apply_blockers(blockers_for(config))
        start = (config.active_paths, region_at(start_pos))
        seen = {start}
        queue = [(config, start_pos, [])]
        explored = 0
        depth_hit = False
        while queue:
            cfg, pos, script = queue.pop(0)
            explored += 1
            if "escaped" in cfg.active_paths:
                return {"solvable": True,
                        "witness": SolutionScript(script).to_json(),
                        "explored": explored}
            if len(script) >= max_depth:
                depth_hit = True
                continue
            active = blockers_for(cfg)
            apply_blockers(active)
            for name, (path, target) in sorted(puzzles.items()):
                solved_path = path + ".solved"
                if solved_path in cfg.active_paths:
                    continue
                event = GameEvent(f"solved:{name}")
                nxt, _, changed = dispatch(self.chart, cfg, event)
                if not changed:
                    continue
                try:
                    find_path(self.mesh, pos, target)
                except Exception:
                    continue
                snapped_pi, snapped = self.mesh.nearest_active(target)
                if snapped_pi is None:
                    continue
                new_pos = (snapped[0],
                           self.mesh.surface_y(snapped_pi, *snapped),
                           snapped[1])
                key = (nxt.active_paths, self.mesh.regions[snapped_pi])
                if key in seen:
                    continue
                seen.add(key)
                queue.append((nxt, new_pos,
                              script + [{"move_to": name},
                                        {"emit": f"solved:{name}"}]))
        return {"solvable": False,
                "witness": None,
                "explored": explored,
                "exhausted": not depth_hit,
                "max_depth": max_depth}


# -- scene assembly ----------------------------------------------------------

def assemble_world(scene_path: str | Path, z_up: bool = False) -> World:
    path = Path(scene_path)
    problems: list[str] = []
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SceneAssemblyError(str(path), [f"cannot read scene: {exc}"])
    try:
        doc = parse_scene(text)
    except Exception as exc:
        raise SceneAssemblyError(str(path), [f"parse error: {exc}"])

    rig = _find_rig(doc)
    nav_sel, hole_sel = _rig_selectors(rig)

    # Assets
    assets: dict[str, Asset] = {}
    asset_cache: dict[Path, Asset] = {}
    entity_asset: dict[int, Asset] = {}
    for entity in doc.root.walk():
        src = _gltf_src(entity)
        if src is None:
            continue
        resolved, asset_id = _resolve_src(doc, src, entity)
        if resolved is None:
            problems.append(
                f"line {entity.line}: cannot resolve model src {src!r}")
            continue
        file_path = (path.parent / resolved).resolve()
        try:
            asset = asset_cache.get(file_path)
            if asset is None:
                asset = load_gltf(file_path)
                asset_cache[file_path] = asset
        except Exception as exc:
            problems.append(f"line {entity.line}: {exc}")
            continue
        assets[asset_id] = asset
        entity_asset[id(entity)] = asset

    # Static hides baked into the asset visibility maps
    for entity in doc.root.walk():
        hide = entity.component("gltf-hide")
        if hide and id(entity) in entity_asset:
            apply_gltf_hide(entity_asset[id(entity)], hide)

    # Navmesh-source triangles
    triangles: list = []
    for entity in doc.root.walk():
        if not entity.matches(nav_sel):
            continue
        triangles.extend(_entity_triangles(entity, entity_asset, problems))
    if z_up:
        flip = [(1, 0, 0), (0, 0, 1), (0, -1, 0)]
        triangles = [tuple(_apply3(flip, v) for v in tri) for tri in triangles]

    mesh = None
    if not problems or triangles:
        try:
            mesh = bake_navmesh(triangles, AgentParams(), BakeSettings())
        except NoWalkableSurface as exc:
            problems.append(f"navmesh: {exc}")

    holes: list[Hole] = []
    for entity in doc.root.walk():
        if entity.matches(hole_sel):
            footprint = _entity_footprint(entity)
            if footprint:
                holes.append(Hole(footprint, entity.id or entity.tag))
    if mesh is not None and holes:
        try:
            mesh = mesh.carve_holes(holes)
        except Exception as exc:
            problems.append(f"carving holes: {exc}")

    # Statechart
    chart = None
    try:
        chart = build_statechart(doc)
    except Exception as exc:
        problems.append(f"statechart: {exc}")

    # Panels and the countdown
    panels: dict[str, PanelLayout] = {}
    panel_poses: dict[str, np.ndarray] = {}
    clock: ClockState | None = None
    styles = _load_styles(doc, path, problems)
    for entity in doc.root.walk():
        if entity.tag not in ("esc-html-panel", "esc-watch"):
            continue
        pid = entity.id or f"{entity.tag}-{entity.line}"
        width = _as_float(entity.attr("width"), 1.0)
        ppm = _as_float(entity.attr("px-per-meter"), 256.0)
        try:
            layout = layout_panel(entity, width, ppm, styles)
        except Exception as exc:
            problems.append(f"line {entity.line}: panel: {exc}")
            continue
        panels[pid] = layout
        panel_poses[pid] = _panel_pose(doc, entity)
        wants_clock = entity.tag == "esc-watch"
        comp = entity.component("components")
        if comp is not None:
            wants_clock = bool(comp.get("game-clock", wants_clock))
        if wants_clock and clock is None:
            clock = ClockState.from_layout(layout)

    # Bindings
    bindings: list[StateBinding] = []
    for entity in doc.root.walk():
        hide = entity.component("hide-in-state")
        if hide is not None:
            state = str(hide.get("state", ""))
            bindings.append(StateBinding("hide-in-state",
                                         entity.id or entity.tag, state,
                                         dict(hide)))
        blocker = entity.component("navmesh-blocker")
        if blocker is not None:
            state = str(blocker.get("state", ""))
            blocker_id = str(blocker.get("id") or entity.id
                             or f"blocker-{entity.line}")
            params = dict(blocker)
            params["id"] = blocker_id
            bindings.append(StateBinding("blocker", entity.id or blocker_id,
                                         state, params))
            footprint = _entity_footprint(entity)
            if footprint is None:
                problems.append(
                    f"line {entity.line}: blocker {blocker_id!r} needs a "
                    f"footprint or primitive geometry")
            elif mesh is not None:
                mesh.register_blocker(blocker_id, footprint)
    if chart is not None:
        for binding in bindings:
            if binding.predicate and binding.predicate not in chart.nodes_by_path:
                problems.append(
                    f"binding on {binding.subject!r}: unknown state path "
                    f"{binding.predicate!r}")

    if problems or mesh is None or chart is None:
        raise SceneAssemblyError(str(path), problems or ["assembly failed"])

    player = None
    if rig is not None and rig.attr("position") is not None:
        spawn = parse_vec3(rig.attr("position"))
        pi, pt = mesh.nearest_active(spawn)
        if pi is not None:
            player = (pt[0], mesh.surface_y(pi, *pt), pt[1])
    world = World(
        doc=doc, chart=chart, config=initial_configuration(chart),
        mesh=mesh, assets=assets, panels=panels, panel_poses=panel_poses,
        clock=clock, bindings=bindings, player=player,
        scene_path=str(path),
    )
    world._apply_bindings()
    return world


# -- assembly helpers --------------------------------------------------------

def _find_rig(doc: SceneDocument) -> Entity | None:
    for entity in doc.root.walk():
        if entity.component("simple-navmesh-constraint") is not None:
            return entity
    return doc.entities_by_id.get("cameraRig")


def _rig_selectors(rig: Entity | None):
    nav, hole = DEFAULT_NAVMESH_SELECTOR, DEFAULT_HOLE_SELECTOR
    if rig is not None:
        comp = rig.component("simple-navmesh-constraint") or {}
        nav_val = comp.get("navmesh")
        hole_val = comp.get("exclude")
        if isinstance(nav_val, Selector):
            nav = nav_val
        if isinstance(hole_val, Selector):
            hole = hole_val
    return nav, hole


def _gltf_src(entity: Entity):
    if entity.tag == "a-gltf-model":
        return entity.attr("src") or entity.attr("gltf-model") \
            or _bare(entity.component("gltf-model"))
    comp = entity.component("gltf-model")
    if comp is not None:
        return _bare(comp) or comp.get("src")
    return None


def _bare(cmap):
    if cmap is not None and list(cmap.keys()) == [""]:
        return cmap[""]
    return None


def _resolve_src(doc: SceneDocument, src, entity: Entity):
    """Follow #id references to an asset entity with a file src."""
    seen = 0
    while isinstance(src, Selector):
        if src.kind != "id" or seen > 4:
            return None, ""
        ref = doc.entities_by_id.get(src.name)
        if ref is None:
            return None, ""
        asset_id = src.name
        src = ref.attr("src")
        seen += 1
        if isinstance(src, str):
            return src, asset_id
    if isinstance(src, str):
        return src, entity.id or src
    return None, ""


def parse_vec3(value) -> tuple[float, float, float]:
    if isinstance(value, (int, float)):
        return (float(value), 0.0, 0.0)
    parts = str(value).split()
    nums = [float(p) for p in parts] + [0.0, 0.0, 0.0]
    return (nums[0], nums[1], nums[2])


def _as_float(value, default: float) -> float:
    if value is None:
        return default
    try:
        return float(value)
    except (TypeError, ValueError):
        return default


def entity_matrix(entity: Entity) -> np.ndarray:
    m = np.eye(4)
    scale = entity.attr("scale")
    if scale is not None:
        s = parse_vec3(scale)
        m[:3, :3] = np.diag([s[0] or 1.0, s[1] or 1.0, s[2] or 1.0])
    rotation = entity.attr("rotation")
    if rotation is not None:
        rx, ry, rz = (math.radians(c) for c in parse_vec3(rotation))
        m = _rot_z(rz) @ m
        m = _rot_y(ry) @ m
        m = _rot_x(rx) @ m
    position = entity.attr("position")
    if position is not None:
        t = np.eye(4)
        t[:3, 3] = parse_vec3(position)
        m = t @ m
    return m


def world_matrix(entity: Entity) -> np.ndarray:
    chain = []
    node = entity
    while node is not None:
        chain.append(node)
        node = node.parent
    m = np.eye(4)
    for node in reversed(chain):
        if not node.is_text:
            m = m @ entity_matrix(node)
    return m


def _rot_x(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0], [0, 0, 0, 1]],
                    dtype=float)


def _rot_y(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0, s, 0], [0, 1, 0, 0], [-s, 0, c, 0], [0, 0, 0, 1]],
                    dtype=float)


def _rot_z(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0, 0], [s, c, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
                    dtype=float)


def _apply3(m, v):
    return (m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2])


def _primitive_vertices(entity: Entity):
    """Local-space triangles for a-plane / a-box primitives."""
    if entity.tag == "a-plane":
        w = _as_float(entity.attr("width"), 1.0) / 2
        h = _as_float(entity.attr("height"), 1.0) / 2
        quad = [(-w, -h, 0.0), (w, -h, 0.0), (w, h, 0.0), (-w, h, 0.0)]
        return [(quad[0], quad[1], quad[2]), (quad[0], quad[2], quad[3])]
    if entity.tag == "a-box":
        w = _as_float(entity.attr("width"), 1.0) / 2
        h = _as_float(entity.attr("height"), 1.0) / 2
        d = _as_float(entity.attr("depth"), 1.0) / 2
        corners = [(sx * w, sy * h, sz * d)
                   for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]
        faces = [(0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1),
                 (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3)]
        tris = []
        for a, b, c, d_ in faces:
            tris.append((corners[a], corners[b], corners[c]))
            tris.append((corners[a], corners[c], corners[d_]))
        return tris
    return None


def _entity_triangles(entity: Entity, entity_asset: dict, problems: list):
    world = world_matrix(entity)
    local = _primitive_vertices(entity)
    if local is not None:
        rot = world[:3, :3]
        pos = world[:3, 3]
        return [tuple(tuple(rot @ np.array(v) + pos) for v in tri)
                for tri in local]
    asset = entity_asset.get(id(entity))
    if asset is not None:
        tris = extract_triangles(asset)
        rot = world[:3, :3]
        pos = world[:3, 3]
        if np.allclose(world, np.eye(4)):
            return tris
        return [tuple(tuple(rot @ np.array(v) + pos) for v in tri)
                for tri in tris]
    problems.append(f"line {entity.line}: navmesh source {entity.tag!r} has "
                    f"no usable geometry")
    return []


def _entity_footprint(entity: Entity):
    """Plan-view polygon for holes and blockers."""
    comp = entity.component("footprint")
    world = world_matrix(entity)
    if comp is not None:
        w = _as_float(comp.get("width"), 1.0) / 2
        d = _as_float(comp.get("depth"), 1.0) / 2
        local = [(-w, 0.0, -d), (w, 0.0, -d), (w, 0.0, d), (-w, 0.0, d)]
    else:
        tris = _primitive_vertices(entity)
        if tris is None:
            return None
        local = sorted({v for tri in tris for v in tri})
    rot = world[:3, :3]
    pos = world[:3, 3]
    pts = [rot @ np.array(v) + pos for v in local]
    plan = [(float(p[0]), float(p[2])) for p in pts]
    hull = _convex_hull(plan)
    return hull if len(hull) >= 3 else None


def _convex_hull(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _panel_pose(doc: SceneDocument, entity: Entity) -> np.ndarray:
    pose = world_matrix(entity)
    settings = entity.component("settings") or {}
    parent_sel = settings.get("parentSelector")
    if isinstance(parent_sel, Selector) and parent_sel.kind == "id":
        parent = doc.entities_by_id.get(parent_sel.name)
        if parent is not None:
            pose = world_matrix(parent) @ entity_matrix(entity)
    return pose


def _load_styles(doc: SceneDocument, scene_path: Path, problems: list):
    comp = doc.root.component("style-map")
    if comp is None:
        return None
    src = comp.get("src") or _bare(comp)
    if not isinstance(src, str):
        return None
    try:
        return json.loads((scene_path.parent / src).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        problems.append(f"style map {src!r}: {exc}")
        return None


# -- module-level wrappers ---------------------------------------------------

def step(world: World, dt: float, inputs: list[dict] | None = None
         ) -> FrameReport:
    return world.step(dt, inputs)


def check_solvable(world: World, max_depth: int = 64) -> dict:
    return world.check_solvable(max_depth)


def run_script(world: World, script: SolutionScript, dt: float = 0.1,
               max_time: float | None = None) -> list[FrameReport]:
    """Drive a world through a solution script at a fixed walking speed.

    Stops early once the chart reaches a final outcome. Returns all frame
    reports, including the settling steps after the last action.
    """
    reports: list[FrameReport] = []

    def done() -> bool:
        return ("escaped" in world.config.active_paths
                or "failed" in world.config.active_paths)

    def tick(inputs=None) -> None:
        reports.append(world.step(dt, inputs))

    for action in script.actions:
        if done():
            break
        if "emit" in action:
            tick([{"emit": action["emit"]}])
        elif "wait" in action:
            remaining = float(action["wait"])
            while remaining > 1e-9 and not done():
                tick()
                remaining -= dt
        elif "move_to" in action:
            entity = world.doc.entities_by_id.get(action["move_to"])
            if entity is None or entity.attr("position") is None:
                reports.append(world.step(dt))
                reports[-1].errors.append(
                    f"move_to: unknown or unplaced entity {action['move_to']!r}")
                continue
            target = parse_vec3(entity.attr("position"))
            budget = max_time or (world.clock.duration if world.clock
                                  else 3600.0)
            while not done():
                if world.time > budget:
                    break
                pos = world.player
                if pos is None:
                    break
                try:
                    waypoints = find_path(world.mesh, pos, target)
                except Exception:
                    tick()
                    continue
                if path_length(waypoints) <= 1e-6 or len(waypoints) < 2:
                    break
                nxt = waypoints[1]
                seg = (nxt[0] - pos[0], nxt[1] - pos[1], nxt[2] - pos[2])
                seg_len = math.hypot(seg[0], seg[2])
                step_len = WALK_SPEED * dt
                if seg_len > step_len and seg_len > 0:
                    k = step_len / seg_len
                    seg = (seg[0] * k, seg[1] * k, seg[2] * k)
                tick([{"move": seg}])
    if not done():
        tick()
    return reports
