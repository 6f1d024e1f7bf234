"""Hierarchical game-state machine built from ``game-state`` entities.

The chart always has the skeleton ``root -> {initializing, running, failed,
escaped}``. Entities with a ``game-state`` component extend it:

* ``type:room``     adds a parallel region under ``running``
* ``type:puzzle``   adds ``<room>.<name>`` with ``unsolved -> solved`` on
  the event ``solved:<name>``
* ``type:sequence`` adds an author-ordered chain of atomic states advanced
  one step per ``next:<name>`` event

``loaded`` moves ``initializing`` to ``running``; ``time-expired`` anywhere
inside ``running`` targets ``failed``; once every puzzle sits in ``solved``
an automatic transition targets ``escaped``.

Dispatch is run-to-completion: an event, plus any automatic transitions it
unlocks, is processed fully before the function returns, and a changing
dispatch emits exactly one ``game-state-updated``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import (
    DuplicateStateName,
    MissingStateKey,
    MissingType,
    StateChartError,
    UnknownRoom,
)
from .markup import ComponentMap, SceneDocument

GAME_STATE_EVENT = "game-state-event"
GAME_STATE_UPDATED = "game-state-updated"

ATOMIC = "atomic"
COMPOUND = "compound"
PARALLEL = "parallel"
FINAL = "final"


@dataclass(frozen=True)
class GameEvent:
    name: str
    payload: ComponentMap | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("event name must be non-empty")


@dataclass(frozen=True)
class Transition:
    event: str
    target: str  # dot-path


@dataclass
class StateNode:
    name: str
    kind: str = ATOMIC
    children: list["StateNode"] = field(default_factory=list)
    transitions: list[Transition] = field(default_factory=list)
    entry_emits: list[str] = field(default_factory=list)
    exit_emits: list[str] = field(default_factory=list)
    path: str = ""  # dot-path, root's own path is ""
    order: int = 0  # document order index

    def child(self, name: str) -> "StateNode | None":
        for c in self.children:
            if c.name == name:
                return c
        return None


@dataclass
class StateChart:
    root: StateNode
    nodes_by_path: dict[str, StateNode]
    puzzle_paths: list[str] = field(default_factory=list)  # ".../<puzzle>" nodes

    @property
    def solved_paths(self) -> list[str]:
        return [p + ".solved" for p in self.puzzle_paths]

    def node(self, path: str) -> StateNode:
        return self.nodes_by_path[path]


@dataclass(frozen=True)
class StateConfiguration:
    """Active dot-paths, ancestor-closed (root itself is implicit)."""

    active_paths: frozenset[str]

    def __contains__(self, path: str) -> bool:
        return path in self.active_paths

    def sorted(self) -> list[str]:
        return sorted(self.active_paths)


def state_matches(config: StateConfiguration, path: str) -> bool:
    """True iff ``path`` is active or a dot-boundary prefix of an active path."""
    if not path:
        return False
    for active in config.active_paths:
        if active == path or active.startswith(path + "."):
            return True
    return False


def visibility_for(config: StateConfiguration, hide_spec: ComponentMap) -> bool | None:
    """Resolve a ``hide-in-state`` spec against the configuration.

    Returns False (hide) when the named state is active, True (show) when it
    is inactive and ``showOtherwise`` is set, and None (leave visibility
    untouched) when it is inactive without ``showOtherwise``.
    """
    if "state" not in hide_spec:
        raise MissingStateKey()
    show_otherwise = bool(hide_spec.get("showOtherwise", False))
    if state_matches(config, str(hide_spec["state"])):
        return False
    return True if show_otherwise else None


# --------------------------------------------------------------------------
# Building the chart from a scene document


def _require_name(cmap: ComponentMap, entity) -> str:
    name = cmap.get("name") or entity.id
    if not name:
        raise StateChartError(
            f"game-state entity at line {entity.line} has neither a name nor an id"
        )
    return str(name)


def build_statechart(doc: SceneDocument) -> StateChart:
    root = StateNode("root", COMPOUND, path="")
    initializing = StateNode("initializing", ATOMIC, path="initializing",
                             transitions=[Transition("loaded", "running")])
    running = StateNode("running", ATOMIC, path="running",
                        transitions=[Transition("time-expired", "failed")])
    failed = StateNode("failed", FINAL, path="failed")
    escaped = StateNode("escaped", FINAL, path="escaped")
    root.children = [initializing, running, failed, escaped]

    declared = [e for e in doc.walk() if e.component("game-state") is not None]
    rooms: dict[str, StateNode] = {}
    taken_names: set[str] = set()
    puzzle_paths: list[str] = []

    def claim(name: str) -> None:
        if name in taken_names:
            raise DuplicateStateName(name)
        taken_names.add(name)

    # Rooms and sequences first so puzzles can resolve their room.
    for entity in declared:
        cmap = entity.component("game-state")
        kind = cmap.get("type")
        if kind is None:
            raise MissingType(entity.id or f"line {entity.line}")
        if kind == "room":
            name = _require_name(cmap, entity)
            claim(name)
            node = StateNode(name, PARALLEL, path=f"running.{name}")
            rooms[name] = node
            running.children.append(node)
        elif kind == "sequence":
            name = _require_name(cmap, entity)
            claim(name)
            states = cmap.get("states", [])
            if isinstance(states, str):
                states = [states] if states else []
            if not states:
                raise StateChartError(f"sequence {name!r} declares no states")
            parent_path = "running"
            room = cmap.get("room")
            if room is not None:
                if str(room) not in rooms:
                    raise UnknownRoom(name, str(room))
                parent = rooms[str(room)]
                parent_path = parent.path
            seq = StateNode(name, COMPOUND, path=f"{parent_path}.{name}")
            for i, state_name in enumerate(states):
                step = StateNode(str(state_name), ATOMIC,
                                 path=f"{seq.path}.{state_name}")
                if i + 1 < len(states):
                    step.transitions.append(
                        Transition(f"next:{name}", f"{seq.path}.{states[i + 1]}")
                    )
                if step.name in {c.name for c in seq.children}:
                    raise DuplicateStateName(step.name)
                seq.children.append(step)
            if room is not None:
                rooms[str(room)].children.append(seq)
            else:
                running.children.append(seq)

    for entity in declared:
        cmap = entity.component("game-state")
        if cmap.get("type") != "puzzle":
            continue
        name = _require_name(cmap, entity)
        claim(name)
        room_name = cmap.get("room")
        if room_name is None or str(room_name) not in rooms:
            raise UnknownRoom(name, str(room_name))
        room = rooms[str(room_name)]
        puzzle = StateNode(name, COMPOUND, path=f"{room.path}.{name}")
        unsolved = StateNode("unsolved", ATOMIC, path=f"{puzzle.path}.unsolved",
                             transitions=[Transition(f"solved:{name}",
                                                     f"{puzzle.path}.solved")])
        solved = StateNode("solved", FINAL, path=f"{puzzle.path}.solved")
        puzzle.children = [unsolved, solved]
        room.children.append(puzzle)
        puzzle_paths.append(puzzle.path)

    if running.children:
        running.kind = PARALLEL

    nodes_by_path: dict[str, StateNode] = {}
    order = 0

    def index(node: StateNode) -> None:
        nonlocal order
        node.order = order
        order += 1
        if node.path:
            if node.path in nodes_by_path:
                raise DuplicateStateName(node.path)
            nodes_by_path[node.path] = node
        for child in node.children:
            index(child)

    index(root)
    return StateChart(root=root, nodes_by_path=nodes_by_path,
                      puzzle_paths=puzzle_paths)


# --------------------------------------------------------------------------
# Interpretation


def _default_completion(chart: StateChart, node: StateNode) -> set[str]:
    """Paths entered when ``node`` becomes active, including itself."""
    entered = {node.path} if node.path else set()
    if node.kind == COMPOUND and node.children:
        entered |= _default_completion(chart, node.children[0])
    elif node.kind == PARALLEL:
        for child in node.children:
            entered |= _default_completion(chart, child)
    return entered


def initial_configuration(chart: StateChart) -> StateConfiguration:
    return StateConfiguration(frozenset(_default_completion(chart, chart.root)))


def _ancestors(path: str) -> list[str]:
    """Proper ancestor paths, nearest first; "" stands for root."""
    out = []
    while "." in path:
        path = path.rsplit(".", 1)[0]
        out.append(path)
    out.append("")
    return out


def _domain(source: str, target: str) -> str:
    source_up = set(_ancestors(source))
    for candidate in _ancestors(target):
        if candidate in source_up:
            return candidate
    return ""


def _leaves(active: frozenset[str]) -> list[str]:
    return [p for p in active
            if not any(q != p and q.startswith(p + ".") for q in active)]


def _matching_transition(chart: StateChart, leaf: str,
                         event_name: str) -> tuple[str, Transition] | None:
    path = leaf
    while path:
        node = chart.nodes_by_path[path]
        for t in node.transitions:
            if t.event == event_name:
                return path, t
        path = path.rsplit(".", 1)[0] if "." in path else ""
    return None


def _execute(chart: StateChart, active: set[str], source: str,
             transition: Transition, emitted: list[GameEvent]) -> None:
    domain = _domain(source, transition.target)
    prefix = domain + "." if domain else ""
    exited = [p for p in active if p.startswith(prefix)] if prefix else list(active)
    for path in sorted(exited, key=lambda p: (-p.count("."), -chart.nodes_by_path[p].order)):
        for name in chart.nodes_by_path[path].exit_emits:
            emitted.append(GameEvent(name))
        active.discard(path)

    # Chain from the domain down to the target, then default-complete it.
    chain: list[str] = []
    path = transition.target
    while path and path != domain:
        chain.append(path)
        path = path.rsplit(".", 1)[0] if "." in path else ""
    chain.reverse()
    for i, path in enumerate(chain):
        node = chart.nodes_by_path[path]
        if path == transition.target:
            entered = _default_completion(chart, node)
        else:
            entered = {path}
            if node.kind == PARALLEL:
                # Sibling regions of the chain must come up alongside it.
                on_chain = chain[i + 1]
                for child in node.children:
                    if child.path != on_chain:
                        entered |= _default_completion(chart, child)
        for p in sorted(entered, key=lambda q: chart.nodes_by_path[q].order):
            if p not in active:
                active.add(p)
                for name in chart.nodes_by_path[p].entry_emits:
                    emitted.append(GameEvent(name))


def _auto_escape_ready(chart: StateChart, active: set[str]) -> bool:
    if not chart.puzzle_paths or "running" not in active:
        return False
    return all(p in active for p in chart.solved_paths)


def dispatch(chart: StateChart, config: StateConfiguration,
             event: GameEvent | str) -> tuple[StateConfiguration, list[GameEvent], bool]:
    """Process one event to completion.

    Returns the new configuration, the events emitted while processing (a
    single ``game-state-updated`` when the configuration changed), and
    whether it changed. Unmatched events are ignored.
    """
    if isinstance(event, str):
        event = GameEvent(event)
    active = set(config.active_paths)
    emitted: list[GameEvent] = []

    candidates: list[tuple[str, Transition]] = []
    for leaf in sorted(_leaves(config.active_paths),
                       key=lambda p: chart.nodes_by_path[p].order):
        found = _matching_transition(chart, leaf, event.name)
        if found and found not in candidates:
            candidates.append(found)
    # Descendant priority: drop a candidate whose source is a proper
    # ancestor of another candidate's source.
    sources = [src for src, _ in candidates]
    candidates = [
        (src, t) for src, t in candidates
        if not any(other != src and other.startswith(src + ".") for other in sources)
    ]

    for src, transition in sorted(candidates,
                                  key=lambda c: chart.nodes_by_path[c[0]].order):
        if src in active:  # an earlier transition may have exited this source
            _execute(chart, active, src, transition, emitted)

    # Run-to-completion: automatic transitions until stable.
    for _ in range(len(chart.nodes_by_path) + 4):
        if _auto_escape_ready(chart, active):
            _execute(chart, active, "running", Transition("", "escaped"), emitted)
        else:
            break
    else:
        raise StateChartError("automatic transitions did not converge")

    new_config = StateConfiguration(frozenset(active))
    updated = new_config.active_paths != config.active_paths
    if updated:
        emitted.append(GameEvent(GAME_STATE_UPDATED,
                                 payload={"paths": new_config.sorted()}))
    return new_config, emitted, updated


# --------------------------------------------------------------------------
# Stateful machine with listeners


class Subscription:
    def __init__(self, machine: "Machine", listener: Callable[[GameEvent], None]):
        self._machine = machine
        self._listener = listener

    def cancel(self) -> None:
        try:
            self._machine._listeners.remove(self._listener)
        except ValueError:
            pass


class Machine:
    """A chart plus its current configuration and event listeners."""

    def __init__(self, chart: StateChart):
        self.chart = chart
        self.config = initial_configuration(chart)
        self._listeners: list[Callable[[GameEvent], None]] = []

    def subscribe(self, listener: Callable[[GameEvent], None]) -> Subscription:
        self._listeners.append(listener)
        return Subscription(self, listener)

    def dispatch(self, event: GameEvent | str) -> tuple[list[GameEvent], bool]:
        self.config, emitted, updated = dispatch(self.chart, self.config, event)
        for ev in emitted:
            for listener in list(self._listeners):
                listener(ev)
        return emitted, updated


def subscribe(machine: Machine, listener: Callable[[GameEvent], None]) -> Subscription:
    return machine.subscribe(listener)
