"""Exception hierarchy for the escroom engine.

Every error raised by the engine derives from EscroomError so the CLI can
catch one type and turn it into a diagnostic with a nonzero exit code.
"""

from __future__ import annotations


class EscroomError(Exception):
    """Base class for all engine errors."""


# --- scene markup ---------------------------------------------------------

class MarkupError(EscroomError):
    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


class UnbalancedTag(MarkupError):
    pass


class DuplicateId(MarkupError):
    def __init__(self, entity_id: str, line: int):
        super().__init__(f"duplicate id {entity_id!r}", line)
        self.entity_id = entity_id


class MalformedAttribute(MarkupError):
    pass


class EmptyKey(EscroomError):
    """A component clause has a ':' but nothing before it."""

    def __init__(self, position: int):
        super().__init__(f"empty key in component clause at position {position}")
        self.position = position


# --- statechart -----------------------------------------------------------

class StateChartError(EscroomError):
    pass


class UnknownRoom(StateChartError):
    def __init__(self, puzzle: str, room: str):
        super().__init__(f"puzzle {puzzle!r} references unknown room {room!r}")
        self.puzzle = puzzle
        self.room = room


class DuplicateStateName(StateChartError):
    def __init__(self, name: str):
        super().__init__(f"duplicate state name {name!r}")
        self.name = name


class MissingType(StateChartError):
    def __init__(self, entity_id: str):
        super().__init__(f"game-state entity {entity_id!r} has no 'type' key")
        self.entity_id = entity_id


class MissingStateKey(StateChartError):
    def __init__(self) -> None:
        super().__init__("hide-in-state spec has no 'state' key")


# --- navmesh ---------------------------------------------------------------

class NavMeshError(EscroomError):
    pass


class NoWalkableSurface(NavMeshError):
    def __init__(self, detail: str = "no walkable surface after filtering"):
        super().__init__(detail)


class PrevOffMesh(NavMeshError):
    def __init__(self, point) -> None:
        super().__init__(f"previous position {tuple(point)} is not on the mesh")
        self.point = tuple(point)


class UnknownBlocker(NavMeshError):
    def __init__(self, blocker_id: str):
        super().__init__(f"unknown blocker {blocker_id!r}")
        self.blocker_id = blocker_id


class Unreachable(NavMeshError):
    def __init__(self, a, b) -> None:
        super().__init__(f"no path between {tuple(a)} and {tuple(b)}")
        self.a = tuple(a)
        self.b = tuple(b)


# --- gltf assets -----------------------------------------------------------

class AssetError(EscroomError):
    pass


class MalformedGltf(AssetError):
    pass


class UnsupportedExtensionRequired(AssetError):
    def __init__(self, name: str):
        super().__init__(f"asset requires unsupported extension {name!r}")
        self.name = name


class UnknownNode(AssetError):
    def __init__(self, name: str):
        super().__init__(f"unknown node {name!r}")
        self.name = name


# --- panels ----------------------------------------------------------------

class PanelError(EscroomError):
    pass


class UnsupportedElement(PanelError):
    def __init__(self, tag: str):
        super().__init__(f"unsupported element <{tag}> inside panel")
        self.tag = tag


# --- world / runtime -------------------------------------------------------

class WorldError(EscroomError):
    pass


class MissingSpawn(WorldError):
    def __init__(self) -> None:
        super().__init__("no player spawn: scene has no entity with a navmesh constraint")


class PuzzleWithoutPosition(WorldError):
    def __init__(self, entity_id: str):
        super().__init__(f"puzzle entity {entity_id!r} has no position")
        self.entity_id = entity_id


class SceneAssemblyError(WorldError):
    """Aggregates assemble-time failures with file context."""

    def __init__(self, path: str, problems: list[str]):
        joined = "; ".join(problems)
        super().__init__(f"{path}: {joined}")
        self.path = path
        self.problems = problems
