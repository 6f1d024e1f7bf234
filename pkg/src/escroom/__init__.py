"""Headless engine for room-escape scenes written as declarative markup.

The pieces: an HTML-like scene parser, a hierarchical statechart compiled
from ``game-state`` components, a voxel-baked walkable-surface mesh with
toggleable barriers, text panel layout with ray hit testing, a countdown
clock, and a world loop that ties them together behind the ``escroom`` CLI.
"""

from .errors import (AssetError, EscroomError, MarkupError, NavMeshError,
                     PanelError, StateChartError, WorldError)
from .gltf import apply_gltf_hide, extract_triangles, load_gltf
from .markup import (ComponentMap, Entity, SceneDocument, Selector,
                     parse_component_map, parse_scene, query_select,
                     serialize_scene)
from .navmesh import (AgentParams, BakeSettings, Hole, NavMesh, bake_navmesh,
                      carve_holes, constrain_move, find_path, path_length,
                      set_blocker)
from .panel import (ClockState, LayoutBox, PanelLayout, clock_tick,
                    dispatch_pointer, hit_test, layout_panel,
                    serialize_layout)
from .statechart import (GAME_STATE_EVENT, GAME_STATE_UPDATED, GameEvent,
                         Machine, StateChart, StateConfiguration,
                         build_statechart, dispatch, initial_configuration,
                         state_matches, visibility_for)
from .world import (FrameReport, SolutionScript, StateBinding, World,
                    assemble_world, check_solvable, run_script, step)

__version__ = "0.1.0"

__all__ = [
    "AgentParams", "AssetError", "BakeSettings", "ClockState",
    "ComponentMap", "Entity", "EscroomError", "FrameReport",
    "GAME_STATE_EVENT", "GAME_STATE_UPDATED", "GameEvent", "Hole",
    "LayoutBox", "Machine", "MarkupError", "NavMesh", "NavMeshError",
    "PanelError", "PanelLayout", "SceneDocument", "Selector",
    "SolutionScript", "StateBinding", "StateChart", "StateChartError",
    "StateConfiguration", "World", "WorldError", "apply_gltf_hide",
    "assemble_world", "bake_navmesh", "build_statechart", "carve_holes",
    "check_solvable", "clock_tick", "constrain_move", "dispatch",
    "dispatch_pointer", "extract_triangles", "find_path", "hit_test",
    "initial_configuration", "layout_panel", "load_gltf",
    "parse_component_map", "parse_scene", "path_length", "query_select",
    "run_script", "serialize_layout", "serialize_scene", "set_blocker",
    "state_matches", "step", "visibility_for",
]
