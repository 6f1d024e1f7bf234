from .bake import bake_navmesh
from .mesh import (Blocker, Hole, NavMesh, Portal, carve_holes,
                   constrain_move, register_blocker, set_blocker)
from .params import AgentParams, BakeSettings
from .pathfind import find_path, path_length, reachable_polys
from .voxel import VoxelField, flood_reachable, rasterize

__all__ = [
    "AgentParams", "BakeSettings", "Blocker", "Hole", "NavMesh", "Portal",
    "VoxelField", "bake_navmesh", "carve_holes", "constrain_move",
    "find_path", "flood_reachable", "path_length", "rasterize",
    "reachable_polys", "register_blocker", "set_blocker",
]
