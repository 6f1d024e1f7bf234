"""Minimal GLB writer used to author test fixtures and demo assets.

Covers exactly what the loader consumes: named nodes with TRS transforms,
one triangle primitive per mesh (float32 positions, uint32 indices), and a
single embedded binary buffer.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field


@dataclass
class GlbNode:
    name: str
    translation: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rotation: tuple[float, float, float, float] | None = None  # quat xyzw
    scale: tuple[float, float, float] | None = None
    positions: list[tuple[float, float, float]] = field(default_factory=list)
    indices: list[int] = field(default_factory=list)
    children: list["GlbNode"] = field(default_factory=list)


def write_glb(path, roots: list[GlbNode]) -> bytes:
    """Serialize the node trees to path (if given) and return the bytes."""
    binary = bytearray()
    views = []
    accessors = []
    meshes = []
    nodes = []

    def add_view(data: bytes, target: int) -> int:
        offset = len(binary)
        binary.extend(data)
        while len(binary) % 4:
            binary.append(0)
        views.append({"buffer": 0, "byteOffset": offset,
                      "byteLength": len(data), "target": target})
        return len(views) - 1

    def add_node(node: GlbNode) -> int:
        spec: dict = {"name": node.name}
        if node.translation != (0.0, 0.0, 0.0):
            spec["translation"] = list(node.translation)
        if node.rotation is not None:
            spec["rotation"] = list(node.rotation)
        if node.scale is not None:
            spec["scale"] = list(node.scale)
        if node.positions:
            pos = node.positions
            idx = node.indices or list(range(len(pos)))
            pos_bytes = struct.pack(f"<{len(pos) * 3}f",
                                    *(c for p in pos for c in p))
            idx_bytes = struct.pack(f"<{len(idx)}I", *idx)
            pv = add_view(pos_bytes, 34962)
            iv = add_view(idx_bytes, 34963)
            mins = [min(p[i] for p in pos) for i in range(3)]
            maxs = [max(p[i] for p in pos) for i in range(3)]
            accessors.append({"bufferView": pv, "componentType": 5126,
                              "count": len(pos), "type": "VEC3",
                              "min": mins, "max": maxs})
            accessors.append({"bufferView": iv, "componentType": 5125,
                              "count": len(idx), "type": "SCALAR"})
            meshes.append({"name": node.name,
                           "primitives": [{"attributes":
                                           {"POSITION": len(accessors) - 2},
                                           "indices": len(accessors) - 1}]})
            spec["mesh"] = len(meshes) - 1
        my_index = len(nodes)
        nodes.append(spec)
        child_ids = [add_node(c) for c in node.children]
        if child_ids:
            spec["children"] = child_ids
        return my_index

    root_ids = [add_node(r) for r in roots]
    doc = {
        "asset": {"version": "2.0", "generator": "escroom-glbwrite"},
        "buffers": [{"byteLength": len(binary)}],
        "bufferViews": views,
        "accessors": accessors,
        "meshes": meshes,
        "nodes": nodes,
        "scenes": [{"nodes": root_ids}],
        "scene": 0,
    }
    for key in ("bufferViews", "accessors", "meshes"):
        if not doc[key]:
            del doc[key]

    payload = json.dumps(doc, separators=(",", ":"), sort_keys=True).encode()
    while len(payload) % 4:
        payload += b" "
    total = 12 + 8 + len(payload) + (8 + len(binary) if binary else 0)
    out = bytearray()
    out += struct.pack("<III", 0x46546C67, 2, total)
    out += struct.pack("<II", len(payload), 0x4E4F534A)
    out += payload
    if binary:
        out += struct.pack("<II", len(binary), 0x004E4942)
        out += binary
    data = bytes(out)
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(data)
    return data
