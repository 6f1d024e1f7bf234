"""GLTF 2.0 loading for the headless core.

Only geometry and node names matter here: POSITION attributes, index
buffers, and node transforms. Materials, skins, animations, and textures
are accepted in the input but ignored. Supports .glb containers and .gltf
with external or data-URI buffers.
"""

from __future__ import annotations

import base64
import json
import logging
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MalformedGltf, UnknownNode, UnsupportedExtensionRequired

log = logging.getLogger("escroom.gltf")

_GLB_MAGIC = 0x46546C67
_CHUNK_JSON = 0x4E4F534A
_CHUNK_BIN = 0x004E4942

_COMPONENT_DTYPES = {
    5120: np.int8, 5121: np.uint8, 5122: np.int16,
    5123: np.uint16, 5125: np.uint32, 5126: np.float32,
}
_TYPE_SIZES = {"SCALAR": 1, "VEC2": 2, "VEC3": 3, "VEC4": 4, "MAT4": 16}


@dataclass
class Primitive:
    positions: np.ndarray  # (n, 3) float64
    indices: np.ndarray    # (m,) int64, length divisible by 3


@dataclass
class Node:
    name: str
    index: int
    mesh: int | None
    children: list[int]
    matrix: np.ndarray  # 4x4 local transform


@dataclass
class Asset:
    nodes: list[Node]
    roots: list[int]
    meshes: list[list[Primitive]]
    visibility: dict[str, bool]
    by_name: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def node(self, name: str) -> Node:
        if name not in self.by_name:
            raise UnknownNode(name)
        return self.nodes[self.by_name[name]]

    def triangle_count(self) -> int:
        return sum(len(prim.indices) // 3
                   for mesh in self.meshes for prim in mesh)


def load_gltf(source: str | Path | bytes) -> Asset:
    """Load a .glb or .gltf file (or raw bytes of either)."""
    base_dir: Path | None = None
    if isinstance(source, (str, Path)):
        path = Path(source)
        base_dir = path.parent
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise MalformedGltf(f"cannot read {path}: {exc}") from exc
    else:
        raw = source

    if raw[:4] == b"glTF":
        doc, bin_chunk = _parse_glb(raw)
    else:
        try:
            doc = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise MalformedGltf(f"not JSON or GLB: {exc}") from exc
        bin_chunk = None
    return _build_asset(doc, bin_chunk, base_dir)


def extract_triangles(asset: Asset, root_node: str | None = None
                      ) -> list[tuple[tuple[float, float, float], ...]]:
    """World-space triangles from visible nodes, depth-first order.

    A hidden node hides its whole subtree. With root_node the traversal
    starts there (its own world transform included).
    """
    if root_node is not None:
        start_nodes = [asset.node(root_node).index]
        base = _world_matrix(asset, start_nodes[0])
        stack = [(start_nodes[0], base)]
        # The named root itself obeys visibility too.
    else:
        identity = np.eye(4)
        stack = [(i, identity) for i in reversed(asset.roots)]

    out: list[tuple] = []
    while stack:
        index, parent = stack.pop()
        node = asset.nodes[index]
        if not asset.visibility.get(node.name, True):
            continue
        world = parent @ node.matrix
        if node.mesh is not None:
            for prim in asset.meshes[node.mesh]:
                pts = (prim.positions @ world[:3, :3].T + world[:3, 3]).tolist()
                idx = prim.indices
                for t in range(0, len(idx), 3):
                    out.append((tuple(pts[idx[t]]), tuple(pts[idx[t + 1]]),
                                tuple(pts[idx[t + 2]])))
        for child in reversed(node.children):
            stack.append((child, world))
    return out


def apply_gltf_hide(asset: Asset, spec: dict) -> Asset:
    """Hide the nodes listed in the component's `parts`; unknown names only
    warn since asset packs vary."""
    parts = spec.get("parts", [])
    if isinstance(parts, str):
        parts = [parts] if parts else []
    for name in parts:
        name = str(name).strip()
        if not name:
            continue
        if name in asset.visibility:
            asset.visibility[name] = False
        else:
            message = f"gltf-hide: no node named {name!r}"
            asset.warnings.append(message)
            log.warning(message)
    return asset


def set_node_visibility(asset: Asset, name: str, visible: bool) -> None:
    if name not in asset.visibility:
        raise UnknownNode(name)
    asset.visibility[name] = visible


# -- internals ---------------------------------------------------------------

def _parse_glb(raw: bytes):
    if len(raw) < 12:
        raise MalformedGltf("GLB shorter than its header")
    magic, version, length = struct.unpack_from("<III", raw, 0)
    if magic != _GLB_MAGIC:
        raise MalformedGltf("bad GLB magic")
    if version != 2:
        raise MalformedGltf(f"unsupported GLB version {version}")
    if length > len(raw):
        raise MalformedGltf("GLB length field exceeds data")
    offset = 12
    doc = None
    bin_chunk = None
    while offset + 8 <= length:
        chunk_len, chunk_type = struct.unpack_from("<II", raw, offset)
        offset += 8
        if offset + chunk_len > length:
            raise MalformedGltf("GLB chunk overruns file")
        data = raw[offset:offset + chunk_len]
        offset += chunk_len + (-chunk_len % 4)
        if chunk_type == _CHUNK_JSON and doc is None:
            try:
                doc = json.loads(data.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise MalformedGltf(f"bad JSON chunk: {exc}") from exc
        elif chunk_type == _CHUNK_BIN and bin_chunk is None:
            bin_chunk = data
    if doc is None:
        raise MalformedGltf("GLB has no JSON chunk")
    return doc, bin_chunk


def _load_buffers(doc, bin_chunk, base_dir):
    buffers = []
    for i, buf in enumerate(doc.get("buffers", [])):
        uri = buf.get("uri")
        if uri is None:
            if bin_chunk is None:
                raise MalformedGltf(f"buffer {i} has no uri and no BIN chunk")
            buffers.append(bin_chunk)
        elif uri.startswith("data:"):
            try:
                buffers.append(base64.b64decode(uri.split(",", 1)[1]))
            except (IndexError, ValueError) as exc:
                raise MalformedGltf(f"bad data URI in buffer {i}") from exc
        else:
            if base_dir is None:
                raise MalformedGltf(
                    f"buffer {i} references {uri!r} but input was raw bytes")
            try:
                buffers.append((base_dir / uri).read_bytes())
            except OSError as exc:
                raise MalformedGltf(f"cannot read buffer {uri!r}: {exc}") from exc
        if len(buffers[-1]) < buf.get("byteLength", 0):
            raise MalformedGltf(f"buffer {i} shorter than declared")
    return buffers


def _read_accessor(doc, buffers, index) -> np.ndarray:
    try:
        acc = doc["accessors"][index]
    except (KeyError, IndexError) as exc:
        raise MalformedGltf(f"missing accessor {index}") from exc
    if "sparse" in acc:
        raise MalformedGltf("sparse accessors are not supported")
    dtype = _COMPONENT_DTYPES.get(acc.get("componentType"))
    width = _TYPE_SIZES.get(acc.get("type"))
    if dtype is None or width is None:
        raise MalformedGltf(f"accessor {index} has unsupported layout")
    count = acc.get("count", 0)
    view_idx = acc.get("bufferView")
    if view_idx is None:
        return np.zeros((count, width) if width > 1 else count, dtype=dtype)
    try:
        view = doc["bufferViews"][view_idx]
        data = buffers[view.get("buffer", 0)]
    except (KeyError, IndexError) as exc:
        raise MalformedGltf(f"accessor {index} has no backing data") from exc
    start = view.get("byteOffset", 0) + acc.get("byteOffset", 0)
    item = np.dtype(dtype).itemsize
    stride = view.get("byteStride") or item * width
    end = start + stride * (count - 1) + item * width if count else start
    if end > len(data):
        raise MalformedGltf(f"accessor {index} overruns its buffer")
    if stride == item * width:
        arr = np.frombuffer(data, dtype=dtype, count=count * width,
                            offset=start)
    else:
        rows = [np.frombuffer(data, dtype=dtype, count=width,
                              offset=start + stride * k)
                for k in range(count)]
        arr = np.concatenate(rows) if rows else np.empty(0, dtype=dtype)
    return arr.reshape(count, width) if width > 1 else arr


def _node_matrix(spec) -> np.ndarray:
    if "matrix" in spec:
        return np.array(spec["matrix"], dtype=float).reshape(4, 4).T
    m = np.eye(4)
    if "scale" in spec:
        m[:3, :3] = np.diag(spec["scale"])
    if "rotation" in spec:
        m = _quat_matrix(spec["rotation"]) @ m
    if "translation" in spec:
        t = np.eye(4)
        t[:3, 3] = spec["translation"]
        m = t @ m
    return m


def _quat_matrix(q) -> np.ndarray:
    x, y, z, w = (float(c) for c in q)
    n = math.sqrt(x * x + y * y + z * z + w * w) or 1.0
    x, y, z, w = x / n, y / n, z / n, w / n
    m = np.eye(4)
    m[:3, :3] = [
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ]
    return m


def _build_asset(doc, bin_chunk, base_dir) -> Asset:
    required = doc.get("extensionsRequired") or []
    if required:
        raise UnsupportedExtensionRequired(required[0])
    buffers = _load_buffers(doc, bin_chunk, base_dir)
    warnings: list[str] = []

    meshes: list[list[Primitive]] = []
    for mi, mesh in enumerate(doc.get("meshes", [])):
        prims: list[Primitive] = []
        for prim in mesh.get("primitives", []):
            mode = prim.get("mode", 4)
            if mode != 4:
                warnings.append(
                    f"mesh {mi}: skipped non-triangle primitive mode {mode}")
                log.warning("mesh %d: skipping non-triangle primitive mode %d",
                            mi, mode)
                continue
            pos_idx = prim.get("attributes", {}).get("POSITION")
            if pos_idx is None:
                continue
            positions = _read_accessor(doc, buffers, pos_idx).astype(float)
            if positions.ndim != 2 or positions.shape[1] != 3:
                raise MalformedGltf(f"mesh {mi}: POSITION is not vec3")
            if "indices" in prim:
                indices = _read_accessor(doc, buffers,
                                         prim["indices"]).astype(np.int64)
            else:
                indices = np.arange(len(positions), dtype=np.int64)
            indices = indices[:len(indices) - len(indices) % 3]
            if len(indices) and indices.max() >= len(positions):
                raise MalformedGltf(f"mesh {mi}: index out of range")
            prims.append(Primitive(positions, indices))
        meshes.append(prims)

    nodes: list[Node] = []
    seen_names: dict[str, int] = {}
    for i, spec in enumerate(doc.get("nodes", [])):
        raw_name = spec.get("name") or f"node{i}"
        count = seen_names.get(raw_name, 0)
        seen_names[raw_name] = count + 1
        name = raw_name if count == 0 else f"{raw_name}.{count:03d}"
        mesh = spec.get("mesh")
        if mesh is not None and not 0 <= mesh < len(meshes):
            raise MalformedGltf(f"node {i} references missing mesh {mesh}")
        nodes.append(Node(name, i, mesh, list(spec.get("children", [])),
                          _node_matrix(spec)))
    for node in nodes:
        for child in node.children:
            if not 0 <= child < len(nodes):
                raise MalformedGltf(f"node {node.index} has bad child {child}")

    children = {c for n in nodes for c in n.children}
    scenes = doc.get("scenes")
    if scenes:
        scene = scenes[doc.get("scene", 0)]
        roots = [i for i in scene.get("nodes", []) if 0 <= i < len(nodes)]
    else:
        roots = [n.index for n in nodes if n.index not in children]

    return Asset(
        nodes=nodes,
        roots=roots,
        meshes=meshes,
        visibility={n.name: True for n in nodes},
        by_name={n.name: n.index for n in nodes},
        warnings=warnings,
    )


def _world_matrix(asset: Asset, index: int) -> np.ndarray:
    parents: dict[int, int] = {}
    for node in asset.nodes:
        for child in node.children:
            parents[child] = node.index
    chain = []
    cur = index
    while cur in parents:
        cur = parents[cur]
        chain.append(cur)
    world = np.eye(4)
    for i in reversed(chain):
        world = world @ asset.nodes[i].matrix
    return world
