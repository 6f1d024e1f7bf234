import base64
import json
import math
import struct

import numpy as np
import pytest

from escroom.errors import (MalformedGltf, UnknownNode,
                            UnsupportedExtensionRequired)
from escroom.glbwrite import GlbNode, write_glb
from escroom.gltf import (apply_gltf_hide, extract_triangles, load_gltf,
                          set_node_visibility)


def _tri_node(name, offset=(0.0, 0.0, 0.0), **kw):
    return GlbNode(name, positions=[(0, 0, 0), (1, 0, 0), (0, 0, 1)],
                   indices=[0, 1, 2], translation=offset, **kw)


def test_write_load_roundtrip(tmp_path):
    path = tmp_path / "tri.glb"
    write_glb(path, [_tri_node("solo")])
    asset = load_gltf(path)
    assert [n.name for n in asset.nodes] == ["solo"]
    tris = extract_triangles(asset)
    assert len(tris) == 1
    assert tris[0][1] == pytest.approx((1.0, 0.0, 0.0))


def test_load_from_bytes():
    data = write_glb(None, [_tri_node("mem")])
    asset = load_gltf(data)
    assert asset.triangle_count() == 1


def test_duplicate_names_renamed_in_order():
    data = write_glb(None, [_tri_node("apartmentDoor"),
                            _tri_node("apartmentDoor"),
                            _tri_node("apartmentDoor")])
    asset = load_gltf(data)
    names = [n.name for n in asset.nodes]
    assert names == ["apartmentDoor", "apartmentDoor.001",
                     "apartmentDoor.002"]


def test_node_translation_applies_to_triangles():
    data = write_glb(None, [_tri_node("moved", offset=(5.0, 1.0, -2.0))])
    tris = extract_triangles(load_gltf(data))
    assert tris[0][0] == pytest.approx((5.0, 1.0, -2.0))


def test_nested_transforms_compose():
    child = _tri_node("leaf", offset=(1.0, 0.0, 0.0))
    parent = GlbNode("base", translation=(0.0, 2.0, 0.0), children=[child])
    asset = load_gltf(write_glb(None, [parent]))
    tris = extract_triangles(asset)
    assert tris[0][0] == pytest.approx((1.0, 2.0, 0.0))


def test_rotation_quaternion():
    # 90 degrees about +Y: +X maps to -Z
    half = math.sqrt(0.5)
    node = _tri_node("spin", rotation=(0.0, half, 0.0, half))
    tris = extract_triangles(load_gltf(write_glb(None, [node])))
    assert tris[0][1] == pytest.approx((0.0, 0.0, -1.0), abs=1e-9)


def test_hide_node_removes_subtree():
    child = _tri_node("inner")
    parent = GlbNode("outer", children=[child],
                     positions=[(0, 0, 0), (1, 0, 0), (1, 0, 1)],
                     indices=[0, 1, 2])
    asset = load_gltf(write_glb(None, [parent]))
    assert len(extract_triangles(asset)) == 2
    set_node_visibility(asset, "outer", False)
    assert extract_triangles(asset) == []  # children hidden with the parent


def test_set_visibility_unknown_node():
    asset = load_gltf(write_glb(None, [_tri_node("a")]))
    with pytest.raises(UnknownNode):
        set_node_visibility(asset, "ghost", False)


def test_apply_gltf_hide_with_warnings():
    asset = load_gltf(write_glb(None, [_tri_node("door"),
                                       _tri_node("door")]))
    apply_gltf_hide(asset, {"parts": ["door", "door.001", "missing"]})
    assert extract_triangles(asset) == []
    assert any("missing" in w for w in asset.warnings)


def test_extract_from_named_root():
    a = _tri_node("roomA")
    b = _tri_node("roomB", offset=(10.0, 0.0, 0.0))
    asset = load_gltf(write_glb(None, [a, b]))
    only_b = extract_triangles(asset, root_node="roomB")
    assert len(only_b) == 1
    assert only_b[0][0][0] == pytest.approx(10.0)


def test_bad_magic_rejected():
    with pytest.raises(MalformedGltf):
        load_gltf(b"NOPE" + b"\x00" * 32)


def test_truncated_glb_rejected():
    data = write_glb(None, [_tri_node("t")])
    with pytest.raises(MalformedGltf):
        load_gltf(data[:40])


def test_required_extension_rejected():
    doc = {"asset": {"version": "2.0"},
           "extensionsRequired": ["KHR_draco_mesh_compression"],
           "scenes": [{"nodes": []}], "nodes": []}
    payload = json.dumps(doc).encode()
    pad = (-len(payload)) % 4
    payload += b" " * pad
    raw = struct.pack("<III", 0x46546C67, 2, 12 + 8 + len(payload))
    raw += struct.pack("<II", len(payload), 0x4E4F534A) + payload
    with pytest.raises(UnsupportedExtensionRequired):
        load_gltf(raw)


def test_gltf_json_with_data_uri(tmp_path):
    # plain .gltf with an embedded base64 buffer
    pos = struct.pack("<9f", 0, 0, 0, 1, 0, 0, 0, 0, 1)
    idx = struct.pack("<3H", 0, 1, 2)
    blob = pos + idx
    doc = {
        "asset": {"version": "2.0"},
        "buffers": [{"uri": "data:application/octet-stream;base64,"
                            + base64.b64encode(blob).decode(),
                     "byteLength": len(blob)}],
        "bufferViews": [
            {"buffer": 0, "byteOffset": 0, "byteLength": len(pos)},
            {"buffer": 0, "byteOffset": len(pos), "byteLength": len(idx)},
        ],
        "accessors": [
            {"bufferView": 0, "componentType": 5126, "count": 3,
             "type": "VEC3"},
            {"bufferView": 1, "componentType": 5123, "count": 3,
             "type": "SCALAR"},
        ],
        "meshes": [{"primitives": [{"attributes": {"POSITION": 0},
                                    "indices": 1}]}],
        "nodes": [{"name": "tri", "mesh": 0}],
        "scenes": [{"nodes": [0]}],
    }
    path = tmp_path / "tri.gltf"
    path.write_text(json.dumps(doc))
    asset = load_gltf(path)
    assert asset.triangle_count() == 1


def test_non_triangle_primitive_skipped_with_warning():
    doc = {
        "asset": {"version": "2.0"},
        "meshes": [{"primitives": [{"attributes": {}, "mode": 1}]}],
        "nodes": [{"name": "lines", "mesh": 0}],
        "scenes": [{"nodes": [0]}],
    }
    payload = json.dumps(doc).encode()
    payload += b" " * ((-len(payload)) % 4)
    raw = struct.pack("<III", 0x46546C67, 2, 12 + 8 + len(payload))
    raw += struct.pack("<II", len(payload), 0x4E4F534A) + payload
    asset = load_gltf(raw)
    assert asset.triangle_count() == 0
    assert asset.warnings
