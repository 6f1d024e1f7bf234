"""Regenerate demo/assets/apartment.glb.

Run from the repository root:

    python demo/make_assets.py

The apartment is a 10 x 5 m floor split by a wall at x=5 with a 1 m
doorway at z in [2, 3]. The doorway holds three nodes that all carry the
raw name "apartmentDoor" (a leaf and two jambs); the loader renames the
later two to apartmentDoor.001 / apartmentDoor.002 and the scene hides all
three so the baked navmesh can pass through.
"""

from pathlib import Path
import sys

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from escroom.glbwrite import GlbNode, write_glb  # noqa: E402


def quad(x0, y0, z0, x1, y1, z1, axis):
    """Axis-aligned quad; axis names the flat coordinate."""
    if axis == "y":
        pts = [(x0, y0, z0), (x1, y0, z0), (x1, y0, z1), (x0, y0, z1)]
    elif axis == "x":
        pts = [(x0, y0, z0), (x0, y1, z0), (x0, y1, z1), (x0, y0, z1)]
    else:
        pts = [(x0, y0, z0), (x1, y0, z0), (x1, y1, z0), (x0, y1, z0)]
    return pts, [0, 1, 2, 0, 2, 3]


def box(x0, y0, z0, x1, y1, z1):
    corners = [(x, y, z) for x in (x0, x1) for y in (y0, y1) for z in (z0, z1)]
    faces = [(0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1),
             (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3)]
    idx = []
    for a, b, c, d in faces:
        idx += [a, b, c, a, c, d]
    return corners, idx


def main() -> None:
    floor_pts, floor_idx = quad(0, 0, 0, 10, 0, 5, "y")
    wall_a_pts, wall_a_idx = box(4.9, 0, 0, 5.1, 2.4, 2)
    wall_b_pts, wall_b_idx = box(4.9, 0, 0, 5.1, 2.4, 2)  # shifted by node
    leaf_pts, leaf_idx = quad(5.0, 0, 2.1, 5.0, 2.1, 2.9, "x")
    jamb_a_pts, jamb_a_idx = box(4.95, 0, 2.0, 5.05, 2.1, 2.1)
    jamb_b_pts, jamb_b_idx = box(4.95, 0, 2.9, 5.05, 2.1, 3.0)

    roots = [
        GlbNode("floor", positions=floor_pts, indices=floor_idx),
        GlbNode("wallA", positions=wall_a_pts, indices=wall_a_idx),
        GlbNode("wallB", translation=(0.0, 0.0, 3.0),
                positions=wall_b_pts, indices=wall_b_idx),
        GlbNode("apartmentDoor", positions=leaf_pts, indices=leaf_idx),
        GlbNode("apartmentDoor", positions=jamb_a_pts, indices=jamb_a_idx),
        GlbNode("apartmentDoor", positions=jamb_b_pts, indices=jamb_b_idx),
    ]
    out = Path(__file__).parent / "assets" / "apartment.glb"
    out.parent.mkdir(parents=True, exist_ok=True)
    data = write_glb(out, roots)
    print(f"wrote {out} ({len(data)} bytes)")


if __name__ == "__main__":
    main()
