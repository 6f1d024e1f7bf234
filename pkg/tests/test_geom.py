import math
import random

from hypothesis import given, strategies as st

from escroom.geom import (douglas_peucker, ear_clip, ensure_ccw, is_convex,
                          merge_convex, point_in_convex, polygon_area)


def test_polygon_area_square():
    sq = [(0, 0), (2, 0), (2, 2), (0, 2)]
    assert polygon_area(sq) == 4.0
    assert polygon_area(list(reversed(sq))) == -4.0  # signed, CCW positive


def test_ensure_ccw_flips_cw():
    cw = [(0, 0), (0, 1), (1, 1), (1, 0)]
    ccw = ensure_ccw(cw)
    assert ccw != cw
    assert ensure_ccw(ccw) == ccw


def test_point_in_convex():
    tri = [(0, 0), (4, 0), (0, 4)]
    assert point_in_convex((1, 1), tri)
    assert point_in_convex((0, 0), tri)  # boundary counts
    assert not point_in_convex((3, 3), tri)


def test_ear_clip_covers_polygon_area():
    rng = random.Random(3)
    for _ in range(30):
        # star-shaped polygon around the origin: always simple
        n = rng.randint(3, 10)
        angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
        if len(set(angles)) < n:
            continue
        poly = [(math.cos(a) * rng.uniform(1, 3),
                 math.sin(a) * rng.uniform(1, 3)) for a in angles]
        poly = ensure_ccw(poly)
        tris = ear_clip(poly)
        total = sum(polygon_area([poly[i] for i in t]) for t in tris)
        assert math.isclose(total, polygon_area(poly), rel_tol=1e-9)


def test_merge_convex_rebuilds_rectangle():
    pts = [(0, 0), (4, 0), (4, 3), (0, 3)]
    merged = merge_convex(pts, [(0, 1, 2), (0, 2, 3)])
    assert len(merged) == 1
    quad = [pts[i] for i in merged[0]]
    assert math.isclose(polygon_area(quad), 12.0)
    assert is_convex(quad)


def test_merge_convex_respects_vertex_cap():
    # an octagon triangulated: merging may stop at 6 vertices per polygon
    n = 8
    pts = [(math.cos(2 * math.pi * i / n), math.sin(2 * math.pi * i / n))
           for i in range(n)]
    merged = merge_convex(pts, ear_clip(pts))
    assert all(len(p) <= 6 for p in merged)
    assert all(is_convex([pts[i] for i in p]) for p in merged)
    total = sum(polygon_area([pts[i] for i in p]) for p in merged)
    assert math.isclose(total, polygon_area(pts), rel_tol=1e-9)


def test_douglas_peucker_straight_line_collapses():
    pts = [(float(i), 0.0) for i in range(10)]
    assert douglas_peucker(pts, 0.01) == [(0.0, 0.0), (9.0, 0.0)]


def test_douglas_peucker_keeps_corner():
    pts = [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2)]
    out = douglas_peucker(pts, 0.01)
    assert (2, 0) in out


def test_douglas_peucker_direction_independent():
    rng = random.Random(11)
    pts = [(i * 0.5, rng.uniform(-0.2, 0.2)) for i in range(20)]
    fwd = douglas_peucker(pts, 0.1)
    rev = douglas_peucker(list(reversed(pts)), 0.1)
    assert fwd == list(reversed(rev))


@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50)),
                min_size=3, max_size=12))
def test_douglas_peucker_keeps_endpoints(pts):
    out = douglas_peucker(pts, 0.5)
    assert out[0] == pts[0] and out[-1] == pts[-1]
    assert len(out) <= len(pts)
