"""Shortest paths over the mesh: A* across portals, then funnel smoothing."""

from __future__ import annotations

import heapq
import itertools
import math

from ..errors import Unreachable
from ..geom import Vec2, Vec3, area2
from .mesh import NavMesh, _closest_on_segment


def find_path(mesh: NavMesh, a, b) -> list[Vec3]:
    """Waypoints from a to b across active polygons.

    Both endpoints snap to the nearest active polygon first. Raises
    Unreachable when no connected corridor exists.
    """
    pa, sa = mesh.nearest_active(a)
    pb, sb = mesh.nearest_active(b)
    if pa is None or pb is None:
        raise Unreachable(tuple(a), tuple(b))
    start = (sa[0], mesh.surface_y(pa, *sa), sa[1])
    goal = (sb[0], mesh.surface_y(pb, *sb), sb[1])
    if pa == pb:
        if math.hypot(goal[0] - start[0], goal[2] - start[2]) <= 1e-12:
            return [start]
        return [start, goal]

    best: list[Vec3] | None = None
    best_len = math.inf
    for corridor in _corridors(mesh, pa, pb, sa, sb):
        pts = _funnel(start, goal, _oriented_portals(mesh, corridor, start, goal))
        length = path_length(pts)
        if length < best_len - 1e-12:
            best, best_len = pts, length
    if best is None:
        raise Unreachable(tuple(a), tuple(b))
    return best


def path_length(points: list[Vec3]) -> float:
    total = 0.0
    for p, q in zip(points, points[1:]):
        total += math.hypot(q[0] - p[0], q[2] - p[2])
    return total


def reachable_polys(mesh: NavMesh, start: int) -> set[int]:
    """Active polygons reachable from start through open portals."""
    if not mesh.is_active(start):
        return set()
    seen = {start}
    frontier = [start]
    while frontier:
        pi = frontier.pop()
        for ei in range(len(mesh.polygons[pi])):
            for portal in mesh.adjacency.get((pi, ei), ()):
                if portal.neighbor not in seen and mesh.is_active(portal.neighbor):
                    seen.add(portal.neighbor)
                    frontier.append(portal.neighbor)
    return seen


def _corridors(mesh: NavMesh, pa: int, pb: int, sa: Vec2, sb: Vec2,
               k: int = 6, cap: int = 20000):
    """Up to k portal corridors from pa to pb, cheapest-looking first.

    The estimate walks closest points on successive portals, which ranks
    corridors far better than portal midpoints but is still not the funnel
    length, so several candidates per portal are kept alive and the caller
    smooths each one and takes the shortest.
    """
    order = itertools.count()
    heap: list = []

    def push(g: float, at: Vec2, poly: int, corridor: tuple, seen: frozenset):
        h = math.hypot(sb[0] - at[0], sb[1] - at[1])
        heapq.heappush(heap, (g + h, next(order), g, at, poly, corridor, seen))

    push(0.0, sa, pa, (), frozenset((pa,)))
    labels: dict[tuple[int, int], list[float]] = {}
    found = 0
    expanded = 0
    while heap and found < k and expanded < cap:
        _, _, g, at, poly, corridor, seen = heapq.heappop(heap)
        if poly == pb:
            found += 1
            yield corridor
            continue
        expanded += 1
        for ei in range(len(mesh.polygons[poly])):
            for portal in mesh.adjacency.get((poly, ei), ()):
                nb = portal.neighbor
                if nb in seen or not mesh.is_active(nb):
                    continue
                step = _closest_on_segment(at, (portal.a[0], portal.a[2]),
                                           (portal.b[0], portal.b[2]))
                ng = g + math.hypot(step[0] - at[0], step[1] - at[1])
                tier = labels.setdefault((poly, nb), [])
                if len(tier) >= k and ng >= tier[-1] - 1e-12:
                    continue
                tier.append(ng)
                tier.sort()
                del tier[k:]
                push(ng, step, nb, corridor + (portal,), seen | {nb})


def _oriented_portals(mesh: NavMesh, corridor, start: Vec3, goal: Vec3):
    """Portal endpoint pairs ordered (left, right) along the walk."""
    portals = []
    prev = (start[0], start[2])
    for portal in corridor:
        e0 = portal.a
        e1 = portal.b
        mid = (0.5 * (e0[0] + e1[0]), 0.5 * (e0[2] + e1[2]))
        if area2(prev, mid, (e0[0], e0[2])) > 0:
            left, right = e0, e1
        else:
            left, right = e1, e0
        portals.append((left, right))
        prev = mid
    portals.append((goal, goal))
    return portals


def _funnel(start: Vec3, goal: Vec3, portals) -> list[Vec3]:
    """Simple stupid funnel over (left, right) portal pairs."""

    def p2(p):
        return (p[0], p[2])

    def veq(a, b):
        return math.hypot(a[0] - b[0], a[2] - b[2]) <= 1e-9

    chain = [(start, start)] + list(portals)
    pts = [start]
    apex = left = right = start
    apex_i = left_i = right_i = 0
    i = 1
    while i < len(chain):
        nl, nr = chain[i]
        # Walker-left means positive area2 in plan view, so the funnel
        # narrows right when the candidate is not left of the right edge.
        if area2(p2(apex), p2(right), p2(nr)) >= 0:
            if veq(apex, right) or area2(p2(apex), p2(left), p2(nr)) < 0:
                right = nr
                right_i = i
            else:
                # Right swept past left: the left corner becomes the apex.
                if not veq(pts[-1], left):
                    pts.append(left)
                apex = left
                apex_i = left_i
                left = right = apex
                left_i = right_i = apex_i
                i = apex_i + 1
                continue
        if area2(p2(apex), p2(left), p2(nl)) <= 0:
            if veq(apex, left) or area2(p2(apex), p2(right), p2(nl)) > 0:
                left = nl
                left_i = i
            else:
                if not veq(pts[-1], right):
                    pts.append(right)
                apex = right
                apex_i = right_i
                left = right = apex
                left_i = right_i = apex_i
                i = apex_i + 1
                continue
        i += 1
    if not veq(pts[-1], goal):
        pts.append(goal)
    return pts
