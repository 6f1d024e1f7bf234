"""Regenerate the viewer test fixtures from the engine.

Run from the repository root after any engine change that affects wire
formats:

    python3 frontend/scripts/make-fixtures.py

Each fixture is a real engine artifact: transcripts pair the exact inputs
fed to ``World.step`` with the report it returned, so the viewer tests can
replay them and prove the viewer adds nothing of its own.
"""

from __future__ import annotations

import contextlib
import io
import json
import math
from pathlib import Path

import numpy as np

from escroom.cli import main
from escroom.navmesh import find_path
from escroom.panel import box_center_world
from escroom.world import WALK_SPEED, assemble_world, parse_vec3

ROOT = Path(__file__).resolve().parents[2]
DEMO = ROOT / "demo"
OUT = ROOT / "frontend" / "test" / "fixtures"

DT = 0.1


def r6(value: float) -> float:
    return round(float(value), 6)


def record(world, inputs, frames):
    report = world.step(DT, inputs)
    frames.append({"inputs": inputs, "report": report.to_json()})
    return report


def walk_to(world, target, frames, limit=600):
    """Feed per-tick move inputs along the planned path, recording each."""
    for _ in range(limit):
        path = find_path(world.mesh, world.player, target)
        # Aim past funnel corners the player already stands on, else the
        # move rounds to zero and the walk never advances.
        step = next(
            (
                p
                for p in path[1:]
                if math.hypot(p[0] - path[0][0], p[2] - path[0][2]) > 0.01
            ),
            None,
        )
        if step is None:
            break
        dx = step[0] - path[0][0]
        dz = step[2] - path[0][2]
        span = math.hypot(dx, dz)
        scale = min(1.0, WALK_SPEED * DT / span)
        record(world, [{"move": [r6(dx * scale), r6(dz * scale)]}], frames)
        gx, gz = target[0], target[2]
        if math.hypot(world.player[0] - gx, world.player[2] - gz) < 0.35:
            break


def apartment_transcript():
    world = assemble_world(DEMO / "apartment.html")
    frames = []
    record(world, [{"emit": "loaded"}], frames)
    for puzzle in ("puzzle1", "puzzle2"):
        target = parse_vec3(world.doc.get(puzzle).attr("position"))
        walk_to(world, target, frames)
        record(world, [{"emit": f"solved:{puzzle}"}], frames)
    record(world, [], frames)
    states = frames[-1]["report"]["state"]
    assert "escaped" in states, f"transcript did not escape: {states}"
    return {"scene": "apartment.html", "dt": DT, "frames": frames}


def lobby_click_transcript():
    world = assemble_world(DEMO / "index.html")
    layout = world.panels["lobbyPanel"]
    pose = world.panel_poses["lobbyPanel"]
    anchor_box = next(
        b for b in layout.root.iter_boxes()
        if getattr(b.source, "tag", None) == "a")
    center = box_center_world(layout, anchor_box, pose)
    normal = pose[:3, :3] @ np.array([0.0, 0.0, 1.0])
    origin = [r6(c) for c in center + normal]
    direction = [r6(c) for c in -normal]

    frames = []
    record(world, [{"emit": "loaded"}], frames)
    record(world, [{"pointer": {"origin": origin, "direction": direction,
                                "action": "hover"}}], frames)
    report = record(world, [{"pointer": {"origin": origin,
                                         "direction": direction,
                                         "action": "click"}}], frames)
    names = [e.name for e in report.events]
    assert names.count("navigate") == 1, f"expected one navigate, got {names}"
    return {"scene": "index.html", "dt": DT, "frames": frames}


def main_():
    OUT.mkdir(parents=True, exist_ok=True)

    code = main(["bake", str(DEMO / "apartment.html"),
                 "-o", str(OUT / "apartment.navmesh.json")])
    assert code == 0

    buffer = io.StringIO()
    with contextlib.redirect_stdout(buffer):
        code = main(["validate", str(DEMO / "apartment.html"), "--json"])
    assert code == 0
    (OUT / "apartment.validate.json").write_text(buffer.getvalue())

    (OUT / "apartment.trace.json").write_text(
        json.dumps(apartment_transcript(), indent=1, sort_keys=True))
    (OUT / "lobby-click.trace.json").write_text(
        json.dumps(lobby_click_transcript(), indent=1, sort_keys=True))
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main_()
