"""Command line front end.

Exit codes:
  0  the command's claim holds (scene valid / bake written / run escaped)
  1  the claim does not hold (problems found, or the run did not escape)
  2  bad invocation: unknown arguments or unreadable input files
  3  unexpected internal error
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from functools import partial
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .errors import EscroomError, SceneAssemblyError
from .world import SolutionScript, assemble_world, run_script

log = logging.getLogger("escroom.cli")

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
               "info": logging.INFO, "debug": logging.DEBUG}


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except EscroomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        log.exception("internal error")
        return 3


def _configure_logging() -> None:
    name = os.environ.get("ESCROOM_LOG", "warn").lower()
    level = _LOG_LEVELS.get(name, logging.WARNING)
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="escroom",
        description="Headless engine for room-escape scenes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a scene and its solvability")
    p.add_argument("scene")
    p.add_argument("--json", action="store_true", dest="as_json")
    p.add_argument("--max-depth", type=int, default=64)
    p.add_argument("--z-up", action="store_true")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("bake", help="bake and export the navmesh")
    p.add_argument("scene")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--z-up", action="store_true")
    p.set_defaults(func=_cmd_bake)

    p = sub.add_parser("simulate", help="run a solution script")
    p.add_argument("scene")
    p.add_argument("--script", required=True)
    p.add_argument("--report")
    p.add_argument("--dt", type=float, default=0.1)
    p.add_argument("--z-up", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("serve", help="serve a directory of static files")
    p.add_argument("directory")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=_cmd_serve)
    return parser


def _require_file(path: str) -> Path | None:
    p = Path(path)
    if not p.is_file():
        print(f"error: no such file: {path}", file=sys.stderr)
        return None
    return p


def _scene_report(args) -> tuple[dict, int]:
    report: dict = {"scene": args.scene, "ok": False, "problems": []}
    try:
        world = assemble_world(args.scene, z_up=args.z_up)
    except SceneAssemblyError as exc:
        report["problems"] = exc.problems
        return report, 1

    rooms, puzzles = [], []
    for entity in world.doc.walk():
        cmap = entity.component("game-state")
        if cmap is None:
            continue
        name = str(cmap.get("name") or entity.id or "")
        if cmap.get("type") == "room":
            rooms.append(name)
        elif cmap.get("type") == "puzzle":
            puzzles.append(name)
    report.update({
        "rooms": rooms,
        "puzzles": puzzles,
        "navmesh": {
            "polygons": len(world.mesh.polygons),
            "area": round(world.mesh.area(), 3),
            "blockers": sorted(world.mesh.blockers),
        },
        "panels": sorted(world.panels),
        "clock": world.clock.duration if world.clock else None,
        "solvable": None,
    })
    if puzzles:
        try:
            result = world.check_solvable(args.max_depth)
        except EscroomError as exc:
            report["problems"].append(str(exc))
            return report, 1
        report["solvable"] = result["solvable"]
        report["witness"] = result.get("witness")
        report["explored"] = result.get("explored")
        if not result["solvable"]:
            report["problems"].append(
                f"room cannot be escaped (explored {result['explored']} "
                f"states, depth limit {result['max_depth']})")
            return report, 1
    report["ok"] = True
    return report, 0


def _cmd_validate(args) -> int:
    if _require_file(args.scene) is None:
        return 2
    report, code = _scene_report(args)
    if args.as_json:
        print(json.dumps(report, indent=2, sort_keys=True))
        return code
    for problem in report["problems"]:
        print(f"problem: {problem}")
    if "rooms" in report:
        print(f"rooms ({len(report['rooms'])}): "
              + (", ".join(report["rooms"]) or "-"))
        print(f"puzzles ({len(report['puzzles'])}): "
              + (", ".join(report["puzzles"]) or "-"))
        nav = report["navmesh"]
        blockers = ", ".join(nav["blockers"]) or "-"
        print(f"navmesh: {nav['polygons']} polygons, {nav['area']} m^2, "
              f"blockers: {blockers}")
        print(f"panels ({len(report['panels'])}): "
              + (", ".join(report["panels"]) or "-"))
        if report["clock"] is not None:
            total = int(report["clock"])
            print(f"clock: {total // 60:02d}:{total % 60:02d}")
        if report["solvable"] is not None:
            verdict = "yes" if report["solvable"] else "no"
            print(f"solvable: {verdict}")
    print("ok" if report["ok"] else "invalid")
    return code


def _cmd_bake(args) -> int:
    if _require_file(args.scene) is None:
        return 2
    world = assemble_world(args.scene, z_up=args.z_up)
    Path(args.output).write_text(world.mesh.dumps())
    print(f"wrote {args.output}: {len(world.mesh.polygons)} polygons, "
          f"{world.mesh.area():.3f} m^2")
    return 0


def _cmd_simulate(args) -> int:
    if _require_file(args.scene) is None or _require_file(args.script) is None:
        return 2
    try:
        script = SolutionScript.from_json(Path(args.script).read_text())
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: bad script: {exc}", file=sys.stderr)
        return 2
    world = assemble_world(args.scene, z_up=args.z_up)
    reports = run_script(world, script, dt=args.dt)
    if args.report:
        payload = [r.to_json() for r in reports]
        Path(args.report).write_text(json.dumps(payload, sort_keys=True))
    escaped = "escaped" in world.config.active_paths
    outcome = "escaped" if escaped else (
        "failed" if "failed" in world.config.active_paths else "incomplete")
    print(f"{outcome} after {world.time:.1f}s ({len(reports)} steps)")
    for report in reports:
        for err in report.errors:
            print(f"step {report.step}: {err}", file=sys.stderr)
    return 0 if escaped else 1


class _Handler(SimpleHTTPRequestHandler):
    extensions_map = {
        **SimpleHTTPRequestHandler.extensions_map,
        ".glb": "model/gltf-binary",
        ".gltf": "model/gltf+json",
        ".js": "text/javascript",
        ".mjs": "text/javascript",
        ".json": "application/json",
        ".wasm": "application/wasm",
    }

    def log_message(self, fmt, *largs):
        log.info("%s - %s", self.address_string(), fmt % largs)


def build_server(directory: str, port: int) -> ThreadingHTTPServer:
    handler = partial(_Handler, directory=str(directory))
    return ThreadingHTTPServer(("", port), handler)


def _cmd_serve(args) -> int:
    if not Path(args.directory).is_dir():
        print(f"error: no such directory: {args.directory}", file=sys.stderr)
        return 2
    server = build_server(args.directory, args.port)
    host, port = server.server_address[:2]
    print(f"serving {args.directory} on http://{host or '0.0.0.0'}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
