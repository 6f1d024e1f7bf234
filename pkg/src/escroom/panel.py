"""Panel layout, ray hit testing, pointer event bridging, and the countdown.

Text metrics are fixed on purpose: every glyph advances 0.6 x font size and
a line is 1.2 x the tallest font on it, so layouts are reproducible on any
host. A renderer may substitute real fonts and scale boxes uniformly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedElement
from .markup import Entity
from .statechart import GameEvent

BLOCK_TAGS = {"div", "h1", "h2", "h3", "p", "button"}
INLINE_TAGS = {"span", "a"}

GLYPH_ADVANCE = 0.6
LINE_HEIGHT = 1.2

DEFAULT_FONT_PX = 16.0
TAG_FONT_PX = {"h1": 32.0, "h2": 24.0, "h3": 20.0}

# Class-driven styles; a scene may ship its own map with the same shape.
DEFAULT_STYLES: dict[str, dict] = {
    "btn": {"padding_px": 8.0},
}


@dataclass
class TextRun:
    text: str
    font_size: float  # meters
    x: float
    y: float


@dataclass
class LayoutBox:
    source: Entity | None
    x: float
    y: float
    w: float
    h: float
    text_runs: list[TextRun] = field(default_factory=list)
    children: list["LayoutBox"] = field(default_factory=list)

    @property
    def rect(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.w, self.h)

    def contains(self, u: float, v: float) -> bool:
        return (self.x - 1e-9 <= u <= self.x + self.w + 1e-9
                and self.y - 1e-9 <= v <= self.y + self.h + 1e-9)

    def iter_boxes(self):
        yield self
        for child in self.children:
            yield from child.iter_boxes()


@dataclass
class PanelLayout:
    entity: Entity
    width: float
    height: float
    px_per_meter: float
    root: LayoutBox


def layout_panel(panel_entity: Entity, width: float = 1.0,
                 px_per_meter: float = 256.0,
                 styles: dict[str, dict] | None = None) -> PanelLayout:
    """Lay out the panel subtree onto a quad of the given width; the height
    follows from the content."""
    style_map = dict(DEFAULT_STYLES)
    if styles:
        style_map.update(styles)
    ctx = _Layouter(style_map, px_per_meter)
    base_fs = DEFAULT_FONT_PX / px_per_meter
    root = LayoutBox(panel_entity, 0.0, 0.0, width, 0.0)
    pad = ctx.padding(panel_entity)
    height = ctx.layout_into(root, panel_entity.children, pad, pad,
                             width - 2 * pad, base_fs)
    root.h = height + 2 * pad
    return PanelLayout(panel_entity, width, root.h, px_per_meter, root)


class _Layouter:
    def __init__(self, styles: dict[str, dict], ppm: float):
        self.styles = styles
        self.ppm = ppm

    def font_size(self, entity: Entity, inherited: float) -> float:
        size = None
        if entity.tag in TAG_FONT_PX:
            size = TAG_FONT_PX[entity.tag]
        for cls in entity.classes:
            override = self.styles.get(cls, {}).get("font_size_px")
            if override is not None:
                size = float(override)
        return size / self.ppm if size is not None else inherited

    def padding(self, entity: Entity) -> float:
        pad = 0.0
        for cls in entity.classes:
            override = self.styles.get(cls, {}).get("padding_px")
            if override is not None:
                pad = float(override)
        return pad / self.ppm

    def layout_into(self, box: LayoutBox, children: list[Entity],
                    x: float, y: float, width: float, fs: float) -> float:
        """Stack child groups into box starting at (x, y); returns content
        height. Consecutive inline/text children share one flow."""
        items = [c for c in children
                 if not (c.is_text and not (c.text or "").strip())]
        for item in items:
            if not item.is_text and item.tag not in BLOCK_TAGS | INLINE_TAGS:
                raise UnsupportedElement(item.tag)

        if items and all(c.is_text or c.tag in INLINE_TAGS for c in items):
            # Pure-inline container: runs live on the element itself.
            runs, inline_boxes, fh = self.flow(items, x, y, width, fs)
            box.text_runs.extend(runs)
            box.children.extend(inline_boxes)
            return fh

        cursor = y
        group: list[Entity] = []

        def flush_flow():
            nonlocal cursor
            if not group:
                return
            runs, inline_boxes, fh = self.flow(group, x, cursor, width, fs)
            anon = LayoutBox(box.source, x, cursor, width, fh, runs,
                             inline_boxes)
            box.children.append(anon)
            cursor += fh
            group.clear()

        for child in items:
            if child.is_text or child.tag in INLINE_TAGS:
                group.append(child)
            else:
                flush_flow()
                box.children.append(self.block(child, x, cursor, width, fs))
                cursor += box.children[-1].h
        flush_flow()
        return cursor - y

    def block(self, entity: Entity, x: float, y: float, width: float,
              inherited_fs: float) -> LayoutBox:
        fs = self.font_size(entity, inherited_fs)
        pad = self.padding(entity)
        box = LayoutBox(entity, x, y, width, 0.0)
        content = self.layout_into(box, entity.children, x + pad, y + pad,
                                   width - 2 * pad, fs)
        box.h = content + 2 * pad
        return box

    # -- inline flow -------------------------------------------------------

    def flow(self, items: list[Entity], x0: float, y0: float, width: float,
             fs: float):
        """Place text left-to-right with wrapping. Returns (runs for the
        container, boxes for inline elements, flow height)."""
        tokens = self.tokens(items, fs, ())
        placed = _place_tokens(tokens, width)

        runs: list[TextRun] = []
        runs_of: dict[int, list[TextRun]] = {}     # direct owner only
        runs_under: dict[int, list[TextRun]] = {}  # owner and ancestors
        y = y0
        for line in placed:
            line_h = LINE_HEIGHT * max(t[1] for t in line)
            for text, tfs, chain, rel_x in line:
                run = TextRun(text, tfs, x0 + rel_x, y + (line_h - tfs) / 2)
                if chain:
                    runs_of.setdefault(id(chain[-1]), []).append(run)
                    for el in chain:
                        runs_under.setdefault(id(el), []).append(run)
                else:
                    runs.append(run)
            y += line_h
        height = y - y0

        inline_boxes: list[LayoutBox] = []
        box_of: dict[int, LayoutBox] = {}
        for element, chain in _inline_elements(items, ()):
            covered = runs_under.get(id(element), [])
            if not covered:
                continue
            left = min(r.x for r in covered)
            top = min(r.y for r in covered)
            right = max(r.x + GLYPH_ADVANCE * r.font_size * len(r.text)
                        for r in covered)
            bottom = max(r.y + r.font_size for r in covered)
            bx = LayoutBox(element, left, top, right - left, bottom - top,
                           list(runs_of.get(id(element), [])))
            box_of[id(element)] = bx
            parent = chain[-1] if chain else None
            if parent is not None and id(parent) in box_of:
                box_of[id(parent)].children.append(bx)
            else:
                inline_boxes.append(bx)
        return runs, inline_boxes, height

    def tokens(self, items: list[Entity], fs: float, chain: tuple):
        """Flatten inline content to (word, font_size, inline_chain)."""
        out = []
        for item in items:
            if item.is_text:
                for word in (item.text or "").split():
                    out.append((word, fs, chain))
            elif item.tag in INLINE_TAGS:
                child_fs = self.font_size(item, fs)
                out.extend(self.tokens(item.children, child_fs,
                                       chain + (item,)))
            elif item.tag in BLOCK_TAGS:
                raise UnsupportedElement(
                    f"{item.tag} cannot appear in inline flow")
            else:
                raise UnsupportedElement(item.tag)
        return out


def _inline_elements(items: list[Entity], chain: tuple):
    for item in items:
        if item.is_text:
            continue
        if item.tag in INLINE_TAGS:
            yield item, chain
            yield from _inline_elements(item.children, chain + (item,))


def _place_tokens(tokens, width: float):
    """Greedy word wrap; merges same-element neighbours into single runs.

    Returns lines of (text, font_size, chain, x)."""
    lines: list[list] = []
    line: list = []
    cursor = 0.0
    for word, fs, chain in tokens:
        adv = GLYPH_ADVANCE * fs
        w = adv * len(word)
        sep = adv if line else 0.0
        if line and cursor + sep + w > width + 1e-9:
            lines.append(line)
            line = []
            cursor = 0.0
            sep = 0.0
        while w > width + 1e-9 and len(word) > 1:
            fit = max(1, int((width - cursor - sep) / adv))
            piece = word[:fit]
            line.append((piece, fs, chain, cursor + sep))
            lines.append(line)
            line = []
            cursor = 0.0
            sep = 0.0
            word = word[fit:]
            w = adv * len(word)
        x = cursor + sep
        if line and line[-1][2] is chain and abs(line[-1][3] + adv * len(line[-1][0]) + adv - x) <= 1e-9:
            prev = line.pop()
            merged = prev[0] + " " + word
            line.append((merged, fs, chain, prev[3]))
            cursor = prev[3] + adv * len(merged)
        else:
            line.append((word, fs, chain, x))
            cursor = x + w
    if line:
        lines.append(line)
    return lines


# -- hit testing -------------------------------------------------------------

def hit_test(layout: PanelLayout, pose: np.ndarray, origin, direction
             ) -> tuple[Entity, tuple[float, float]] | None:
    """Intersect a world-space ray with the panel quad.

    pose is the panel's 4x4 world matrix; the quad is centered on its
    origin in the local XY plane. Returns (entity, panel-local point) with
    the origin at the top-left corner, or None when the ray misses.
    """
    inv = np.linalg.inv(np.asarray(pose, dtype=float))
    o = inv @ np.array([*origin, 1.0])
    d = inv @ np.array([*direction, 0.0])
    if abs(d[2]) < 1e-12:
        return None
    t = -o[2] / d[2]
    if t < 1e-9:
        return None
    px = o[0] + t * d[0]
    py = o[1] + t * d[1]
    u = px + layout.width / 2
    v = layout.height / 2 - py
    if not (0 <= u <= layout.width and 0 <= v <= layout.height):
        return None
    box = _deepest(layout.root, u, v)
    entity = box.source if box.source is not None else layout.entity
    return entity, (u, v)


def _deepest(box: LayoutBox, u: float, v: float) -> LayoutBox:
    best = box
    for child in box.children:
        if child.contains(u, v):
            best = _deepest(child, u, v)
    return best


def box_center_world(layout: PanelLayout, box: LayoutBox,
                     pose: np.ndarray) -> tuple[float, float, float]:
    """World position of a box center; the inverse probe for hit_test."""
    u = box.x + box.w / 2
    v = box.y + box.h / 2
    local = np.array([u - layout.width / 2, layout.height / 2 - v, 0.0, 1.0])
    world = np.asarray(pose, dtype=float) @ local
    return (float(world[0]), float(world[1]), float(world[2]))


# -- pointer bridging --------------------------------------------------------

def dispatch_pointer(world, hit, action: str) -> list[GameEvent]:
    """Mirror a VR pointer interaction as DOM-style events on the world bus.

    hover transitions pair mouseenter/mouseleave; click also follows anchor
    hrefs with a navigate event.
    """
    target = hit[0] if hit else None
    emitted: list[GameEvent] = []

    def emit(name: str, entity: Entity, extra: dict | None = None):
        payload = {"target": entity.id or entity.tag}
        if extra:
            payload.update(extra)
        event = GameEvent(name, payload)
        emitted.append(event)
        world.enqueue(event)

    if action == "hover":
        prev = world.hover_target
        if prev is not target:
            if prev is not None:
                emit("mouseleave", prev)
            if target is not None:
                emit("mouseenter", target)
            world.hover_target = target
    elif action == "click":
        if target is not None:
            emit("click", target)
            href = target.attr("href")
            if target.tag == "a" and href:
                emit("navigate", target, {"href": str(href)})
    else:
        raise ValueError(f"unknown pointer action {action!r}")
    return emitted


# -- countdown ---------------------------------------------------------------

@dataclass
class ClockState:
    duration: float
    remaining: float
    running: bool = True
    minute_slot: LayoutBox | None = None
    second_slot: LayoutBox | None = None

    @classmethod
    def from_layout(cls, layout: PanelLayout) -> "ClockState":
        """Read the initial MM/SS from the minutes/seconds slots."""
        minute_slot = second_slot = None
        for box in layout.root.iter_boxes():
            if box.source is None:
                continue
            if "minutes" in box.source.classes and minute_slot is None:
                minute_slot = box
            if "seconds" in box.source.classes and second_slot is None:
                second_slot = box
        minutes = _slot_int(minute_slot)
        seconds = _slot_int(second_slot)
        duration = float(minutes * 60 + seconds)
        return cls(duration, duration, True, minute_slot, second_slot)


def _slot_int(slot: LayoutBox | None) -> int:
    if slot is None or slot.source is None:
        return 0
    text = slot.source.text_content().strip()
    try:
        return int(text)
    except ValueError:
        return 0


def clock_tick(clock: ClockState, dt: float
               ) -> tuple[ClockState, dict[str, str], list[GameEvent]]:
    """Advance the countdown; returns (clock, slot updates, events).

    time-expired fires exactly once, on the tick where remaining hits 0.
    """
    if dt < 0:
        raise ValueError("negative dt")
    updates: dict[str, str] = {}
    events: list[GameEvent] = []
    if not clock.running or dt == 0:
        return clock, updates, events
    prev = clock.remaining
    clock.remaining = max(0.0, prev - dt)
    mm = f"{int(clock.remaining // 60):02d}"
    ss = f"{int(clock.remaining % 60):02d}"
    if _retext(clock.minute_slot, mm):
        updates["minutes"] = mm
    if _retext(clock.second_slot, ss):
        updates["seconds"] = ss
    if prev > 0 and clock.remaining <= 0:
        events.append(GameEvent("time-expired"))
        clock.running = False
    return clock, updates, events


def _retext(slot: LayoutBox | None, text: str) -> bool:
    if slot is None:
        return False
    runs = slot.text_runs
    if not runs:
        for child in slot.iter_boxes():
            if child.text_runs:
                runs = child.text_runs
                break
    if not runs or runs[0].text == text:
        return False
    runs[0].text = text
    return True


def display_string(clock: ClockState) -> str:
    return f"{int(clock.remaining // 60):02d}:{int(clock.remaining % 60):02d}"


# -- serialization -----------------------------------------------------------

def serialize_layout(layout: PanelLayout) -> str:
    """Canonical JSON for determinism checks and viewer export."""

    def box_json(box: LayoutBox) -> dict:
        source = None
        if box.source is not None:
            source = box.source.id or box.source.tag
        return {
            "source": source,
            "rect": [box.x, box.y, box.w, box.h],
            "runs": [[r.text, r.font_size, r.x, r.y] for r in box.text_runs],
            "children": [box_json(c) for c in box.children],
        }

    return json.dumps({
        "width": layout.width,
        "height": layout.height,
        "px_per_meter": layout.px_per_meter,
        "root": box_json(layout.root),
    }, sort_keys=True, separators=(",", ":"))
