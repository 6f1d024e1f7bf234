import math
import random

import numpy as np
import pytest

from escroom.errors import UnsupportedElement
from escroom.markup import parse_scene
from escroom.panel import (ClockState, box_center_world, clock_tick,
                           dispatch_pointer, display_string, hit_test,
                           layout_panel, serialize_layout)

PANEL = """<esc-html-panel id="panel" width="1.5">
<h1>Escape rooms</h1>
<p>Pick a room to get locked into.</p>
<a href="/apartment.html">The Apartment</a>
</esc-html-panel>"""

WATCH = """<esc-watch id="watch" width="0.4">
<div class="face">
<span class="minutes">60</span><span class="sep">:</span><span
  class="seconds">00</span>
</div>
</esc-watch>"""


def _panel(markup=PANEL, width=1.5):
    doc = parse_scene(markup)
    return layout_panel(doc.root, width)


def _leaves(box):
    out = []
    for b in box.iter_boxes():
        if not b.children:
            out.append(b)
    return out


def test_blocks_stack_top_to_bottom():
    layout = _panel()
    blocks = layout.root.children
    tags = [b.source.tag if hasattr(b.source, "tag") else "?" for b in blocks]
    assert tags[0] == "h1"
    ys = [b.y for b in blocks]
    assert ys == sorted(ys)  # later blocks sit lower
    # every block below the previous one's extent
    for above, below in zip(blocks, blocks[1:]):
        assert below.y >= above.y + above.h - 1e-9


def test_h1_above_anchor():
    layout = _panel()
    by_tag = {}
    for box in layout.root.iter_boxes():
        src = getattr(box.source, "tag", None)
        if src in ("h1", "a") and src not in by_tag:
            by_tag[src] = box
    assert by_tag["h1"].y + by_tag["h1"].h <= by_tag["a"].y + 1e-9


def test_glyph_and_line_metrics():
    doc = parse_scene('<esc-html-panel id="p" width="2"><p>abcd</p>'
                      "</esc-html-panel>")
    layout = layout_panel(doc.root, 2.0, 256.0)
    runs = [r for b in layout.root.iter_boxes() for r in b.text_runs]
    assert len(runs) == 1
    em = 16.0 / 256.0  # default font in panel meters
    # advance 0.6 em per glyph
    para = next(b for b in layout.root.iter_boxes()
                if getattr(b.source, "tag", "") == "p")
    assert para.h == pytest.approx(1.2 * em)


def test_text_wraps_at_width():
    doc = parse_scene('<esc-html-panel id="p" width="0.3"><p>'
                      "aaaa bbbb cccc dddd</p></esc-html-panel>")
    layout = layout_panel(doc.root, 0.3, 256.0)
    para = next(b for b in layout.root.iter_boxes()
                if getattr(b.source, "tag", "") == "p")
    em = 16.0 / 256.0
    lines = round(para.h / (1.2 * em))
    assert lines >= 2  # must have wrapped


def test_char_conservation():
    layout = _panel()
    runs = [r for b in layout.root.iter_boxes() for r in b.text_runs]
    got = "".join(r.text for r in runs).replace(" ", "")
    doc = parse_scene(PANEL)
    want = "".join(doc.root.text_content().split())
    assert got == want


def test_unsupported_tag_rejected():
    doc = parse_scene('<esc-html-panel id="p"><video src="x.mp4"></video>'
                      "</esc-html-panel>")
    with pytest.raises(UnsupportedElement):
        layout_panel(doc.root, 1.0)


def test_serialization_byte_identical():
    a = serialize_layout(_panel())
    b = serialize_layout(_panel())
    assert a == b
    assert isinstance(a, str) and a.startswith("{")


def test_style_map_overrides():
    doc = parse_scene('<esc-html-panel id="p" width="1">'
                      '<p class="big">hi</p></esc-html-panel>')
    plain = layout_panel(doc.root, 1.0)
    styled = layout_panel(doc.root, 1.0,
                          styles={"big": {"font_size_px": 32.0}})
    def para_h(layout):
        return next(b.h for b in layout.root.iter_boxes()
                    if getattr(b.source, "tag", "") == "p")
    assert para_h(styled) == pytest.approx(2 * para_h(plain))


# ---------------------------------------------------------------------------
# Hit testing


def _pose(tx=0.0, ty=0.0, tz=0.0):
    m = np.eye(4)
    m[:3, 3] = (tx, ty, tz)
    return m


def test_center_ray_hits_every_leaf():
    layout = _panel()
    pose = _pose(0.5, 1.4, -2.0)
    for leaf in _leaves(layout.root):
        center = box_center_world(layout, leaf, pose)
        origin = center + np.array([0.0, 0.0, 3.0])
        hit = hit_test(layout, pose, origin, (0.0, 0.0, -1.0))
        assert hit is not None
        entity, _ = hit
        src = leaf.source
        expected = src if hasattr(src, "tag") else layout.entity
        assert entity is expected or entity is getattr(src, "parent", None) \
            or entity is src


def test_ray_miss_returns_none():
    layout = _panel()
    pose = _pose()
    assert hit_test(layout, pose, (5.0, 5.0, 1.0), (0.0, 0.0, -1.0)) is None
    # parallel ray
    assert hit_test(layout, pose, (0.0, 0.0, 1.0), (1.0, 0.0, 0.0)) is None
    # panel behind the origin
    assert hit_test(layout, pose, (0.0, 0.0, -1.0), (0.0, 0.0, -1.0)) is None


class _FakeWorld:
    def __init__(self):
        self.events = []
        self.hover_target = None

    def enqueue(self, event):
        self.events.append(event)


def test_click_on_anchor_emits_navigate():
    layout = _panel()
    pose = _pose()
    anchor_box = next(b for b in layout.root.iter_boxes()
                      if getattr(b.source, "tag", "") == "a")
    center = box_center_world(layout, anchor_box, pose)
    hit = hit_test(layout, pose, center + np.array([0, 0, 1.0]),
                   (0.0, 0.0, -1.0))
    world = _FakeWorld()
    dispatch_pointer(world, hit, "click")
    names = [e.name for e in world.events]
    assert names.count("navigate") == 1
    nav = next(e for e in world.events if e.name == "navigate")
    assert nav.payload["href"] == "/apartment.html"


def test_hover_pairs_leave_and_enter():
    layout = _panel()
    pose = _pose()
    boxes = [b for b in layout.root.iter_boxes()
             if getattr(b.source, "tag", "") in ("h1", "a")]
    world = _FakeWorld()
    for box in boxes[:2]:
        center = box_center_world(layout, box, pose)
        hit = hit_test(layout, pose, center + np.array([0, 0, 1.0]),
                       (0.0, 0.0, -1.0))
        dispatch_pointer(world, hit, "hover")
    names = [e.name for e in world.events]
    assert names == ["mouseenter", "mouseleave", "mouseenter"]
    # hover off the panel entirely
    dispatch_pointer(world, None, "hover")
    assert [e.name for e in world.events][-1] == "mouseleave"


# ---------------------------------------------------------------------------
# Countdown


def _watch():
    doc = parse_scene(WATCH)
    return ClockState.from_layout(layout_panel(doc.root, 0.4))


def test_watch_duration_from_spans():
    clock = _watch()
    assert clock.duration == 3600.0
    assert display_string(clock) == "60:00"


def test_tick_updates_slots():
    clock = _watch()
    _, updates, events = clock_tick(clock, 1.0)
    assert updates == {"minutes": "59", "seconds": "59"}
    assert events == []
    assert display_string(clock) == "59:59"


def test_display_matches_remaining_every_tick():
    clock = _watch()
    for _ in range(3600):
        clock_tick(clock, 1.0)
        mm = int(clock.remaining // 60)
        ss = int(clock.remaining % 60)
        assert display_string(clock) == f"{mm:02d}:{ss:02d}"
    assert display_string(clock) == "00:00"


def test_exactly_one_expiry_over_random_schedules():
    rng = random.Random(13)
    for _ in range(200):
        clock = _watch()
        clock.remaining = clock.duration = rng.uniform(5.0, 30.0)
        fired = 0
        while clock.remaining > 0 or clock.running:
            _, _, events = clock_tick(clock, rng.uniform(0.0, 3.0))
            fired += sum(e.name == "time-expired" for e in events)
            if not clock.running:
                break
        # a few extra ticks after expiry stay silent
        for _ in range(5):
            _, _, events = clock_tick(clock, 1.0)
            fired += sum(e.name == "time-expired" for e in events)
        assert fired == 1


def test_negative_dt_rejected():
    clock = _watch()
    with pytest.raises(ValueError):
        clock_tick(clock, -0.1)
