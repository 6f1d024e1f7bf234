import random

import pytest

from escroom.errors import (DuplicateStateName, MissingType, StateChartError,
                            UnknownRoom)
from escroom.markup import parse_scene
from escroom.statechart import (GAME_STATE_EVENT, GAME_STATE_UPDATED,
                                GameEvent, Machine, build_statechart,
                                dispatch, initial_configuration,
                                state_matches, visibility_for)
from support import (AbstractModel, abstract_of_config, build_chart,
                     chart_alphabet, chart_reachable, make_chart_doc)


def test_event_name_constants():
    assert GAME_STATE_EVENT == "game-state-event"
    assert GAME_STATE_UPDATED == "game-state-updated"


def test_empty_doc_gives_skeleton():
    chart, config = build_chart({})
    assert set(chart.nodes_by_path) == {"initializing", "running", "failed",
                                        "escaped"}
    assert config.sorted() == ["initializing"]


def test_loaded_enters_running_with_one_update():
    chart, config = build_chart({"room1": ["puzzle1"]})
    nxt, emitted, changed = dispatch(chart, config, GameEvent("loaded"))
    assert changed
    assert "running" in nxt.active_paths
    assert "running.room1.puzzle1.unsolved" in nxt.active_paths
    updates = [e for e in emitted if e.name == GAME_STATE_UPDATED]
    assert len(updates) == 1


def test_ignored_event_emits_nothing():
    chart, config = build_chart({"room1": ["puzzle1"]})
    nxt, emitted, changed = dispatch(chart, config, GameEvent("nonsense"))
    assert not changed and emitted == [] and nxt == config


def test_solving_all_puzzles_escapes():
    chart, config = build_chart({"room1": ["p1"], "room2": ["p2"]})
    config, _, _ = dispatch(chart, config, "loaded")
    config, _, _ = dispatch(chart, config, "solved:p1")
    assert "escaped" not in config.active_paths
    config, emitted, _ = dispatch(chart, config, "solved:p2")
    assert "escaped" in config.active_paths
    assert sum(e.name == GAME_STATE_UPDATED for e in emitted) == 1


def test_time_expired_fails_from_running_only():
    chart, config = build_chart({"room1": ["p1"]})
    same, _, changed = dispatch(chart, config, "time-expired")
    assert not changed  # only handled inside running
    config, _, _ = dispatch(chart, config, "loaded")
    config, _, _ = dispatch(chart, config, "time-expired")
    assert config.sorted() == ["failed"]
    # final state swallows everything
    after, _, changed = dispatch(chart, config, "solved:p1")
    assert not changed


def test_resolving_same_puzzle_changes_nothing():
    chart, config = build_chart({"room1": ["p1", "p2"]})
    config, _, _ = dispatch(chart, config, "loaded")
    config, _, _ = dispatch(chart, config, "solved:p1")
    again, emitted, changed = dispatch(chart, config, "solved:p1")
    assert not changed and emitted == []


def test_sequence_advances_with_next():
    seq = {"debriefing": {"states": ["intro", "debriefingPlay", "outro"]}}
    chart, config = build_chart({"room1": ["p1"]}, seq)
    config, _, _ = dispatch(chart, config, "loaded")
    assert "running.debriefing.intro" in config.active_paths
    config, _, _ = dispatch(chart, config, "next:debriefing")
    assert "running.debriefing.debriefingPlay" in config.active_paths
    config, _, _ = dispatch(chart, config, "next:debriefing")
    config, _, changed = dispatch(chart, config, "next:debriefing")
    assert "running.debriefing.outro" in config.active_paths and not changed


def test_room_scoped_sequence():
    seq = {"briefing": {"states": ["a", "b"], "room": "room1"}}
    chart, config = build_chart({"room1": ["p1"]}, seq)
    config, _, _ = dispatch(chart, config, "loaded")
    assert "running.room1.briefing.a" in config.active_paths


def test_duplicate_state_name_rejected():
    doc = parse_scene(
        '<a-scene><a-entity id="r" game-state="type: room; name: room1">'
        '</a-entity>'
        '<a-entity id="a" game-state="type: puzzle; name: dup; room: room1">'
        '</a-entity>'
        '<a-entity id="b" game-state="type: puzzle; name: dup; room: room1">'
        "</a-entity></a-scene>")
    with pytest.raises(DuplicateStateName):
        build_statechart(doc)


def test_unknown_room_rejected():
    doc = parse_scene(
        '<a-scene><a-entity id="p" game-state="type: puzzle; name: p; '
        'room: nowhere"></a-entity></a-scene>')
    with pytest.raises(UnknownRoom):
        build_statechart(doc)


def test_missing_type_rejected():
    doc = parse_scene('<a-scene><a-entity id="p" game-state="name: p">'
                      "</a-entity></a-scene>")
    with pytest.raises(MissingType):
        build_statechart(doc)


def test_state_matches_prefix_semantics():
    chart, config = build_chart({"room1": ["p1"]})
    config, _, _ = dispatch(chart, config, "loaded")
    assert state_matches(config, "running")
    assert state_matches(config, "running.room1.p1.unsolved")
    assert not state_matches(config, "running.room1.p1.solved")


def test_visibility_for():
    spec = {"state": "running.room1.p1.solved", "showOtherwise": True}
    chart, config = build_chart({"room1": ["p1", "p2"]})
    config, _, _ = dispatch(chart, config, "loaded")
    assert visibility_for(config, spec) is True  # not matching -> shown
    config, _, _ = dispatch(chart, config, "solved:p1")
    assert visibility_for(config, spec) is False  # matching -> hidden
    no_otherwise = {"state": "running"}
    assert visibility_for(config, no_otherwise) is False


def test_machine_subscription():
    doc = parse_scene(make_chart_doc({"room1": ["p1"]}))
    machine = Machine(build_statechart(doc))
    seen = []
    sub = machine.subscribe(lambda e: seen.append(e.name))
    machine.dispatch("loaded")
    assert seen.count(GAME_STATE_UPDATED) == 1
    sub.cancel()
    machine.dispatch("solved:p1")
    assert len(seen) == 1  # cancelled listener heard nothing new


# ---------------------------------------------------------------------------
# Random-sequence protocol and the brute-force reachability oracle


def _random_layouts(rng, count):
    layouts = []
    for _ in range(count):
        n_rooms = rng.randint(1, 3)
        rooms = {}
        idx = 0
        for r in range(n_rooms):
            n_puzzles = rng.randint(0, 2)
            rooms[f"room{r}"] = [f"pz{idx + i}" for i in range(n_puzzles)]
            idx += n_puzzles
        if not any(rooms.values()):
            rooms["room0"] = ["pz0"]
        sequences = None
        if rng.random() < 0.3:
            sequences = {"seq": {"states": ["s0", "s1", "s2"]}}
        layouts.append((rooms, sequences))
    return layouts


def _ancestor_closed(config):
    for path in config.active_paths:
        parts = path.split(".")
        for i in range(1, len(parts)):
            if ".".join(parts[:i]) not in config.active_paths:
                return False
    return True


def test_random_sequences_update_protocol():
    rng = random.Random(7)
    for rooms, sequences in _random_layouts(rng, 40):
        chart, config = build_chart(rooms, sequences)
        alphabet = chart_alphabet(rooms, sequences) + ["bogus"]
        for _ in range(25):
            event = rng.choice(alphabet)
            nxt, emitted, changed = dispatch(chart, config, event)
            updates = sum(e.name == GAME_STATE_UPDATED for e in emitted)
            assert updates == (1 if changed else 0)
            assert changed == (nxt.active_paths != config.active_paths)
            assert _ancestor_closed(nxt)
            config = nxt


def test_reachable_states_match_enumeration_oracle():
    rng = random.Random(21)
    for rooms, sequences in _random_layouts(rng, 12):
        total = sum(len(v) for v in rooms.values())
        if total > 4:
            continue
        chart, config = build_chart(rooms, sequences)
        alphabet = chart_alphabet(rooms, sequences)
        live = chart_reachable(chart, config, alphabet)
        projected = {abstract_of_config(chart, c, rooms, sequences)
                     for c in live}
        oracle = AbstractModel(rooms, sequences).reachable(alphabet)
        assert projected == oracle
