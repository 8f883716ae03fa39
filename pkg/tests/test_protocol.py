"""Wire protocol: message shapes, window diffing, client-line parsing."""

import json

import pytest

from iscore.durations import DurationSet
from iscore.engine import TriggerPolicy
from iscore.errors import ParseError
from iscore.protocol import dumps, parse_client_message, simulate_stream
from iscore.score import Score, TemporalObject, TemporalRelation


def obj(oid, delta, **kw):
    return TemporalObject(oid, delta, **kw)


def rel(rid, src, dst, delta):
    return TemporalRelation(rid, src, dst, delta)


def seq2():
    a = obj("A", DurationSet.between(2, 4), start_action="a1", end_action="a2")
    b = obj("B", DurationSet.single(3), start_action="b1", end_action="b2")
    return Score("seq2", (a, b), (rel("glue", a.ep, b.sp, DurationSet.zero()),))


def cue_score():
    lead = obj("lead", DurationSet.single(1))
    go = obj("go", DurationSet.zero())
    tail = obj("tail", DurationSet.single(2))
    return Score(
        "cue",
        (lead, go, tail),
        (
            rel("r1", lead.ep, go.sp, DurationSet.between(0, 2)),
            rel("r2", go.ep, tail.sp, DurationSet.single(1)),
        ),
    )


def kinds(messages):
    return [m["type"] for m in messages]


def test_stream_opens_with_score_windows_status():
    messages = simulate_stream(seq2())
    assert kinds(messages)[:5] == ["score", "window", "window", "window", "status"]
    snapshot = messages[0]
    assert snapshot["name"] == "seq2"
    assert [o["id"] for o in snapshot["objects"]] == ["A", "B"]
    assert [e["id"] for e in snapshot["events"]] == ["A.end", "A.start", "B.end"]
    merged = snapshot["events"][0]
    assert merged["labels"] == [["endPoint", "A"], ["startPoint", "B"]]
    assert merged["actions"] == ["a2", "b1"]
    assert merged["interactive"] is False
    assert messages[4] == {"type": "status", "value": "running", "time": 0}


def test_stream_ends_with_a_final_status():
    messages = simulate_stream(seq2())
    assert messages[-1] == {"type": "status", "value": "finished", "time": 5}


def test_windows_are_emitted_only_on_change():
    messages = simulate_stream(seq2())
    fires = [m for m in messages if m["type"] == "fired"]
    assert [(m["event"], m["time"], m["cause"]) for m in fires] == [
        ("A.start", 0, "eager"),
        ("A.end", 2, "eager"),
        ("B.end", 5, "eager"),
    ]
    # after A.start fires, both pending windows gain upper bounds
    i = messages.index(fires[0])
    following = messages[i + 1 : i + 3]
    assert following == [
        {"type": "window", "event": "A.end", "lb": 2, "ub": 4, "enabled": True},
        {"type": "window", "event": "B.end", "lb": 5, "ub": 7, "enabled": False},
    ]
    # an executed event never gets another window message
    later = messages[i + 3 :]
    assert all(m.get("event") != "A.start" or m["type"] == "fired" for m in later)


def test_interactive_events_are_flagged_in_the_snapshot():
    messages = simulate_stream(cue_score())
    flags = {e["id"]: e["interactive"] for e in messages[0]["events"]}
    assert flags == {
        "go": True,
        "lead.end": False,
        "lead.start": False,
        "tail.end": False,
        "tail.start": False,
    }


def test_rejected_trigger_message():
    messages = simulate_stream(cue_score(), [("go", 0), ("go", 2)])
    rejected = [m for m in messages if m["type"] == "rejected"]
    assert rejected == [
        {"type": "rejected", "event": "go", "reason": "OutsideWindow", "lb": 1, "ub": 3}
    ]
    assert messages[-1]["value"] == "finished"


def test_cancelled_run_reports_through_the_final_status():
    messages = simulate_stream(cue_score(), policy=TriggerPolicy(on_expiry="cancel"))
    assert messages[-1] == {"type": "status", "value": "cancelled", "time": 4}
    assert "cancelled" not in kinds(messages)[:-1]


def test_stream_is_replayable_byte_for_byte():
    a = [dumps(m) for m in simulate_stream(cue_score(), [("go", 2)])]
    b = [dumps(m) for m in simulate_stream(cue_score(), [("go", 2)])]
    assert a == b
    assert all("\n" not in line for line in a)
    # compact separators, sorted keys
    assert a[0].startswith('{"events":')


def test_fired_messages_match_the_protocol_shape():
    messages = simulate_stream(cue_score(), [("go", 2)])
    fired = [m for m in messages if m["type"] == "fired"]
    go = next(m for m in fired if m["event"] == "go")
    assert set(go) == {"type", "event", "time", "actions", "cause"}
    assert go["cause"] == "trigger"
    autod = simulate_stream(cue_score())
    go_auto = next(m for m in autod if m["type"] == "fired" and m["event"] == "go")
    assert go_auto["cause"] == "autoFire"


# ---------------------------------------------------------------------------
# client -> engine lines


def test_client_messages_parse():
    assert parse_client_message('{"type":"trigger","event":"go"}') == {
        "type": "trigger",
        "event": "go",
    }
    assert parse_client_message('{"type":"pause"}') == {"type": "pause"}
    assert parse_client_message('{"type":"resume"}') == {"type": "resume"}
    assert parse_client_message('{"type":"speed","factor":1.5}') == {
        "type": "speed",
        "factor": 1.5,
    }


@pytest.mark.parametrize(
    "line",
    [
        "not json",
        '"trigger"',
        '{"type":"detonate"}',
        '{"type":"trigger"}',
        '{"type":"trigger","event":"go","extra":1}',
        '{"type":"trigger","event":7}',
        '{"type":"pause","event":"go"}',
        '{"type":"speed"}',
        '{"type":"speed","factor":0}',
        '{"type":"speed","factor":-2}',
        '{"type":"speed","factor":true}',
        '{"type":"speed","factor":"fast"}',
    ],
)
def test_malformed_client_lines_are_rejected(line):
    with pytest.raises(ParseError):
        parse_client_message(line)


def test_dumps_is_stable_under_key_order():
    assert dumps({"b": 1, "a": 2}) == '{"a":2,"b":1}'
    assert dumps(json.loads('{"b":1,"a":2}')) == '{"a":2,"b":1}'
