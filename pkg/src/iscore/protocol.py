"""Wire messages for live and simulated runs.

Newline-delimited JSON, one message per line, compact separators and
sorted keys so recorded streams are reproducible byte for byte.

engine -> client: score, window, fired, rejected, status, speed
client -> engine: trigger, pause, resume, speed

A window message is sent whenever an event's (lb, ub, enabled) triple
changes; executed events simply stop getting window updates, their
"fired" message closes them out. The engine's "speed" message announces
the effective playhead rate (0.0 while paused) so clients can animate
between messages without guessing.
"""

from __future__ import annotations

import json
from typing import Callable, Optional

from .engine import ExecutionState, FireRecord, RejectRecord, TriggerPolicy, enabled, run_simulated
from .errors import ParseError
from .persistence import document_from_score
from .score import Score


def dumps(message: dict) -> str:
    return json.dumps(message, sort_keys=True, separators=(",", ":"))


def score_message(score: Score, state: ExecutionState) -> dict:
    """Full snapshot: authored objects and relations plus the event network."""
    doc = document_from_score(score)
    interactive = state.network.interactive
    events = [
        {
            "id": e,
            "labels": [list(l) for l in state.labels.get(e, ())],
            "actions": list(state.actions.get(e, ())),
            "interactive": e in interactive,
        }
        for e in sorted(set(state.windows) | set(state.executed))
    ]
    return {
        "type": "score",
        "name": score.name,
        "objects": doc["objects"],
        "relations": doc["relations"],
        "events": events,
    }


def window_message(event: str, lb: int, ub: Optional[int], is_enabled: bool) -> dict:
    return {"type": "window", "event": event, "lb": lb, "ub": ub, "enabled": is_enabled}


def fired_message(record: FireRecord) -> dict:
    return {
        "type": "fired",
        "event": record.event,
        "time": record.time,
        "actions": list(record.actions),
        "cause": record.cause,
    }


def rejected_message(record: RejectRecord) -> dict:
    return {
        "type": "rejected",
        "event": record.event,
        "reason": record.reason,
        "lb": record.lb,
        "ub": record.ub,
    }


def status_message(value: str, time: int) -> dict:
    return {"type": "status", "value": value, "time": time}


def speed_message(factor: float, time: int) -> dict:
    return {"type": "speed", "factor": factor, "time": time}


class MessageStream:
    """Engine observer that turns run callbacks into protocol messages.

    Keeps a per-event cache of the last announced window so only real
    changes go out. The same instance drives simulated stdout streams
    and the live server broadcast.
    """

    def __init__(self, score: Score, sink: Callable[[dict], None]):
        self.score = score
        self.sink = sink
        self._windows: dict[str, tuple] = {}
        self._last_status: Optional[tuple] = None

    def _status(self, state: ExecutionState) -> None:
        key = (state.status, state.clock)
        if key != self._last_status:
            self._last_status = key
            self.sink(status_message(state.status, state.clock))

    def _sync_windows(self, state: ExecutionState) -> None:
        for e in sorted(state.windows):
            lb, ub = state.windows[e]
            triple = (lb, ub, enabled(state, e))
            if self._windows.get(e) != triple:
                self._windows[e] = triple
                self.sink(window_message(e, *triple))
        for e in list(self._windows):
            if e not in state.windows:
                del self._windows[e]

    def __call__(self, kind: str, payload, state: ExecutionState) -> None:
        if kind == "init":
            self.sink(score_message(self.score, state))
            self._sync_windows(state)
            self._status(state)
        elif kind == "fired":
            self.sink(fired_message(payload))
            self._sync_windows(state)
        elif kind == "rejected":
            self.sink(rejected_message(payload))
        elif kind == "end":
            self._status(state)
        # "cancelled" sends nothing by itself: the end status carries it.


def simulate_stream(
    score: Score,
    trigger_script=(),
    policy: TriggerPolicy = TriggerPolicy(),
) -> list[dict]:
    """Run offline and collect the exact message sequence a client would see."""
    messages: list[dict] = []
    run_simulated(score, trigger_script, policy, observer=MessageStream(score, messages.append))
    return messages


_CLIENT_SHAPES = {
    "trigger": {"event"},
    "pause": set(),
    "resume": set(),
    "speed": {"factor"},
}


def parse_client_message(line: str) -> dict:
    """Validate one client line; raises ParseError on anything off-shape."""
    try:
        message = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(message, dict):
        raise ParseError("client message must be a JSON object")
    kind = message.get("type")
    if kind not in _CLIENT_SHAPES:
        raise ParseError(f"unknown client message type {kind!r}")
    expected = _CLIENT_SHAPES[kind] | {"type"}
    if set(message) != expected:
        raise ParseError(f"{kind} message must have exactly fields {sorted(expected)}")
    if kind == "trigger" and not isinstance(message["event"], str):
        raise ParseError("trigger event must be a string")
    if kind == "speed":
        factor = message["factor"]
        if isinstance(factor, bool) or not isinstance(factor, (int, float)) or factor <= 0:
            raise ParseError("speed factor must be a positive number")
    return message
