"""The score file format: versioned JSON, canonical on output.

One document kind, "iscore-doc/1". Saving always emits sorted keys,
two-space indent and a trailing newline, so a canonical document
survives load/save byte-identically and golden files stay stable.
Loading is strict: unknown fields, malformed intervals, or ill-typed
values fail with ParseError before any semantic validation runs.
"""

from __future__ import annotations

import json
from typing import Optional

from .durations import DurationSet
from .errors import ParseError
from .score import END, START, Point, Score, TemporalObject, TemporalRelation, validate_score

FORMAT_VERSION = "iscore-doc/1"

_OBJECT_KEYS = {"id", "duration", "parent", "startAction", "endAction"}
_RELATION_KEYS = {"from", "to", "delta"}
_ENDPOINT_KEYS = {"object", "point"}


def _fail(message: str) -> ParseError:
    return ParseError(message)


def _check_keys(mapping: dict, allowed: set, required: set, what: str) -> None:
    if not isinstance(mapping, dict):
        raise _fail(f"{what} must be an object, got {type(mapping).__name__}")
    unknown = set(mapping) - allowed
    if unknown:
        raise _fail(f"{what} has unknown fields: {', '.join(sorted(unknown))}")
    missing = required - set(mapping)
    if missing:
        raise _fail(f"{what} misses required fields: {', '.join(sorted(missing))}")


def _string(value, what: str) -> str:
    if not isinstance(value, str):
        raise _fail(f"{what} must be a string, got {type(value).__name__}")
    return value


def _intervals(value, what: str) -> DurationSet:
    if not isinstance(value, list) or not value:
        raise _fail(f"{what} must be a nonempty list of [lo, hi] pairs")
    pairs = []
    for pair in value:
        if not isinstance(pair, list) or len(pair) != 2:
            raise _fail(f"{what} entries must be [lo, hi] pairs, got {pair!r}")
        lo, hi = pair
        if not isinstance(lo, int) or isinstance(lo, bool) or lo < 0:
            raise _fail(f"{what}: lower bound must be a natural number, got {lo!r}")
        if hi is not None and (not isinstance(hi, int) or isinstance(hi, bool)):
            raise _fail(f"{what}: upper bound must be a natural number or null, got {hi!r}")
        if hi is not None and hi < lo:
            raise _fail(f"{what}: interval [{lo}, {hi}] has lo > hi")
        pairs.append((lo, hi))
    return DurationSet(tuple(pairs))


def _endpoint(value, what: str) -> Point:
    _check_keys(value, _ENDPOINT_KEYS, _ENDPOINT_KEYS, what)
    obj = _string(value["object"], f"{what}.object")
    point = _string(value["point"], f"{what}.point")
    if point not in (START, END):
        raise _fail(f"{what}.point must be 'start' or 'end', got {point!r}")
    return Point(obj, point)


def score_from_document(doc: dict) -> Score:
    """Build and validate a Score from a parsed document."""
    _check_keys(doc, {"version", "name", "objects", "relations"}, {"version", "name", "objects"}, "document")
    version = _string(doc["version"], "version")
    if version != FORMAT_VERSION:
        raise _fail(f"unsupported version {version!r}, expected {FORMAT_VERSION!r}")
    name = _string(doc["name"], "name")
    if not isinstance(doc["objects"], list):
        raise _fail("objects must be a list")
    objects = []
    for k, entry in enumerate(doc["objects"]):
        what = f"objects[{k}]"
        _check_keys(entry, _OBJECT_KEYS, {"id", "duration"}, what)
        objects.append(
            TemporalObject(
                id=_string(entry["id"], f"{what}.id"),
                duration=_intervals(entry["duration"], f"{what}.duration"),
                parent=_string(entry["parent"], f"{what}.parent") if "parent" in entry else None,
                start_action=_string(entry.get("startAction", ""), f"{what}.startAction"),
                end_action=_string(entry.get("endAction", ""), f"{what}.endAction"),
            )
        )
    relations = []
    raw_relations = doc.get("relations", [])
    if not isinstance(raw_relations, list):
        raise _fail("relations must be a list")
    for k, entry in enumerate(raw_relations):
        what = f"relations[{k}]"
        _check_keys(entry, _RELATION_KEYS, _RELATION_KEYS, what)
        relations.append(
            TemporalRelation(
                id=f"r{k}",
                src=_endpoint(entry["from"], f"{what}.from"),
                dst=_endpoint(entry["to"], f"{what}.to"),
                delta=_intervals(entry["delta"], f"{what}.delta"),
            )
        )
    score = Score(name, tuple(objects), tuple(relations))
    validate_score(score).raise_if_invalid()
    return score


def document_from_score(score: Score) -> dict:
    """The canonical document for a score; optional fields only when set."""
    objects = []
    for o in score.objects:
        entry: dict = {"id": o.id, "duration": o.duration.as_json()}
        if o.parent is not None:
            entry["parent"] = o.parent
        if o.start_action:
            entry["startAction"] = o.start_action
        if o.end_action:
            entry["endAction"] = o.end_action
        objects.append(entry)
    relations = [
        {
            "from": {"object": r.src.owner, "point": r.src.kind},
            "to": {"object": r.dst.owner, "point": r.dst.kind},
            "delta": r.delta.as_json(),
        }
        for r in score.relations
    ]
    return {
        "version": FORMAT_VERSION,
        "name": score.name,
        "objects": objects,
        "relations": relations,
    }


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_score(path: str) -> Score:
    """Parse, structurally check and semantically validate a score file."""
    with open(path, "r", encoding="utf-8") as fp:
        text = fp.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    return score_from_document(doc)


def save_score(score: Score, path: str) -> None:
    validate_score(score).raise_if_invalid()
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(dumps_document(document_from_score(score)))
