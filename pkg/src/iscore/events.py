"""Timed event structures: the execution-level view of a score.

Each static object contributes a start event and an end event joined by
its duration set; each interactive object contributes a single event
carrying both of its points. Relations become delays between the events
their endpoints map to. The normal form merges every group of events
chained by {0} delays into one event, so that distinct events are never
forced simultaneous.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .durations import DurationSet
from .errors import PartialTrace, ZeroCycleContradiction
from .score import ConstraintSet, DiffConstraint, Score, compile_hierarchy, validate_score

START_POINT = "startPoint"
END_POINT = "endPoint"
INTERACTIVE = "interactiveObject"

# Within one instant, end labels resolve first and start labels last, so
# that an end glued to a start reads in causal order.
LABEL_ORDER = {END_POINT: 0, INTERACTIVE: 1, START_POINT: 2}

Label = tuple[str, str]  # (kind, object id)


@dataclass(frozen=True)
class Event:
    id: str
    labels: frozenset[Label]

    def sorted_labels(self) -> list[Label]:
        return sorted(self.labels, key=lambda l: (LABEL_ORDER[l[0]], l[1]))


@dataclass(frozen=True)
class EventDelay:
    """t(dst) - t(src) must lie in delta."""

    src: str
    dst: str
    delta: DurationSet


@dataclass(frozen=True)
class TimedEventStructure:
    events: tuple[Event, ...]
    delays: tuple[EventDelay, ...]

    def event(self, event_id: str) -> Event:
        for e in self.events:
            if e.id == event_id:
                return e
        raise KeyError(event_id)

    @property
    def event_ids(self) -> list[str]:
        return [e.id for e in self.events]


@dataclass(frozen=True)
class EncodingMap:
    """Where each score point landed: point id -> event id."""

    point_to_event: dict[str, str]

    def event_of(self, point_id: str) -> str:
        return self.point_to_event[point_id]

    def composed(self, merge: dict[str, str]) -> "EncodingMap":
        return EncodingMap({p: merge[e] for p, e in self.point_to_event.items()})


def encode_object(obj) -> tuple[list[Event], list[EventDelay], dict[str, str]]:
    """Events, delays and point map contributed by one temporal object."""
    if obj.interactive:
        e = Event(obj.id, frozenset({(INTERACTIVE, obj.id)}))
        return [e], [], {obj.sp.id: e.id, obj.ep.id: e.id}
    start = Event(obj.sp.id, frozenset({(START_POINT, obj.id)}))
    end = Event(obj.ep.id, frozenset({(END_POINT, obj.id)}))
    delay = EventDelay(start.id, end.id, obj.duration)
    return [start, end], [delay], {obj.sp.id: start.id, obj.ep.id: end.id}


def encode_relation(relation, point_map: dict[str, str]) -> Optional[EventDelay]:
    """Map a relation onto the events its endpoints landed on.

    Both points of an interactive object share one event, so a relation
    spanning them collapses to a self-delay: vacuous when 0 is
    admissible, contradictory otherwise.
    """
    src = point_map[relation.src.id]
    dst = point_map[relation.dst.id]
    if src == dst:
        if relation.delta.contains(0):
            return None
        raise ZeroCycleContradiction(
            f"relation {relation.id!r} forbids delay 0 between points of one event"
        )
    return EventDelay(src, dst, relation.delta)


def encode_score(score: Score) -> tuple[TimedEventStructure, EncodingMap]:
    """Encode a well-formed score as a timed event structure.

    Hierarchy is compiled away first. Event order follows ascending
    object id (start before end within a static object); duplicate
    delays collapse to one.
    """
    validate_score(score).raise_if_invalid()
    score = compile_hierarchy(score)
    events: list[Event] = []
    delays: list[EventDelay] = []
    point_map: dict[str, str] = {}
    for obj in sorted(score.objects, key=lambda o: o.id):
        evs, dls, pm = encode_object(obj)
        events += evs
        delays += dls
        point_map.update(pm)
    for relation in score.relations:
        d = encode_relation(relation, point_map)
        if d is not None:
            delays.append(d)
    deduped: list[EventDelay] = []
    seen: set[tuple[str, str, tuple]] = set()
    for d in delays:
        key = (d.src, d.dst, d.delta.intervals)
        if key not in seen:
            seen.add(key)
            deduped.append(d)
    return TimedEventStructure(tuple(events), tuple(deduped)), EncodingMap(point_map)


def structure_constraints(tes: TimedEventStructure) -> ConstraintSet:
    """The structure's delays as difference constraints over event ids."""
    return ConstraintSet(
        tuple(e.id for e in tes.events),
        tuple(DiffConstraint(d.src, d.dst, d.delta) for d in tes.delays),
    )


def normalize(tes: TimedEventStructure) -> tuple[TimedEventStructure, dict[str, str]]:
    """Merge every chain of {0} delays into a single event.

    Returns the normal form plus a map from each original event id to
    the id it ended up as (the lexicographically smallest of its class).
    The result has no delay whose delta is exactly {0}. A merge that
    traps a zero-free delay inside one event is contradictory.
    """
    parent = {e.id: e.id for e in tes.events}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for d in tes.delays:
        if d.delta.is_singleton_zero:
            ra, rb = find(d.src), find(d.dst)
            if ra != rb:
                # keep the smaller id as representative
                lo, hi = sorted((ra, rb))
                parent[hi] = lo

    merge = {e.id: find(e.id) for e in tes.events}

    labels: dict[str, set[Label]] = {}
    for e in tes.events:
        labels.setdefault(merge[e.id], set()).update(e.labels)
    events = tuple(
        Event(eid, frozenset(labels[eid])) for eid in sorted(labels)
    )

    delays: list[EventDelay] = []
    seen: set[tuple[str, str, tuple]] = set()
    for d in tes.delays:
        src, dst = merge[d.src], merge[d.dst]
        if src == dst:
            if d.delta.contains(0):
                continue
            raise ZeroCycleContradiction(
                f"merging {d.src} with {d.dst} contradicts their delay {d.delta}"
            )
        key = (src, dst, d.delta.intervals)
        if key not in seen:
            seen.add(key)
            delays.append(EventDelay(src, dst, d.delta))
    delays.sort(key=lambda d: (d.src, d.dst, d.delta.sort_key))
    return TimedEventStructure(events, tuple(delays)), merge


def normal_encoding(score: Score) -> tuple[TimedEventStructure, EncodingMap]:
    """Encode and normalize in one step; the map already follows merges."""
    tes, emap = encode_score(score)
    ntes, merge = normalize(tes)
    return ntes, emap.composed(merge)


def event_actions(score: Score, tes: TimedEventStructure, event_id: str) -> list[str]:
    """Actions the event emits when fired, in label order, blanks skipped.

    An interactive object's single instant emits its start action then
    its end action.
    """
    by_id = {o.id: o for o in score.objects}
    out: list[str] = []
    for kind, obj_id in tes.event(event_id).sorted_labels():
        o = by_id[obj_id]
        if kind == START_POINT:
            emitted = [o.start_action]
        elif kind == END_POINT:
            emitted = [o.end_action]
        else:
            emitted = [o.start_action, o.end_action]
        out.extend(a for a in emitted if a)
    return out


def validate_trace(
    tes: TimedEventStructure,
    trace: dict[str, int],
    horizon: Optional[int] = None,
) -> bool:
    """True iff the trace assigns every event a time satisfying all delays."""
    missing = [e.id for e in tes.events if e.id not in trace]
    if missing:
        raise PartialTrace(f"trace misses events: {', '.join(sorted(missing))}")
    for e in tes.events:
        t = trace[e.id]
        if t < 0 or (horizon is not None and t > horizon):
            return False
    for d in tes.delays:
        if not d.delta.contains(trace[d.dst] - trace[d.src]):
            return False
    return True
