"""Trace-property queries: playability, duration, simultaneity, words.

Every query lowers the score to its normalized event structure first.
Contiguous constraint sets ride the shortest-path fast lane; anything
with gaps falls back to finite-domain search or exhaustive enumeration
within a horizon. Under the trace semantics used throughout, a trace is
an integer-time assignment to the events with all times in [0, horizon]
(the horizon defaults per `csp.default_horizon`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .csp import (
    NODE_BUDGET,
    TRACE_CAP,
    FiniteDomainProblem,
    default_horizon,
    enumerate_traces,
    solve,
)
from .durations import DurationSet
from .errors import Inconsistent, UnboundedDurations, Unplayable
from .events import (
    EncodingMap,
    TimedEventStructure,
    event_actions,
    normal_encoding,
    structure_constraints,
)
from .score import ConstraintSet, Score
from .stp import apsp, to_stp

Trace = dict[str, int]


@dataclass(frozen=True)
class PropertyReport:
    property: str
    verdict: object  # bool or int, depending on the property
    witness: Optional[Trace]
    method: str  # "stp" | "csp" | "enumeration"
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "property": self.property,
            "verdict": self.verdict,
            "witness": self.witness,
            "method": self.method,
            "details": self.details,
        }


@dataclass(frozen=True)
class Word:
    """An action sequence to look for inside traces.

    consecutive: the actions appear at adjacent positions of the trace's
    linearization; scattered: as a subsequence. The quantifier asks for
    some trace or all traces.
    """

    actions: tuple[str, ...]
    mode: str = "scattered"  # "consecutive" | "scattered"
    quantifier: str = "some"  # "some" | "all"

    def __post_init__(self):
        if not self.actions:
            raise ValueError("a word needs at least one action")
        if self.mode not in ("consecutive", "scattered"):
            raise ValueError(f"mode must be consecutive or scattered, got {self.mode!r}")
        if self.quantifier not in ("some", "all"):
            raise ValueError(f"quantifier must be some or all, got {self.quantifier!r}")


def prepared(score: Score) -> tuple[TimedEventStructure, EncodingMap]:
    """Validated, hierarchy-free, encoded, normalized view of a score."""
    return normal_encoding(score)


def _is_contiguous(cs: ConstraintSet) -> bool:
    return all(c.delta.is_contiguous for c in cs.constraints)


def _has_unbounded(cs: ConstraintSet) -> bool:
    return any(not c.delta.is_finite for c in cs.constraints)


def _enumerated(
    cs: ConstraintSet,
    horizon: Optional[int],
    node_budget: int,
    max_traces: int,
) -> tuple[list[Trace], int]:
    h = default_horizon(cs) if horizon is None else horizon
    problem = FiniteDomainProblem.from_constraints(cs, h)
    return enumerate_traces(problem, node_budget, max_traces), h


def score_traces(
    score: Score,
    horizon: Optional[int] = None,
    node_budget: int = NODE_BUDGET,
    max_traces: int = TRACE_CAP,
) -> list[Trace]:
    """All traces of the normalized structure, lexicographic by event id."""
    ntes, _ = prepared(score)
    traces, _ = _enumerated(structure_constraints(ntes), horizon, node_budget, max_traces)
    return traces


def playability(
    score: Score,
    horizon: Optional[int] = None,
    node_budget: int = NODE_BUDGET,
) -> PropertyReport:
    """Does some valid trace exist?

    Contiguous deltas: shortest-path consistency, witnessed by the
    earliest schedule. Otherwise: finite-domain search within the
    horizon.
    """
    ntes, _ = prepared(score)
    cs = structure_constraints(ntes)
    if _is_contiguous(cs):
        try:
            matrix = apsp(to_stp(cs))
        except Inconsistent as exc:
            return PropertyReport(
                "playable", False, None, "stp", {"cycle": exc.cycle or []}
            )
        earliest = matrix.earliest()
        if horizon is not None and any(t > horizon for t in earliest.values()):
            # each event's earliest time is its global minimum, so one of
            # them beyond the horizon rules out every trace
            return PropertyReport("playable", False, None, "stp", {"horizon": horizon})
        return PropertyReport("playable", True, earliest, "stp", {})
    h = default_horizon(cs) if horizon is None else horizon
    problem = FiniteDomainProblem.from_constraints(cs, h)
    witness = solve(problem, node_budget)
    return PropertyReport("playable", witness is not None, witness, "csp", {"horizon": h})


def min_duration(
    score: Score,
    horizon: Optional[int] = None,
    node_budget: int = NODE_BUDGET,
    max_traces: int = TRACE_CAP,
) -> PropertyReport:
    """Minimum over valid traces of the latest event time."""
    ntes, _ = prepared(score)
    cs = structure_constraints(ntes)
    if _is_contiguous(cs):
        try:
            matrix = apsp(to_stp(cs))
        except Inconsistent as exc:
            raise Unplayable("score admits no trace") from exc
        earliest = matrix.earliest()
        makespan = max(earliest.values(), default=0)
        if horizon is not None and makespan > horizon:
            raise Unplayable(f"no trace fits within horizon {horizon}")
        return PropertyReport("min-duration", makespan, earliest, "stp", {})
    traces, h = _enumerated(cs, horizon, node_budget, max_traces)
    if not traces:
        raise Unplayable(f"no trace within horizon {h}")
    best = min(traces, key=lambda tr: max(tr.values(), default=0))
    verdict = max(best.values(), default=0)
    return PropertyReport("min-duration", verdict, best, "enumeration", {"horizon": h})


def _largest_cohort(trace: Trace) -> int:
    """Size of the biggest group of events sharing one timestamp."""
    counts: dict[int, int] = {}
    for t in trace.values():
        counts[t] = counts.get(t, 0) + 1
    return max(counts.values(), default=0)


def simultaneity_bounds(
    score: Score,
    horizon: Optional[int] = None,
    node_budget: int = NODE_BUDGET,
    max_traces: int = TRACE_CAP,
) -> PropertyReport:
    """How crowded can an instant get, and how quiet can the busiest be.

    Event level: the largest same-timestamp group per trace, reported as
    min and max over all traces. Object level: the most static objects
    simultaneously sounding (t(start) <= t < t(end)), max over traces.
    Needs the full trace set, so unbounded deltas require an explicit
    horizon.
    """
    ntes, emap = prepared(score)
    cs = structure_constraints(ntes)
    if horizon is None and _has_unbounded(cs):
        raise UnboundedDurations(
            "trace set is infinite without a horizon; pass one explicitly"
        )
    traces, h = _enumerated(cs, horizon, node_budget, max_traces)
    if not traces:
        raise Unplayable(f"no trace within horizon {h}")
    statics = [o for o in score.objects if not o.interactive]
    event_min: Optional[int] = None
    event_max = 0
    object_max = 0
    witness: Optional[Trace] = None
    for tr in traces:
        cohort = _largest_cohort(tr)
        if cohort > event_max:
            event_max = cohort
            witness = tr
        if event_min is None or cohort < event_min:
            event_min = cohort
        busiest = 0
        for t in range(0, max(tr.values(), default=0) + 1):
            active = sum(
                1
                for o in statics
                if tr[emap.event_of(o.sp.id)] <= t < tr[emap.event_of(o.ep.id)]
            )
            busiest = max(busiest, active)
        object_max = max(object_max, busiest)
    return PropertyReport(
        "simultaneity",
        event_max,
        witness,
        "enumeration",
        {
            "event_min": event_min,
            "event_max": event_max,
            "object_max": object_max,
            "traces": len(traces),
            "horizon": h,
        },
    )


def linearize(score: Score, ntes: TimedEventStructure, trace: Trace) -> list[str]:
    """The trace's action sequence: events by (time, id), then their actions."""
    ordered = sorted(trace, key=lambda e: (trace[e], e))
    out: list[str] = []
    for event_id in ordered:
        out.extend(event_actions(score, ntes, event_id))
    return out


def _matches(sequence: list[str], word: Word) -> bool:
    k = len(word.actions)
    if word.mode == "consecutive":
        return any(
            list(word.actions) == sequence[i : i + k]
            for i in range(len(sequence) - k + 1)
        )
    it = iter(sequence)
    return all(a in it for a in word.actions)


def contains_word(
    score: Score,
    word: Word,
    horizon: Optional[int] = None,
    node_budget: int = NODE_BUDGET,
    max_traces: int = TRACE_CAP,
) -> PropertyReport:
    """Does the word occur in some trace (or in all of them)?

    On a score with no traces at all, "all" is vacuously true and
    "some" is false.
    """
    ntes, _ = prepared(score)
    cs = structure_constraints(ntes)
    if horizon is None and _has_unbounded(cs):
        raise UnboundedDurations(
            "trace set is infinite without a horizon; pass one explicitly"
        )
    traces, h = _enumerated(cs, horizon, node_budget, max_traces)
    count = 0
    witness: Optional[Trace] = None
    for tr in traces:
        if _matches(linearize(score, ntes, tr), word):
            count += 1
            if witness is None:
                witness = tr
    verdict = count == len(traces) if word.quantifier == "all" else count > 0
    return PropertyReport(
        "contains-word",
        verdict,
        witness,
        "enumeration",
        {"count": count, "traces": len(traces), "horizon": h},
    )


def filtered_property(
    score: Score,
    given: Optional[Callable[[Trace], bool]],
    conclusion: Callable[[Trace], bool],
    horizon: Optional[int] = None,
    node_budget: int = NODE_BUDGET,
    max_traces: int = TRACE_CAP,
) -> PropertyReport:
    """Do all traces satisfying `given` also satisfy `conclusion`?

    Both predicates see point-level assignments (point id -> time), so
    conditionals like "if this starts before 3, that lasts longer than
    2" read naturally. `given` of None keeps every trace.
    """
    ntes, emap = prepared(score)
    cs = structure_constraints(ntes)
    traces, h = _enumerated(cs, horizon, node_budget, max_traces)
    points = list(emap.point_to_event)
    selected = 0
    holds = 0
    counterexample: Optional[Trace] = None
    for tr in traces:
        view = {p: tr[emap.event_of(p)] for p in points}
        if given is not None and not given(view):
            continue
        selected += 1
        if conclusion(view):
            holds += 1
        elif counterexample is None:
            counterexample = tr
    return PropertyReport(
        "filtered",
        holds == selected,
        counterexample,
        "enumeration",
        {"selected": selected, "holding": holds, "traces": len(traces), "horizon": h},
    )
