"""Online dispatch of a score's events in logical time.

The engine owns one ExecutionState and consumes stimuli strictly in
time order: eager static events fire at their window lower bound as
soon as enabled, live triggers fire interactive events anywhere inside
their window, and an interactive window running out is resolved by
policy (fire it at the bound, or cancel the whole run). Every firing
propagates bounds locally over the closed distance matrix; on a
dispatchable network that one-hop pass keeps every window exact, which
is what makes online execution cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import AlreadyExecuted, NotEnabled, OutsideWindow
from .events import INTERACTIVE, event_actions, normal_encoding, structure_constraints
from .score import Score
from .stp import DispatchableNetwork, apsp, make_dispatchable, to_stp

AUTO_FIRE = "autoFire"
CANCEL = "cancel"


@dataclass(frozen=True)
class TriggerPolicy:
    """What happens when an interactive window expires; dispatch is eager."""

    on_expiry: str = AUTO_FIRE  # AUTO_FIRE | CANCEL
    static_dispatch: str = "eager"

    def __post_init__(self):
        if self.on_expiry not in (AUTO_FIRE, CANCEL):
            raise ValueError(f"on_expiry must be autoFire or cancel, got {self.on_expiry!r}")
        if self.static_dispatch != "eager":
            raise ValueError("only eager static dispatch is implemented")


@dataclass(frozen=True)
class FireRecord:
    time: int
    event: str
    labels: tuple
    actions: tuple[str, ...]
    cause: str  # "eager" | "trigger" | "autoFire"


@dataclass(frozen=True)
class RejectRecord:
    time: int
    event: str
    reason: str  # "NotEnabled" | "OutsideWindow"
    lb: Optional[int]
    ub: Optional[int]


@dataclass(frozen=True)
class CancelRecord:
    time: int
    expired: str
    unexecutable: tuple[str, ...]


@dataclass
class DispatchLog:
    records: list[FireRecord] = field(default_factory=list)
    rejected: list[RejectRecord] = field(default_factory=list)
    cancelled: Optional[CancelRecord] = None
    status: str = "running"
    end_time: int = 0

    def trace(self) -> dict[str, int]:
        return {r.event: r.time for r in self.records}


@dataclass
class ExecutionState:
    network: DispatchableNetwork
    policy: TriggerPolicy
    executed: dict[str, int]
    windows: dict[str, list]  # event -> [lb, ub], ub None when unbounded
    clock: int
    status: str  # "running" | "finished" | "cancelled"
    log: DispatchLog
    labels: dict[str, tuple]
    actions: dict[str, tuple[str, ...]]


def init_execution(
    network: DispatchableNetwork,
    policy: TriggerPolicy = TriggerPolicy(),
    labels: Optional[dict] = None,
    actions: Optional[dict] = None,
) -> ExecutionState:
    windows = {e: list(w) for e, w in network.windows().items()}
    return ExecutionState(
        network=network,
        policy=policy,
        executed={},
        windows=windows,
        clock=0,
        status="running" if windows else "finished",
        log=DispatchLog(),
        labels=labels or {},
        actions=actions or {},
    )


def enabled(state: ExecutionState, e: str) -> bool:
    """All strict predecessors executed; unconstrained events start enabled."""
    return all(f in state.executed for f in state.network.predecessors[e])


def fire(state: ExecutionState, e: str, t: int, cause: str = "trigger") -> FireRecord:
    """Execute e at time t and clamp every pending window around it."""
    if e in state.executed:
        raise AlreadyExecuted(f"{e} already fired at {state.executed[e]}")
    if e not in state.windows:
        raise KeyError(e)
    if state.status == "cancelled":
        raise NotEnabled("the run is cancelled")
    if not enabled(state, e):
        missing = sorted(f for f in state.network.predecessors[e] if f not in state.executed)
        raise NotEnabled(f"{e} still awaits {', '.join(missing)}")
    lb, ub = state.windows[e]
    lb = max(lb, state.clock)  # time does not run backwards
    if t < lb or (ub is not None and t > ub):
        raise OutsideWindow(lb, ub)

    del state.windows[e]
    state.executed[e] = t
    state.clock = t
    matrix = state.network.matrix
    i = matrix.index(e)
    d = matrix.d
    for f, w in state.windows.items():
        j = matrix.index(f)
        if math.isfinite(d[i, j]) and (w[1] is None or t + d[i, j] < w[1]):
            w[1] = t + int(d[i, j])
        if math.isfinite(d[j, i]) and t - d[j, i] > w[0]:
            w[0] = t - int(d[j, i])
        assert w[1] is None or w[0] <= w[1], f"window of {f} emptied by firing {e}@{t}"
    record = FireRecord(
        t, e, state.labels.get(e, ()), state.actions.get(e, ()), cause
    )
    state.log.records.append(record)
    if not state.windows:
        state.status = "finished"
    return record


def _next_action(state: ExecutionState, until: float):
    """Earliest pending internal action at or before `until`.

    Returns (time, rank, event) where rank 0 is an eager fire and rank 1
    an expiry resolution; chronological order with eager first on ties.
    """
    best = None
    interactive = state.network.interactive
    for e, (lb, ub) in state.windows.items():
        if e in interactive:
            if ub is not None and ub < until:
                when = ub if state.policy.on_expiry == AUTO_FIRE else ub + 1
                cand = (when, 1, e)
            else:
                continue
        else:
            if not enabled(state, e):
                continue
            when = max(lb, state.clock)
            if when > until:
                continue
            cand = (when, 0, e)
        if best is None or cand < best:
            best = cand
    return best


def next_wake(state: ExecutionState) -> Optional[int]:
    """Logical time of the next self-acting step, None when only triggers
    (or nothing) remain. Useful for schedulers: sleeping until this time
    and calling advance() is enough to never miss an eager fire or expiry.
    """
    if state.status != "running":
        return None
    action = _next_action(state, math.inf)
    return None if action is None else action[0]


def advance(state: ExecutionState, t: Optional[int], observer=None) -> list:
    """Let logical time pass up to t (None: until nothing is pending).

    Processes due actions chronologically: enabled static events fire
    eagerly at their lower bound; an interactive window that ends before
    t is resolved per policy: fired at its upper bound, or the run is
    cancelled one tick after it. Triggers at exactly t stay possible:
    expiry strictly precedes t.

    An observer, when given, is called as observer(kind, record, state)
    right after each step, while the state still shows that step's
    immediate aftermath; the full record list is also returned.
    """
    until = math.inf if t is None else t
    if until < state.clock:
        raise ValueError(f"cannot advance to {t}: clock is at {state.clock}")
    notify = observer if observer is not None else (lambda kind, record, st: None)
    emitted = []
    while state.status == "running":
        action = _next_action(state, until)
        if action is None:
            break
        when, rank, e = action
        if rank == 0:
            record = fire(state, e, when, cause="eager")
        elif state.policy.on_expiry == AUTO_FIRE:
            record = fire(state, e, when, cause=AUTO_FIRE)
        else:
            state.clock = when
            state.status = "cancelled"
            record = CancelRecord(when, e, tuple(sorted(state.windows)))
            state.log.cancelled = record
        emitted.append(record)
        notify(_kind(record), record, state)
    if state.status == "running" and t is not None and t > state.clock:
        state.clock = t
    state.log.status = state.status
    state.log.end_time = state.clock
    return emitted


def setup_execution(score: Score, policy: TriggerPolicy = TriggerPolicy()):
    """Full pipeline from a score to a ready-to-run state.

    Raises NonContiguousDuration when any delta has gaps (dispatch needs
    the shortest-path form) and Inconsistent when the score admits no
    schedule at all.
    """
    ntes, emap = normal_encoding(score)
    matrix = apsp(to_stp(structure_constraints(ntes)))
    interactive = {
        e.id for e in ntes.events if any(kind == INTERACTIVE for kind, _ in e.labels)
    }
    network = make_dispatchable(matrix, interactive)
    labels = {e.id: tuple(e.sorted_labels()) for e in ntes.events}
    actions = {e.id: tuple(event_actions(score, ntes, e.id)) for e in ntes.events}
    state = init_execution(network, policy, labels, actions)
    return state, ntes, emap


def resolve_trigger(state: ExecutionState, emap, ref: str) -> str:
    """Map a trigger reference (event id or object id) to an event id."""
    if ref in state.windows or ref in state.executed:
        return ref
    point = f"{ref}.start"
    if point in emap.point_to_event:
        return emap.event_of(point)
    raise KeyError(f"unknown trigger target {ref!r}")


def run_simulated(
    score: Score,
    trigger_script=(),
    policy: TriggerPolicy = TriggerPolicy(),
    observer=None,
) -> DispatchLog:
    """Deterministic offline run: scripted triggers, logical clock only.

    Script entries are (event-or-object id, time) pairs, replayed in
    time order (ties keep script order). Rejected triggers are logged
    and change nothing. After the script the run drains: with autoFire
    every remaining event resolves; with cancel, or with an untriggered
    unbounded interactive window, the run may end cancelled or stalled.
    """
    state, ntes, emap = setup_execution(score, policy)
    notify = observer if observer is not None else (lambda kind, payload, st: None)
    notify("init", None, state)
    if state.status != "running":
        state.log.status = state.status
        notify("end", None, state)
        return state.log
    for ref, when in sorted(trigger_script, key=lambda entry: entry[1]):
        if state.status != "running":
            break
        advance(state, when, observer=notify)
        if state.status != "running":
            break
        target = resolve_trigger(state, emap, ref)
        try:
            record = fire(state, target, when, cause="trigger")
            notify("fired", record, state)
        except OutsideWindow as exc:
            rejection = RejectRecord(when, target, "OutsideWindow", exc.lb, exc.ub)
            state.log.rejected.append(rejection)
            notify("rejected", rejection, state)
        except (NotEnabled, AlreadyExecuted):
            window = state.windows.get(target)
            if window is not None:
                lb, ub = window
            else:
                lb = ub = state.executed.get(target)
            rejection = RejectRecord(when, target, "NotEnabled", lb, ub)
            state.log.rejected.append(rejection)
            notify("rejected", rejection, state)
    if state.status == "running":
        advance(state, None, observer=notify)
    state.log.status = state.status
    state.log.end_time = state.clock
    notify("end", None, state)
    return state.log


def _kind(record) -> str:
    if isinstance(record, FireRecord):
        return "fired"
    if isinstance(record, CancelRecord):
        return "cancelled"
    return "rejected"
