"""Structural model of interactive scores.

A score is a set of temporal objects (each owning a start and an end
point plus a set of admissible durations) bound by point-to-point
relations. Objects whose duration set is exactly {0} are interactive:
their single instant is placed live by a performer. This module owns
validation, hierarchy compilation, and extraction of the score's
temporal constraint set.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from .durations import ANY_DELAY, DurationSet
from .errors import ScoreValidationError

START = "start"
END = "end"


@dataclass(frozen=True, order=True)
class Point:
    """A start or end point, identified by its owning object and kind."""

    owner: str
    kind: str  # START or END

    def __post_init__(self):
        if self.kind not in (START, END):
            raise ValueError(f"point kind must be 'start' or 'end', got {self.kind!r}")

    @property
    def id(self) -> str:
        return f"{self.owner}.{self.kind}"

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True)
class TemporalObject:
    """A score element: two points and the durations admissible between them.

    An object is interactive iff its duration set is exactly {0}; this is
    derived, never stored. Actions are opaque strings emitted when the
    corresponding point is dispatched.
    """

    id: str
    duration: DurationSet
    parent: Optional[str] = None
    start_action: str = ""
    end_action: str = ""

    @property
    def sp(self) -> Point:
        return Point(self.id, START)

    @property
    def ep(self) -> Point:
        return Point(self.id, END)

    @property
    def interactive(self) -> bool:
        return self.duration.is_singleton_zero


@dataclass(frozen=True)
class TemporalRelation:
    """Constraint t(dst) - t(src) in delta between two points."""

    id: str
    src: Point
    dst: Point
    delta: DurationSet


@dataclass(frozen=True)
class Score:
    """Temporal objects plus explicit point-to-point relations.

    Implicit duration relations (one per object, from its start point to
    its end point) are derived on demand, never stored.
    """

    name: str
    objects: tuple[TemporalObject, ...]
    relations: tuple[TemporalRelation, ...] = ()

    def object(self, obj_id: str) -> TemporalObject:
        for o in self.objects:
            if o.id == obj_id:
                return o
        raise KeyError(obj_id)

    @property
    def points(self) -> list[Point]:
        out = []
        for o in self.objects:
            out.append(o.sp)
            out.append(o.ep)
        return out


@dataclass(frozen=True)
class DiffConstraint:
    """t(dst) - t(src) must lie in delta."""

    src: str
    dst: str
    delta: DurationSet


@dataclass(frozen=True)
class ConstraintSet:
    """Difference constraints over named time variables.

    Every variable additionally satisfies t(v) >= 0; consumers treat that
    nonnegativity as implicit rather than materializing one constraint
    per variable.
    """

    variables: tuple[str, ...]
    constraints: tuple[DiffConstraint, ...]


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    subjects: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "subjects": list(self.subjects)}

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_if_invalid(self) -> None:
        if not self.ok:
            raise ScoreValidationError(self)


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _zero_classes(score: Score) -> dict[str, str]:
    """Map each point id to its zero-distance class representative.

    The classes are the transitive closure of explicit relations whose
    delta is exactly {0} together with the implicit duration relation of
    every interactive object.
    """
    uf = _UnionFind(p.id for p in score.points)
    for o in score.objects:
        if o.interactive:
            uf.union(o.sp.id, o.ep.id)
    known = {p.id for p in score.points}
    for r in score.relations:
        if r.delta.is_singleton_zero and r.src.id in known and r.dst.id in known:
            uf.union(r.src.id, r.dst.id)
    return {p.id: uf.find(p.id) for p in score.points}


def validate_score(score: Score) -> ValidationReport:
    """Check the well-formedness conditions of an interactive score.

    Zero violations means: object ids unique, relations join distinct
    existing points, no two interactive objects fall in the same
    zero-distance class, at most one explicit relation spans an object's
    own start/end pair, and parent chains are acyclic.
    """
    report = ValidationReport()
    seen_ids: set[str] = set()
    for o in score.objects:
        if o.id in seen_ids:
            report.violations.append(
                Violation("DuplicateObject", f"object id {o.id!r} defined twice", (o.id,))
            )
        seen_ids.add(o.id)
        # ids double as event-id stems: "." is the point separator and
        # "@" prefixes reserved nodes
        if not o.id or "." in o.id or o.id.startswith("@"):
            report.violations.append(
                Violation(
                    "BadId",
                    f"object id {o.id!r} must be nonempty, contain no '.', not start with '@'",
                    (o.id,),
                )
            )

    known_points = {p.id for p in score.points}
    for r in score.relations:
        if r.src == r.dst:
            report.violations.append(
                Violation(
                    "DistinctPoints",
                    f"relation {r.id!r} joins point {r.src.id} to itself",
                    (r.id, r.src.id),
                )
            )
        for endpoint in (r.src, r.dst):
            if endpoint.id not in known_points:
                report.violations.append(
                    Violation(
                        "UnknownPoint",
                        f"relation {r.id!r} references missing point {endpoint.id}",
                        (r.id, endpoint.id),
                    )
                )

    # Def-level rule: interactive objects never share a zero-distance class.
    classes = _zero_classes(score)
    rep_to_interactive: dict[str, str] = {}
    for o in score.objects:
        if not o.interactive:
            continue
        rep = classes[o.sp.id]
        other = rep_to_interactive.get(rep)
        if other is not None and other != o.id:
            report.violations.append(
                Violation(
                    "InteractiveSimultaneity",
                    f"interactive objects {other!r} and {o.id!r} are forced simultaneous",
                    (other, o.id),
                )
            )
        else:
            rep_to_interactive[rep] = o.id

    # At most one explicit relation may span an object's own sp/ep pair;
    # the implicit duration relation is the canonical one.
    for o in score.objects:
        pair = {o.sp.id, o.ep.id}
        spanning = [r for r in score.relations if {r.src.id, r.dst.id} == pair]
        if len(spanning) > 1:
            report.violations.append(
                Violation(
                    "DuplicateDurationRelation",
                    f"object {o.id!r} has {len(spanning)} explicit start/end relations",
                    tuple(r.id for r in spanning),
                )
            )

    # Parent chains must be acyclic and reference existing objects.
    ids = {o.id for o in score.objects}
    for o in score.objects:
        if o.parent is not None and o.parent not in ids:
            report.violations.append(
                Violation(
                    "UnknownObject",
                    f"object {o.id!r} names missing parent {o.parent!r}",
                    (o.id, o.parent),
                )
            )
    by_id = {o.id: o for o in score.objects}
    for o in score.objects:
        seen = {o.id}
        cur = o.parent
        while cur is not None and cur in by_id:
            if cur in seen:
                report.violations.append(
                    Violation(
                        "HierarchyCycle",
                        f"parent chain of {o.id!r} revisits {cur!r}",
                        tuple(sorted(seen)),
                    )
                )
                break
            seen.add(cur)
            cur = by_id[cur].parent
    return report


# ---------------------------------------------------------------------------
# derived relations


def derive_implicit_relations(score: Score) -> list[TemporalRelation]:
    """One duration relation per object: sp(o) --d(o)--> ep(o), id ascending."""
    return [
        TemporalRelation(f"duration:{o.id}", o.sp, o.ep, o.duration)
        for o in sorted(score.objects, key=lambda o: o.id)
    ]


def compile_hierarchy(score: Score) -> Score:
    """Rewrite parent links into explicit containment relations.

    A child starts no earlier than its parent and ends no later: two
    [0, inf) relations per parented object. Parent fields are cleared,
    so the compilation is idempotent.
    """
    validate_score(score).raise_if_invalid()
    extra: list[TemporalRelation] = []
    by_id = {o.id: o for o in score.objects}
    for child in sorted(score.objects, key=lambda o: o.id):
        if child.parent is None:
            continue
        parent = by_id[child.parent]
        extra.append(
            TemporalRelation(f"contain-start:{child.id}", parent.sp, child.sp, ANY_DELAY)
        )
        extra.append(
            TemporalRelation(f"contain-end:{child.id}", child.ep, parent.ep, ANY_DELAY)
        )
    if not extra:
        return score
    objects = tuple(replace(o, parent=None) for o in score.objects)
    compiled = Score(score.name, objects, score.relations + tuple(extra))
    validate_score(compiled).raise_if_invalid()
    return compiled


def score_constraints(score: Score) -> ConstraintSet:
    """The score's temporal constraint: duration rows then explicit rows.

    Variables are point ids; t(v) >= 0 is implicit for all of them.
    Hierarchy must already be compiled away (parent fields ignored here
    would silently drop constraints, so they are rejected).
    """
    if any(o.parent is not None for o in score.objects):
        raise ValueError("compile_hierarchy must run before score_constraints")
    constraints = [
        DiffConstraint(r.src.id, r.dst.id, r.delta) for r in derive_implicit_relations(score)
    ]
    constraints += [DiffConstraint(r.src.id, r.dst.id, r.delta) for r in score.relations]
    variables = tuple(sorted(p.id for p in score.points))
    return ConstraintSet(variables, tuple(constraints))
