import pytest

from iscore.durations import ZERO, DurationSet
from iscore.errors import ScoreValidationError
from iscore.score import (
    Point,
    Score,
    TemporalObject,
    TemporalRelation,
    compile_hierarchy,
    derive_implicit_relations,
    score_constraints,
    validate_score,
)


def obj(oid, duration=DurationSet.between(1, 3), parent=None):
    return TemporalObject(oid, duration, parent=parent)


def rel(rid, src, dst, delta):
    return TemporalRelation(rid, Point(*src), Point(*dst), delta)


def codes(score):
    return sorted(v.code for v in validate_score(score).violations)


def test_point_identity_and_object_endpoints():
    o = obj("A")
    assert o.sp == Point("A", "start")
    assert o.ep.id == "A.end"
    assert not o.interactive


def test_interactive_is_exactly_zero_duration():
    assert obj("I", ZERO).interactive
    assert not obj("J", DurationSet.between(0, 1)).interactive


def test_valid_score_has_no_violations():
    s = Score(
        "ok",
        (obj("A"), obj("B")),
        (rel("r0", ("A", "end"), ("B", "start"), ZERO),),
    )
    assert validate_score(s).ok


def test_duplicate_object_ids():
    s = Score("dup", (obj("A"), obj("A")), ())
    assert "DuplicateObject" in codes(s)


@pytest.mark.parametrize("bad", ["", "a.b", "@origin"])
def test_object_ids_that_break_event_naming(bad):
    assert "BadId" in codes(Score("bad", (obj(bad),), ()))


def test_relation_to_missing_point():
    s = Score("miss", (obj("A"),), (rel("r0", ("A", "end"), ("Z", "start"), ZERO),))
    assert "UnknownPoint" in codes(s)


def test_self_relation_rejected():
    s = Score("self", (obj("A"),), (rel("r0", ("A", "start"), ("A", "start"), ZERO),))
    assert "DistinctPoints" in codes(s)


def test_two_interactive_objects_forced_simultaneous():
    # zero chain I.end = J.start collapses both zero-width objects
    s = Score(
        "clash",
        (obj("I", ZERO), obj("J", ZERO)),
        (rel("r0", ("I", "end"), ("J", "start"), ZERO),),
    )
    assert "InteractiveSimultaneity" in codes(s)


def test_two_interactive_objects_apart_are_fine():
    s = Score(
        "apart",
        (obj("I", ZERO), obj("J", ZERO)),
        (rel("r0", ("I", "end"), ("J", "start"), DurationSet.at_least(1)),),
    )
    assert validate_score(s).ok


def test_duplicate_duration_relation():
    relations = (
        rel("r0", ("A", "start"), ("A", "end"), DurationSet.between(1, 2)),
        rel("r1", ("A", "end"), ("A", "start"), ZERO),
    )
    assert "DuplicateDurationRelation" in codes(Score("ddr", (obj("A"),), relations))

    one = Score("one", (obj("A"),), relations[:1])
    assert validate_score(one).ok


def test_missing_parent_and_cycle():
    assert "UnknownObject" in codes(Score("mp", (obj("A", parent="Z"),), ()))
    s = Score("cyc", (obj("A", parent="B"), obj("B", parent="A")), ())
    assert "HierarchyCycle" in codes(s)


def test_derive_implicit_relations_ordered_by_object():
    s = Score("imp", (obj("B"), obj("A")), ())
    ids = [r.id for r in derive_implicit_relations(s)]
    assert ids == ["duration:A", "duration:B"]


def test_compile_hierarchy_adds_containment_and_clears_parents():
    s = Score("h", (obj("P"), obj("C", parent="P")), ())
    compiled = compile_hierarchy(s)
    assert all(o.parent is None for o in compiled.objects)
    ids = {r.id for r in compiled.relations}
    assert ids == {"contain-start:C", "contain-end:C"}
    by_id = {r.id: r for r in compiled.relations}
    assert by_id["contain-start:C"].src.id == "P.start"
    assert by_id["contain-start:C"].dst.id == "C.start"
    assert by_id["contain-end:C"].src.id == "C.end"
    assert by_id["contain-end:C"].dst.id == "P.end"
    # second run is a no-op
    assert compile_hierarchy(compiled) is compiled


def test_compile_hierarchy_rejects_invalid_scores():
    with pytest.raises(ScoreValidationError):
        compile_hierarchy(Score("bad", (obj("A"), obj("A")), ()))


def test_score_constraints_shape_and_order():
    s = Score(
        "cs",
        (obj("B", DurationSet.single(2)), obj("A")),
        (rel("r0", ("A", "end"), ("B", "start"), DurationSet.at_least(1)),),
    )
    cs = score_constraints(s)
    assert cs.variables == ("A.end", "A.start", "B.end", "B.start")
    # durations ascending by object id come first, explicit rows follow
    assert [(c.src, c.dst) for c in cs.constraints] == [
        ("A.start", "A.end"),
        ("B.start", "B.end"),
        ("A.end", "B.start"),
    ]


def test_score_constraints_requires_compiled_hierarchy():
    s = Score("p", (obj("P"), obj("C", parent="P")), ())
    with pytest.raises(ValueError):
        score_constraints(s)
    cs = score_constraints(compile_hierarchy(s))
    assert len(cs.constraints) == 2 + 2
