"""Command-line surface: exit codes, canonical output, golden stability."""

import json

import pytest

from iscore.analysis import playability
from iscore.cli import main
from iscore.durations import DurationSet
from iscore.events import normal_encoding, validate_trace
from iscore.persistence import load_score, save_score
from iscore.score import Score, TemporalObject, TemporalRelation


def obj(oid, delta, **kw):
    return TemporalObject(oid, delta, **kw)


def rel(rid, src, dst, delta):
    return TemporalRelation(rid, src, dst, delta)


@pytest.fixture
def seq2_path(tmp_path):
    a = obj("A", DurationSet.between(2, 4), start_action="a1", end_action="a2")
    b = obj("B", DurationSet.single(3), start_action="b1", end_action="b2")
    score = Score("seq2", (a, b), (rel("glue", a.ep, b.sp, DurationSet.zero()),))
    path = tmp_path / "seq2.json"
    save_score(score, str(path))
    return str(path)


@pytest.fixture
def cue_path(tmp_path):
    lead = obj("lead", DurationSet.single(1))
    go = obj("go", DurationSet.zero())
    tail = obj("tail", DurationSet.single(2))
    score = Score(
        "cue",
        (lead, go, tail),
        (
            rel("r1", lead.ep, go.sp, DurationSet.between(0, 2)),
            rel("r2", go.ep, tail.sp, DurationSet.single(1)),
        ),
    )
    path = tmp_path / "cue.json"
    save_score(score, str(path))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# check


def test_check_playable(seq2_path, capsys):
    code, out, err = run(capsys, "check", seq2_path)
    assert code == 0
    assert err == ""
    report = json.loads(out)
    assert report["property"] == "playable"
    assert report["verdict"] is True
    assert report["method"] == "stp"
    assert report["witness"] == {"A.end": 2, "A.start": 0, "B.end": 5}


def test_check_verdict_matches_the_library(seq2_path, capsys):
    code, _, _ = run(capsys, "check", seq2_path)
    assert (code == 0) == playability(load_score(seq2_path)).verdict


def test_gen_then_check_round_trip(tmp_path, capsys):
    target = str(tmp_path / "no.json")
    code, out, _ = run(capsys, "gen", "subset-sum", "--set", "3,5,7", "--target", "2", "-o", target)
    assert code == 0
    code, out, _ = run(capsys, "check", target)
    assert code == 1  # 2 is not a subset sum of {3, 5, 7}
    assert json.loads(out)["verdict"] is False

    yes = str(tmp_path / "yes.json")
    run(capsys, "gen", "subset-sum", "--set", "3,5,7", "--target", "8", "-o", yes)
    code, out, _ = run(capsys, "check", yes)
    assert code == 0
    assert json.loads(out)["verdict"] is True


def test_gen_to_stdout_is_a_loadable_document(tmp_path, capsys):
    code, out, _ = run(capsys, "gen", "subset-sum", "--set", "2,4", "--target", "6")
    assert code == 0
    path = tmp_path / "gen.json"
    path.write_text(out, encoding="utf-8")
    score = load_score(str(path))
    assert [o.id for o in score.objects] == ["o01", "o02"]


# ---------------------------------------------------------------------------
# analyze


def test_analyze_reports(seq2_path, capsys):
    code, out, _ = run(capsys, "analyze", seq2_path)
    assert code == 0
    report = json.loads(out)
    assert report["minDuration"]["verdict"] == 5
    assert report["simultaneity"]["details"]["traces"] == 6
    assert "word" not in report


def test_analyze_word(seq2_path, capsys):
    code, out, _ = run(
        capsys, "analyze", seq2_path, "--word", "a2,b1", "--mode", "consecutive",
        "--quantifier", "all",
    )
    assert code == 0
    report = json.loads(out)
    assert report["word"]["verdict"] is True
    assert report["word"]["details"]["count"] == 6


def test_analyze_embeds_errors_without_dying(tmp_path, capsys):
    open_score = Score("open", (obj("A", DurationSet.at_least(2)),))
    path = tmp_path / "open.json"
    save_score(open_score, str(path))
    code, out, _ = run(capsys, "analyze", str(path))
    assert code == 0
    report = json.loads(out)
    # min duration is fine on the shortest-path lane; simultaneity needs
    # the full trace set and reports the missing horizon instead
    assert report["minDuration"]["verdict"] == 2
    assert report["simultaneity"]["error"]["code"] == "UnboundedDurations"
    code, out, _ = run(capsys, "analyze", str(path), "--horizon", "4")
    assert json.loads(out)["simultaneity"]["verdict"] == 1


# ---------------------------------------------------------------------------
# encode


def test_encode_normal_merges_the_glue(seq2_path, capsys):
    code, out, _ = run(capsys, "encode", seq2_path)
    assert code == 0
    encoded = json.loads(out)
    assert encoded["form"] == "normal"
    assert [e["id"] for e in encoded["events"]] == ["A.end", "A.start", "B.end"]
    merged = encoded["events"][0]
    assert merged["labels"] == [["endPoint", "A"], ["startPoint", "B"]]
    assert merged["actions"] == ["a2", "b1"]


def test_encode_raw_keeps_all_four_events(seq2_path, capsys):
    _, out, _ = run(capsys, "encode", seq2_path, "--form", "raw")
    encoded = json.loads(out)
    assert encoded["form"] == "raw"
    assert [e["id"] for e in encoded["events"]] == [
        "A.end",
        "A.start",
        "B.end",
        "B.start",
    ]
    assert {"src": "A.end", "dst": "B.start", "delta": [[0, 0]]} in encoded["delays"]


def test_encode_dispatchable_json(cue_path, capsys):
    _, out, _ = run(capsys, "encode", cue_path, "--form", "dispatchable")
    encoded = json.loads(out)
    assert encoded["form"] == "dispatchable"
    by_id = {e["id"]: e for e in encoded["events"]}
    assert by_id["go"]["interactive"] is True
    assert by_id["go"]["predecessors"] == ["lead.start"]
    assert by_id["lead.start"] == {
        "id": "lead.start",
        "lb": 0,
        "ub": None,
        "interactive": False,
        "predecessors": [],
    }


def test_encode_dot_outputs(seq2_path, cue_path, capsys):
    _, out, _ = run(capsys, "encode", seq2_path, "--format", "dot")
    assert out.startswith("digraph score {")
    assert '"A.start" -> "A.end"' in out
    assert out.endswith("}\n")

    _, out, _ = run(capsys, "encode", cue_path, "--form", "dispatchable", "--format", "dot")
    assert out.startswith("digraph dispatchable {")
    assert "shape=diamond" in out  # the live cue
    assert "[0,inf)" in out


# ---------------------------------------------------------------------------
# run --simulate


def test_simulated_run_emits_ndjson(seq2_path, capsys):
    code, out, _ = run(capsys, "run", seq2_path, "--simulate")
    assert code == 0
    lines = out.splitlines()
    messages = [json.loads(line) for line in lines]
    assert messages[0]["type"] == "score"
    assert messages[-1] == {"type": "status", "value": "finished", "time": 5}
    # byte-for-byte reproducible
    _, again, _ = run(capsys, "run", seq2_path, "--simulate")
    assert again == out


def test_triggers_file_both_spellings(cue_path, tmp_path, capsys):
    pairs = tmp_path / "pairs.json"
    pairs.write_text('[["go", 2]]', encoding="utf-8")
    objects = tmp_path / "objects.json"
    objects.write_text('[{"event": "go", "time": 2}]', encoding="utf-8")
    _, out_pairs, _ = run(capsys, "run", cue_path, "--simulate", "--triggers", str(pairs))
    _, out_objects, _ = run(capsys, "run", cue_path, "--simulate", "--triggers", str(objects))
    assert out_pairs == out_objects
    fired = [
        json.loads(line)
        for line in out_pairs.splitlines()
        if json.loads(line)["type"] == "fired"
    ]
    assert {m["event"]: m["time"] for m in fired}["go"] == 2


def test_finished_runs_replay_through_trace_validation(cue_path, capsys):
    _, out, _ = run(capsys, "run", cue_path, "--simulate")
    messages = [json.loads(line) for line in out.splitlines()]
    assert messages[-1]["value"] == "finished"
    trace = {m["event"]: m["time"] for m in messages if m["type"] == "fired"}
    ntes, _ = normal_encoding(load_score(cue_path))
    assert validate_trace(ntes, trace)


def test_cancel_policy(cue_path, capsys):
    _, out, _ = run(capsys, "run", cue_path, "--simulate", "--policy", "cancel")
    messages = [json.loads(line) for line in out.splitlines()]
    assert messages[-1] == {"type": "status", "value": "cancelled", "time": 4}


def test_unknown_trigger_event_is_exit_2(cue_path, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('[["ghost", 1]]', encoding="utf-8")
    code, _, err = run(capsys, "run", cue_path, "--simulate", "--triggers", str(bad))
    assert code == 2
    assert json.loads(err)["code"] == "UnknownEvent"


# ---------------------------------------------------------------------------
# errors


def test_missing_file(capsys):
    code, out, err = run(capsys, "check", "/nonexistent/score.json")
    assert code == 2
    assert out == ""
    assert json.loads(err)["code"] == "IOError"


def test_malformed_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{oops", encoding="utf-8")
    code, _, err = run(capsys, "check", str(path))
    assert code == 2
    payload = json.loads(err)
    assert payload["code"] == "ParseError"
    assert payload["line"] == 1


def test_invalid_score_document(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(
        json.dumps(
            {
                "version": "iscore-doc/1",
                "name": "bad",
                "objects": [{"id": "A", "duration": [[5, 2]]}],
            }
        ),
        encoding="utf-8",
    )
    code, _, err = run(capsys, "check", str(path))
    assert code == 2
    assert "lo > hi" in json.loads(err)["message"]


def test_gen_rejects_garbage(capsys):
    code, _, err = run(capsys, "gen", "subset-sum", "--set", "3,x", "--target", "5")
    assert code == 2
    assert json.loads(err)["code"] == "InstanceRejected"
    code, _, err = run(capsys, "gen", "subset-sum", "--set", "3,0", "--target", "5")
    assert code == 2
    assert json.loads(err)["code"] == "InstanceRejected"
