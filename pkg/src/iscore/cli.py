"""Command-line surface.

    iscore check   score.json
    iscore analyze score.json [--horizon N] [--word a,b --mode scattered --quantifier some]
    iscore encode  score.json [--form raw|normal|dispatchable] [--format json|dot]
    iscore run     score.json [--simulate --triggers file | --serve --port P]
                              [--policy autofire|cancel] [--unit-ms M] [--speed F]
    iscore gen     subset-sum --set 3,5,7 --target 8 [-o out.json]

All structured output is canonical JSON (sorted keys) so golden files
stay byte-stable. Errors go to standard error as one-line JSON objects;
exit code 2 means the input was unusable, 1 means a negative check
verdict, 0 success.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Optional

from . import analysis
from .csp import SubsetSumInstance, gen_subset_sum_score
from .engine import TriggerPolicy
from .errors import InstanceRejected, IscoreError
from .events import encode_score, event_actions, normal_encoding, structure_constraints
from .persistence import document_from_score, dumps_document, load_score, save_score
from .protocol import dumps as proto_dumps
from .protocol import simulate_stream
from .score import Score
from .stp import apsp, make_dispatchable, to_stp

log = logging.getLogger("iscore.cli")


def _setup_logging() -> None:
    level = {"debug": logging.DEBUG, "info": logging.INFO}.get(
        os.environ.get("ISCORE_LOG", "").lower()
    )
    if level is not None:
        logging.basicConfig(
            level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
        )


def _emit(doc) -> None:
    print(json.dumps(doc, sort_keys=True, indent=2))


def _error(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def _report_or_error(fn, *args, **kwargs) -> dict:
    try:
        return fn(*args, **kwargs).as_dict()
    except IscoreError as exc:
        return {"error": exc.payload()}


# -- subcommands -----------------------------------------------------


def _cmd_check(args) -> int:
    score = load_score(args.score)
    report = analysis.playability(score)
    _emit(report.as_dict())
    return 0 if report.verdict else 1


def _cmd_analyze(args) -> int:
    score = load_score(args.score)
    out = {
        "minDuration": _report_or_error(analysis.min_duration, score, horizon=args.horizon),
        "simultaneity": _report_or_error(
            analysis.simultaneity_bounds, score, horizon=args.horizon
        ),
    }
    if args.word is not None:
        word = analysis.Word(
            tuple(args.word.split(",")), mode=args.mode, quantifier=args.quantifier
        )
        out["word"] = _report_or_error(
            analysis.contains_word, score, word, horizon=args.horizon
        )
    _emit(out)
    return 0


def _structure_doc(score: Score, tes, form: str) -> dict:
    events = [
        {
            "id": e.id,
            "labels": [list(l) for l in e.sorted_labels()],
            "actions": event_actions(score, tes, e.id),
        }
        for e in sorted(tes.events, key=lambda e: e.id)
    ]
    delays = [
        {"src": d.src, "dst": d.dst, "delta": d.delta.as_json()}
        for d in sorted(tes.delays, key=lambda d: (d.src, d.dst, d.delta.sort_key))
    ]
    return {"form": form, "events": events, "delays": delays}


def _structure_dot(score: Score, tes) -> str:
    lines = ["digraph score {", "  rankdir=LR;"]
    for e in sorted(tes.events, key=lambda e: e.id):
        labels = " ".join(f"{kind}:{obj}" for kind, obj in e.sorted_labels())
        text = e.id if not labels else f"{e.id}\\n{labels}"
        lines.append(f'  "{e.id}" [label="{text}"];')
    for d in sorted(tes.delays, key=lambda d: (d.src, d.dst, d.delta.sort_key)):
        lines.append(f'  "{d.src}" -> "{d.dst}" [label="{d.delta}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dispatchable_parts(score: Score):
    from .events import INTERACTIVE

    ntes, _ = normal_encoding(score)
    matrix = apsp(to_stp(structure_constraints(ntes)))
    interactive = {
        e.id for e in ntes.events if any(kind == INTERACTIVE for kind, _ in e.labels)
    }
    return ntes, make_dispatchable(matrix, interactive)


def _cmd_encode(args) -> int:
    score = load_score(args.score)
    if args.form in ("raw", "normal"):
        tes = (encode_score if args.form == "raw" else normal_encoding)(score)[0]
        if args.format == "json":
            _emit(_structure_doc(score, tes, args.form))
        else:
            sys.stdout.write(_structure_dot(score, tes))
        return 0
    ntes, network = _dispatchable_parts(score)
    windows = network.windows()
    if args.format == "json":
        events = [
            {
                "id": e,
                "lb": windows[e][0],
                "ub": windows[e][1],
                "interactive": e in network.interactive,
                "predecessors": sorted(network.predecessors[e]),
            }
            for e in sorted(network.events)
        ]
        _emit({"form": "dispatchable", "events": events})
        return 0
    lines = ["digraph dispatchable {", "  rankdir=LR;"]
    for e in sorted(network.events):
        lb, ub = windows[e]
        shape = ", shape=diamond" if e in network.interactive else ""
        window = f"[{lb},inf)" if ub is None else f"[{lb},{ub}]"
        lines.append(f'  "{e}" [label="{e}\\n{window}"{shape}];')
    for e in sorted(network.events):
        for p in sorted(network.predecessors[e]):
            lines.append(f'  "{p}" -> "{e}";')
    lines.append("}")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _load_triggers(path: str) -> list:
    with open(path, "r", encoding="utf-8") as fp:
        raw = json.load(fp)
    script = []
    for entry in raw:
        if isinstance(entry, dict):
            script.append((entry["event"], entry["time"]))
        else:
            ref, when = entry
            script.append((ref, when))
    return script


def _cmd_run(args) -> int:
    score = load_score(args.score)
    policy = TriggerPolicy(on_expiry="autoFire" if args.policy == "autofire" else "cancel")
    if args.serve:
        from .serve import serve_score

        serve_score(
            score,
            policy,
            port=args.port,
            unit_ms=args.unit_ms,
            speed=args.speed,
        )
        return 0
    script = _load_triggers(args.triggers) if args.triggers else []
    for message in simulate_stream(score, script, policy):
        sys.stdout.write(proto_dumps(message) + "\n")
    return 0


def _cmd_gen(args) -> int:
    try:
        values = tuple(int(v) for v in args.set.split(","))
    except ValueError:
        raise InstanceRejected(f"--set must be comma-separated integers, got {args.set!r}")
    instance = SubsetSumInstance(values, args.target)
    score = gen_subset_sum_score(instance)
    if args.output:
        save_score(score, args.output)
    else:
        sys.stdout.write(dumps_document(document_from_score(score)))
    return 0


# -- argument parsing ------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iscore", description="Interactive score toolkit."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="playability verdict, exit 0/1")
    p.add_argument("score")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("analyze", help="minimum duration, simultaneity, word search")
    p.add_argument("score")
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--word", default=None, help="comma-separated action names")
    p.add_argument("--mode", choices=("scattered", "consecutive"), default="scattered")
    p.add_argument("--quantifier", choices=("some", "all"), default="some")
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("encode", help="dump the event-structure translation")
    p.add_argument("score")
    p.add_argument("--form", choices=("raw", "normal", "dispatchable"), default="normal")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.set_defaults(fn=_cmd_encode)

    p = sub.add_parser("run", help="execute: simulated to stdout, or serve live")
    p.add_argument("score")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--simulate", action="store_true", help="offline run (default)")
    mode.add_argument("--serve", action="store_true", help="live protocol endpoint")
    p.add_argument("--triggers", default=None, help="JSON file of [event, time] pairs")
    p.add_argument("--port", type=int, default=8760)
    p.add_argument("--policy", choices=("autofire", "cancel"), default="autofire")
    p.add_argument("--unit-ms", type=int, default=1000, dest="unit_ms")
    p.add_argument("--speed", type=float, default=1.0)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("gen", help="generate benchmark scores")
    gen_sub = p.add_subparsers(dest="generator", required=True)
    g = gen_sub.add_parser("subset-sum", help="playable iff the instance is solvable")
    g.add_argument("--set", required=True, help="comma-separated positive integers")
    g.add_argument("--target", required=True, type=int)
    g.add_argument("-o", "--output", default=None)
    g.set_defaults(fn=_cmd_gen)

    return parser


def main(argv: Optional[list] = None) -> int:
    _setup_logging()
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except IscoreError as exc:
        _error(exc.payload())
        return 2
    except OSError as exc:
        _error({"code": "IOError", "message": str(exc)})
        return 2
    except KeyError as exc:
        _error({"code": "UnknownEvent", "message": str(exc.args[0])})
        return 2


if __name__ == "__main__":
    sys.exit(main())
