"""Command line interface.

Exit codes: 0 on success, 1 for input problems (documents that do not
parse or validate), 2 for lingware problems (rule packs, dictionaries,
morphological tables, iteration caps).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .configload import data_dir, demo_config, load_config
from .errors import InputError, LingwareError
from .graph import parse_document
from .graph2tree import graph_to_tree
from .inventories import load_inventories
from .pipeline import deconvert
from .validate import validate


def _add_pack_options(parser: argparse.ArgumentParser):
    d = data_dir()
    parser.add_argument("--dict", dest="dict_path", default=d / "uws.tsv")
    parser.add_argument("--lus", dest="units_path", default=d / "units.tsv")
    parser.add_argument("--schema", default=d / "schema.dv")
    parser.add_argument("--ts", default=d / "ts.rules")
    parser.add_argument("--gs1", default=d / "gs1.rules")
    parser.add_argument("--gs2", default=d / "gs2.rules")
    parser.add_argument("--morph", default=d / "morph", help="morph pack directory")
    parser.add_argument("--profile", default=d / "profiles.cfg", help="profile config file")
    parser.add_argument("--profile-name", default="default")
    parser.add_argument("--inventories", default=d / "inventories.cfg")
    parser.add_argument("--restrictions", default=d / "restriction_vars.tsv")
    parser.add_argument("--incompat", default=d / "incompat.tsv")
    parser.add_argument("--counts", default=None, help="association counts log file")
    parser.add_argument("--seed", type=int, default=0)


def _config_from_args(args, mode="automatic"):
    return load_config(
        dict_path=args.dict_path,
        units_path=args.units_path,
        schema_path=args.schema,
        ts_path=args.ts,
        gs1_path=args.gs1,
        gs2_path=args.gs2,
        morph_dir=args.morph,
        profiles_path=args.profile,
        inventories_path=args.inventories,
        restriction_vars_path=args.restrictions,
        incompat_path=args.incompat,
        profile_name=args.profile_name,
        counts_path=args.counts,
        seed=args.seed,
        mode=mode,
    )


def _cli_transfer_chooser(node, ranked):
    print(f"node {node.id} {node.uw.text}:", file=sys.stderr)
    for idx, (entry, score) in enumerate(ranked):
        print(f"  [{idx}] {entry.lu} (score {score})", file=sys.stderr)
    while True:
        answer = input("choose index or type an LU: ").strip()
        if answer.isdigit() and int(answer) < len(ranked):
            return int(answer)
        if answer:
            return answer


def cmd_run(args) -> int:
    import json

    mode = "interactive" if args.interactive else "automatic"
    config = _config_from_args(args, mode=mode)
    if args.interactive:
        config.transfer_chooser = _cli_transfer_chooser
    doc = parse_document(
        Path(args.file).read_text(encoding="utf-8"), config.inventories
    )
    choices_out = open(args.choices, "a", encoding="utf-8") if args.choices else None
    try:
        for idx, utt in enumerate(doc.utterances):
            state = deconvert(utt.graph, config)
            print(state.text.marked if args.marks else state.text.rendered)
            if choices_out is not None:
                for choice in state.choice_log:
                    record = {"utterance": idx, **choice}
                    choices_out.write(json.dumps(record, ensure_ascii=False) + "\n")
    finally:
        if choices_out is not None:
            choices_out.close()
    return 0


def cmd_validate(args) -> int:
    inventories = load_inventories(args.inventories)
    doc = parse_document(Path(args.file).read_text(encoding="utf-8"))
    all_ok = True
    for idx, utt in enumerate(doc.utterances):
        report = validate(utt.graph, inventories)
        status = "ok" if report.ok else "REJECTED"
        print(f"utterance {idx}: {status}")
        for issue in report.issues:
            print(f"  {issue.severity} {issue.code} at {issue.locus}: {issue.message}")
        all_ok = all_ok and report.ok
    return 0 if all_ok else 1


def cmd_g2t(args) -> int:
    doc = parse_document(Path(args.file).read_text(encoding="utf-8"))
    for idx, utt in enumerate(doc.utterances):
        result = graph_to_tree(utt.graph)
        print(f"; utterance {idx}: {result.reversed_count} reversed arc(s)")
        print(result.tree.bracket())
        print(result.tree.indented())
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = _config_from_args(args)
    app = create_app(config, session_dir=args.session_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deconv")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="deconvert a UNL document")
    _add_pack_options(p_run)
    p_run.add_argument("--interactive", action="store_true")
    p_run.add_argument("--marks", action="store_true", help="emit &i_ trace marks")
    p_run.add_argument("--choices", default=None, help="append choice records (JSON lines)")
    p_run.add_argument("file")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="validate the graphs of a document")
    p_val.add_argument("--inventories", default=data_dir() / "inventories.cfg")
    p_val.add_argument("file")
    p_val.set_defaults(func=cmd_validate)

    p_g2t = sub.add_parser("g2t", help="dump the graph-to-tree conversion")
    p_g2t.add_argument("file")
    p_g2t.set_defaults(func=cmd_g2t)

    p_srv = sub.add_parser("serve", help="start the postedition HTTP service")
    _add_pack_options(p_srv)
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.add_argument("--session-dir", default=None)
    p_srv.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except LingwareError as exc:
        print(f"lingware error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
