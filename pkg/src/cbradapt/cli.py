"""Command line entry point.

Exit codes: 0 success, 1 engine failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict

from . import __version__
from .config import EngineConfig, load_config
from .errors import (
    AdaptationError,
    KappaTooLarge,
    NoFeasibleState,
    ParseError,
    SchemaError,
    SchemaMismatch,
    SearchSpaceTooLarge,
    StateError,
)
from .knowledge import KnowledgeBase, kb_stats, load_kb
from .mediator import adapt_once, load_scenario, run_scenario
from .model import data_path, load_schema, load_state
from .utility import load_utility_model

INPUT_ERRORS = (ParseError, SchemaError, SchemaMismatch, StateError, OSError)
ENGINE_ERRORS = (NoFeasibleState, SearchSpaceTooLarge, KappaTooLarge)


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--schema", default=str(data_path("robot.schema.json")))
    p.add_argument("--utility", default=str(data_path("robot.utility.json")))
    p.add_argument("--config", default=None, help="engine config JSON (defaults built in)")


def _load_common(args):
    schema = load_schema(args.schema)
    model = load_utility_model(args.utility, schema)
    config = load_config(args.config) if args.config else EngineConfig()
    return schema, config.apply_to(model), config


def _dump(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def cmd_run(args) -> int:
    schema, model, config = _load_common(args)
    scenario = load_scenario(args.scenario)
    report = run_scenario(scenario, schema, model, config, kb_path=args.kb)
    payload = report.to_json()
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    _dump({k: v for k, v in payload["summary"].items() if k != "kb_size"}
          | {"final_kb_size": payload["summary"]["kb_size"][-1] if report.records else None})
    return report.exit_code


def cmd_adapt_once(args) -> int:
    schema, model, config = _load_common(args)
    state = load_state(args.state)
    kb = load_kb(args.kb, schema, model) if args.kb else KnowledgeBase.empty(schema)
    try:
        _dump(adapt_once(state, schema, model, config, kb))
    except ENGINE_ERRORS as exc:
        _dump({"error": type(exc).__name__, "message": str(exc)})
        return 1
    return 0


def cmd_kb(args) -> int:
    schema, model, _ = _load_common(args)
    kb = load_kb(args.kb, schema, model)
    if args.action == "validate":
        _dump({
            "valid": len(kb),
            "quarantined": [{"record": q.record, "reason": q.reason} for q in kb.quarantined],
        })
        return 1 if kb.quarantined else 0
    _dump(asdict(kb_stats(kb)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cbradapt", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario through mediator and engine")
    p.add_argument("--scenario", required=True)
    p.add_argument("--kb", default=None, help="knowledge base file, read if present and rewritten")
    p.add_argument("--report", default=None)
    _add_model_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("adapt-once", help="monitor and adapt a single state")
    p.add_argument("--state", required=True)
    p.add_argument("--kb", default=None)
    _add_model_args(p)
    p.set_defaults(func=cmd_adapt_once)

    p = sub.add_parser("kb", help="inspect a knowledge base file")
    p.add_argument("action", choices=["validate", "stats"])
    p.add_argument("--kb", required=True)
    _add_model_args(p)
    p.set_defaults(func=cmd_kb)

    p = sub.add_parser("version")
    p.set_defaults(func=lambda args: print(__version__) or 0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AdaptationError as exc:
        print(f"engine error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
