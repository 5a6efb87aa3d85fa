"""simtutor: batch simulation and policy comparison from the command line."""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .errors import ConfigError, KBParseError, KBValidationError
from .kb import load_knowledge_base
from .sim import POLICIES, compare_policies, load_sim_config, simulate_population

EXIT_OK = 0
EXIT_CONFIG = 2


def _load_inputs(args: argparse.Namespace):
    if args.kb is not None:
        kb = load_knowledge_base(Path(args.kb))
    else:
        with resources.files("adaptutor.data").joinpath("sample_kb.json").open("rb") as fh:
            kb = load_knowledge_base(fh)
    config = load_sim_config(Path(args.config) if args.config else None)
    return kb, config


def _emit(report: dict, out: str | None) -> None:
    payload = json.dumps(report, ensure_ascii=False, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(payload + "\n", encoding="utf-8")
    else:
        print(payload)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="simtutor",
        description="Simulate learner populations through the tutoring engine.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one policy and write a report")
    run.add_argument("--kb", help="knowledge-base JSON (default: bundled sample)")
    run.add_argument("--config", help="simulation config JSON")
    run.add_argument("--policy", choices=POLICIES, required=True)
    run.add_argument("--learners", type=int, default=100, metavar="N")
    run.add_argument("--seed", type=int, default=0, metavar="S")
    run.add_argument("--out", help="report path (default: stdout)")

    cmp_ = sub.add_parser("compare", help="run both policies on the same population")
    cmp_.add_argument("--kb", help="knowledge-base JSON (default: bundled sample)")
    cmp_.add_argument("--config", help="simulation config JSON")
    cmp_.add_argument("--learners", type=int, default=100, metavar="N")
    cmp_.add_argument("--seed", type=int, default=0, metavar="S")
    cmp_.add_argument("--out", help="report path (default: stdout)")

    args = parser.parse_args(argv)
    try:
        kb, config = _load_inputs(args)
        if args.command == "run":
            report = simulate_population(kb, args.learners, args.seed, args.policy, config)
        else:
            report = compare_policies(kb, args.learners, args.seed, config)
    except (ConfigError, KBParseError, KBValidationError, OSError) as exc:
        print(f"simtutor: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(report, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
