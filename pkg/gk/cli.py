from dotenv import load_dotenv
load_dotenv()

import argparse
import asyncio
import logging
import os
import sys

from gk import gk
from gk.errors import GKError, InternalInconsistency, ParseError
from gk.gk import EXIT_INTERNAL, EXIT_PARSE, EXIT_VALIDATION, emit_report, exit_code
from gk.scenario import Scenario
from gk.scenarios import bundled_path, bundled_scenarios


def parse_args(argv=None):
    parser = argparse.ArgumentParser(prog="gk", description="gk - exact (g, K)-module computations from scenario files")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run every task of a scenario and print the report")
    run.add_argument("scenario", type=str, help="Path to a .gk file, or the name of a bundled scenario")
    run.add_argument("--format", choices=("text", "json"), default="text", help="Report format")
    run.add_argument("--out", type=str, default=None, help="Write the report here instead of stdout")
    run.add_argument("--no-timing", action="store_true", help="Leave the timing section out of the report")
    run.add_argument(
        "--max-concurrent-tasks",
        type=int,
        default=int(os.getenv("GK_MAX_CONCURRENT_TASKS", "4")),
        help="Tasks run at once (env GK_MAX_CONCURRENT_TASKS)",
    )

    validate = sub.add_parser("validate", help="Parse a scenario and build every declaration")
    validate.add_argument("scenario", type=str)

    sub.add_parser("list", help="List the bundled scenarios")

    parser.add_argument(
        "--verbosity",
        type=str,
        default=os.getenv("GK_VERBOSITY", "WARNING"),
        help="Logging level name (env GK_VERBOSITY)",
    )
    return parser.parse_args(argv)


def _resolve_path(name: str) -> str:
    if os.path.exists(name):
        return name
    if name in bundled_scenarios() or f"{name}.gk" in bundled_scenarios():
        return str(bundled_path(name))
    return name


def _error_exit(exc: GKError) -> int:
    print(f"gk: {type(exc).__name__}: {exc}", file=sys.stderr)
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, InternalInconsistency):
        return EXIT_INTERNAL
    return EXIT_VALIDATION


async def _run(args) -> int:
    level = getattr(logging, args.verbosity.upper(), logging.WARNING)
    try:
        scenario = Scenario.load(_resolve_path(args.scenario))
        async with gk(scenario, max_concurrent_tasks=args.max_concurrent_tasks, verbosity=level) as runner:
            report = await runner.run()
    except GKError as exc:
        return _error_exit(exc)
    text = emit_report(report, args.format, timing=not args.no_timing)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return exit_code(report)


def _validate(args) -> int:
    logging.basicConfig(level=getattr(logging, args.verbosity.upper(), logging.WARNING))
    try:
        scenario = Scenario.load(_resolve_path(args.scenario)).resolve()
    except GKError as exc:
        return _error_exit(exc)
    print(f"{scenario.name}: {len(scenario.pairs)} pairs, {len(scenario.modules)} modules, {len(scenario.tasks)} tasks")
    return 0


def main(argv=None) -> int:
    args = parse_args(argv)
    if args.command == "list":
        for name in bundled_scenarios():
            print(name)
        return 0
    if args.command == "validate":
        return _validate(args)
    return asyncio.run(_run(args))


if __name__ == '__main__':
    sys.exit(main())
