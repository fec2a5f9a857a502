"""Command-line entry point: ``mcraqr <subcommand> --scenario <path> --out <dir>``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .errors import McraqrError, SchemaError
from .experiments import COMMANDS, oracle_suite
from .scenario import load_scenario

EXIT_OK, EXIT_MODEL, EXIT_USAGE = 0, 1, 2
SUBCOMMANDS = tuple(COMMANDS) + ("oracle-suite",)

log = logging.getLogger("mcraqr")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mcraqr", description="Multi-carrier Rydberg receiver experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--scenario", required=True, type=Path, help="scenario JSON file")
        s.add_argument("--out", required=True, type=Path, help="output directory for CSV tables")
        s.add_argument("--seed", type=int, default=None, help="override the scenario rng_seed")
        s.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: $MCRAQR_THREADS or 1)")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_threads(arg: int | None) -> int:
    if arg is not None:
        value, source = arg, "--threads"
    else:
        env = os.environ.get("MCRAQR_THREADS")
        if env is None or env == "":
            return 1
        try:
            value, source = int(env), "MCRAQR_THREADS"
        except ValueError:
            raise SchemaError(f"MCRAQR_THREADS must be an integer, got {env!r}") from None
    if value < 1:
        raise SchemaError(f"{source} must be >= 1")
    return value


def run(args) -> int:
    threads = resolve_threads(args.threads)
    scn = load_scenario(args.scenario)
    if args.seed is not None:
        if args.seed < 0:
            raise SchemaError("--seed must be non-negative")
        scn = scn.with_seed(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    executor = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        if args.command == "oracle-suite":
            tables, ok = oracle_suite(scn, executor)
        else:
            tables, ok = COMMANDS[args.command](scn, executor), True
    finally:
        if executor:
            executor.shutdown()
    for t in tables:
        log.info("wrote %s", t.write(args.out))
    if not ok:
        print("mcraqr: oracle suite reported failing checks", file=sys.stderr)
        return EXIT_MODEL
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return run(args)
    except SchemaError as exc:
        print(f"mcraqr: scenario error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (McraqrError, ValueError, ArithmeticError, FloatingPointError) as exc:
        print(f"mcraqr: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except OSError as exc:
        print(f"mcraqr: I/O error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
