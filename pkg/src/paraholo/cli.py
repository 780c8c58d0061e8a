"""Command-line entry point: ``paraholo <command> [--scenario PATH] ...``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .scenario import ScenarioError, load_paper_scenario, load_scenario
from .verify import COMMANDS, DEFAULT_SEED, DEFAULT_TOL, PaperData, run_paper_verification

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

_HELP = {
    "verify-paper": "run the full checklist for the bundled four-dimensional example",
    "signature": "signatures of the scenario metrics",
    "parallel-check": "which metrics are parallel for the connection",
    "transport": "parallel transport along each scenario curve",
    "holonomy": "loop validation, quotient holonomy and curvature span",
    "irreducibility": "irreducibility verdict for the holonomy representation",
    "pencil": "invariant subspaces from pairs of metrics",
    "check": "evaluate the scenario's expected assertions",
}


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", metavar="PATH", help="scenario JSON file (default: bundled example)")
    common.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL, help="numeric tolerance")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized searches")
    common.add_argument("--human", action="store_true", help="print a text summary instead of JSON")
    common.add_argument("--out", metavar="PATH", help="write the report to PATH instead of stdout")

    parser = argparse.ArgumentParser(prog="paraholo", description="Holonomy and parallel-metric checks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, text in _HELP.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        scenario = load_scenario(args.scenario) if args.scenario else load_paper_scenario()
        if args.command == "verify-paper":
            data = PaperData.from_scenario(scenario) if args.scenario else None
            report = run_paper_verification(args.tol, data, args.seed, scenario.name)
        else:
            report = COMMANDS[args.command](scenario, args.tol, args.seed)
    except (ScenarioError, ValueError) as exc:
        print(f"paraholo: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    text = report.to_text() if args.human else report.to_json()
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"paraholo: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
