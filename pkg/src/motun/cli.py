"""Command line entry point: ``motun run | list | check-gradients``."""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

import numpy as np

from .corpus import get_problem, list_problems
from .descent import DescentOptions
from .driver import RunConfig, emit_report, run_algorithm1
from .errors import MotunError, UnknownProblem
from .problem import evaluate, fd_jacobians, jacobians_agree
from .tunneling import TunnelingParams

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

logger = logging.getLogger("motun")


class UsageError(Exception):
    """Bad command line; the message names the offending flag."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def _positive(kind):
    def convert(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return convert


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="motun", description="Multi-objective tunneling experiments.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-start failures")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    run = sub.add_parser("run", help="multi-start minimization plus tunneling on one problem")
    run.add_argument("--problem", required=True)
    run.add_argument("--n-starts", type=_positive(int), default=200)
    run.add_argument("--start-mode", choices=("lattice", "random"), default="lattice")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--eta", type=_positive(float), default=TunnelingParams.eta)
    run.add_argument("--delta", type=_positive(float), default=None)
    run.add_argument("--eps-crit", type=_positive(float), default=DescentOptions.eps_crit)
    run.add_argument("--max-iter", type=_positive(int), default=DescentOptions.max_iter)
    run.add_argument("--cycles", type=_positive(int), default=1)
    run.add_argument("--workers", type=_positive(int), default=1)
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--out", default=None, help="report path (default: stdout)")

    sub.add_parser("list", help="print the registered problem names")

    check = sub.add_parser("check-gradients", help="compare analytic and finite-difference Jacobians")
    check.add_argument("--problem", required=True)
    check.add_argument("--samples", type=_positive(int), default=100)
    check.add_argument("--seed", type=int, default=0)
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise UsageError("a subcommand is required\n" + build_parser().format_usage())
    return args


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        problem=args.problem,
        n_starts=args.n_starts,
        start_mode=args.start_mode,
        seed=args.seed,
        tunneling=TunnelingParams(eta=args.eta, delta=args.delta),
        descent=DescentOptions(eps_crit=args.eps_crit, max_iter=args.max_iter),
        cycles=args.cycles,
        workers=args.workers,
        output_path=args.out,
        output_format=args.format,
    )


def parse_cli(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Parse a ``run`` command line into a :class:`RunConfig`.

    Raises
    ------
    UsageError
        On any invalid flag, or when the subcommand is not ``run``.
    """
    args = parse_args(argv)
    if args.command != "run":
        raise UsageError(f"'{args.command}' does not produce a run configuration")
    return config_from_args(args)


def check_gradients(name: str, samples: int = 100, seed: int = 0) -> tuple[int, int]:
    """Count (passed, total) Jacobian checks at random points of the box."""
    problem = get_problem(name)
    rng = np.random.default_rng(seed)
    passed = 0
    for _ in range(samples):
        x = rng.uniform(problem.lower, problem.upper)
        rec = evaluate(problem, x)
        Jf, Jg = fd_jacobians(problem, x)
        ok = jacobians_agree(rec.Jf, Jf) and jacobians_agree(rec.Jg, Jg)
        if not ok:
            logger.warning("%s: Jacobian mismatch at x=%s", name, x.tolist())
        passed += ok
    return passed, samples


def _cmd_run(args) -> int:
    config = config_from_args(args)
    report = run_algorithm1(config)
    text = emit_report(report, config.output_format, config.output_path)
    if config.output_path is None:
        sys.stdout.write(text)
    failed = sum(1 for s in report.starts if s.error)
    print(f"{config.problem}: PFBT={report.pfbt} PFAT={report.pfat} "
          f"({len(report.starts)} starts, {failed} with errors)", file=sys.stderr)
    return EXIT_OK


def _cmd_check(args) -> int:
    passed, total = check_gradients(args.problem, args.samples, args.seed)
    print(f"{args.problem}: {passed}/{total} points agree")
    return EXIT_OK if passed == total else EXIT_RUNTIME


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = parse_args(argv)
        if args.command == "run":
            # Validate the configuration before any work starts.
            config_from_args(args)
    except (UsageError, ValueError) as exc:
        print(f"motun: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        if args.command == "list":
            print("\n".join(list_problems()))
            return EXIT_OK
        if args.command == "check-gradients":
            return _cmd_check(args)
        return _cmd_run(args)
    except UnknownProblem as exc:
        print(f"motun: --problem: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MotunError as exc:
        print(f"motun: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
