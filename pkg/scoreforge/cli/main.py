import argparse
import logging
import sys
from typing import Optional, Sequence

import pydantic

from scoreforge import __version__
from scoreforge.cli.document import build_problems, load_document
from scoreforge.cli.runner import EXIT_INPUT_ERROR, EXIT_OK, exit_code, render, run_problems
from scoreforge.config import CheckConfig
from scoreforge.exceptions import ConfigurationError, InputValidationError

logger = logging.getLogger(__name__)

OPTION_FOR_FIELD = {"jobs": "--jobs", "node_budget": "--budget-nodes", "config_budget": "--budget-configs", "eps_mode": "--eps-mode"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scoreforge",
        description="Check whether reported binary-classification scores can come from the described experiment.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Diagnostics written to standard error (default: WARNING)",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Test every problem of a document and print the verdicts as JSON")
    run.add_argument("file", help="Problem document (JSON)")
    run.add_argument("--witnesses", choices=["all", "first"], default=None, help="Collect every witness, or stop at the first")
    run.add_argument("--eps-mode", choices=["floor_ceil", "round"], default="floor_ceil", help="Default uncertainty of a k-digit score")
    run.add_argument("--budget-nodes", type=int, default=None, metavar="N", help="Branch-and-bound node limit per linear system")
    run.add_argument("--budget-configs", type=int, default=None, metavar="N", help="Maximum fold-configuration bundles examined")
    run.add_argument("--jobs", type=int, default=None, metavar="N", help="Worker processes (default: SCOREFORGE_JOBS or 1)")
    run.add_argument("--count-configs", action="store_true", help="Only count the admissible fold configurations")
    run.add_argument("--count-feasible", action="store_true", help="Test every configuration and report how many are feasible")
    run.add_argument("--timing", action="store_true", help="Add per-problem wall-clock time to the output")

    validate = subparsers.add_parser("validate", help="Check a document against the schema without running any test")
    validate.add_argument("file", help="Problem document (JSON)")
    return parser


def _config(args: argparse.Namespace) -> CheckConfig:
    try:
        config = CheckConfig.from_env(
            jobs=args.jobs,
            node_budget=args.budget_nodes,
            config_budget=args.budget_configs,
            eps_mode=args.eps_mode,
            count_all_configurations=args.count_feasible or None,
        )
    except pydantic.ValidationError as e:
        error = e.errors()[0]
        option = OPTION_FOR_FIELD.get(str(error["loc"][0]), "option") if error["loc"] else "option"
        raise ConfigurationError(
            message=f"{option}: {error['msg']}",
            error_code="CFG_VALUE",
            details={"errors": [{"pointer": str(item["loc"]), "message": item["msg"]} for item in e.errors()]},
            suggestion="Budgets and job counts must be positive integers",
        ) from e
    if args.witnesses == "all":
        config.witness_cap = None
    elif args.witnesses == "first":
        config.witness_cap = 1
    return config


def _run(args: argparse.Namespace) -> int:
    config = _config(args)
    document = load_document(args.file)
    problems = build_problems(document, config.eps_mode)
    logger.info(f"Running {len(problems)} problem(s) from {args.file} with {config.jobs} job(s)")
    results = run_problems(problems, config, count_only=args.count_configs, timing=args.timing)
    print(render(results))
    return exit_code(results)


def _validate(args: argparse.Namespace) -> int:
    document = load_document(args.file)
    build_problems(document)
    logger.info(f"{args.file}: {len(document.problems)} valid problem(s)")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=args.log_level, format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)

    try:
        if args.command == "run":
            return _run(args)
        return _validate(args)
    except (InputValidationError, ConfigurationError) as e:
        logger.debug(repr(e))
        print(f"error: {e.message}", file=sys.stderr)
        for error in e.details.get("errors", [])[1:]:
            print(f"error: {error['pointer'] or '(root)'}: {error['message']}", file=sys.stderr)
        if e.suggestion:
            print(f"hint: {e.suggestion}", file=sys.stderr)
        return EXIT_INPUT_ERROR
