"""Command-line entry point: one subcommand per verification step, one JSON report per run."""
import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from approx.machine import BudgetExceeded
from lab.config import OUTPUT_FORMATS, STATS_KINDS, TOOL_VERSION, Budgets, RunConfig
from lab.presets import parse_coefficients
from lemma_lab.shift_invariance import LEMMA_CHOICES
from numfield.ball import PrecisionExhausted
from numfield.number_field import IsolationError
from orchestrator.workflow import LOGGER_NAME, build_run, task_json, task_passed
from witness.congruence import InvariantViolation

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

logger = logging.getLogger(LOGGER_NAME)


def parse_coeff_list(text: str) -> List[List[int]]:
    """a_1,...,a_k; an entry may be ``c0:c1:...`` for c0 + c1 beta + ..."""
    coeffs: List[List[int]] = []
    for entry in text.replace(" ", "").split(","):
        if not entry:
            continue
        try:
            coeffs.append([int(part) for part in entry.split(":")])
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"Bad coefficient {entry!r}") from exc
    return coeffs


def _int_list(text: str) -> List[int]:
    try:
        return parse_coefficients(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--format", dest="output_format", choices=OUTPUT_FORMATS, default="json")
    parser.add_argument("--output", dest="output_path", default=None, help="write the report here instead of stdout")
    parser.add_argument("--term-budget", type=int, default=Budgets.term_budget)
    parser.add_argument("--precision-ceiling", type=int, default=Budgets.precision_ceiling)
    parser.add_argument("--full-range-limit", type=int, default=Budgets.full_range_limit)
    parser.add_argument("--sample-budget", type=int, default=Budgets.sample_budget)
    parser.add_argument("--chunk-size", type=int, default=Budgets.chunk_size)
    noise = parser.add_mutually_exclusive_group()
    noise.add_argument("--verbose", action="store_true")
    noise.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tmlab", description="Thue-Morse linear independence verification lab")
    parser.add_argument("--version", action="version", version=f"tmlab {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    witness = sub.add_parser("witness", help="construct and validate the congruence witness for k")
    witness.add_argument("--k", type=int, required=True)
    witness.add_argument("--N", type=int, default=None, help="also evaluate the coefficient inequalities at N")

    lemmas = sub.add_parser("verify-lemmas", help="exact sweeps of the shifted-power lemmas")
    lemmas.add_argument("--k", type=int, required=True)
    lemmas.add_argument("--N", type=int, default=None, help="defaults to the least valid N")
    lemmas.add_argument("--lemma", default="all", choices=LEMMA_CHOICES, help="a lemma name, its number 2.2-2.4, or all")

    residual = sub.add_parser("residual", help="certified residual q_N xi - p_N and its bound checks")
    norm = sub.add_parser("norm-audit", help="explicit-constant audit of the norm contradiction")
    for p in (residual, norm):
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--field", dest="field_poly", required=True, help="preset name or c0,c1,...,1")
        p.add_argument("--coeffs", type=parse_coeff_list, default=[], help="a_1,...,a_k; c0:c1 for c0 + c1 beta")
        p.add_argument("--N", type=int, default=None)
        p.add_argument("--tol-bits", type=int, default=64)
    residual.add_argument("--below-threshold", action="store_true", help="allow N below the least valid N")
    norm.add_argument("--xi", dest="xi_coords", type=_int_list, default=[], help="coordinates A_i of the hypothesized xi")

    expand = sub.add_parser("beta-expand", help="greedy beta-expansion with period detection")
    expand.add_argument("--field", dest="field_poly", required=True)
    expand.add_argument("--num", type=_int_list, default=[], help="numerator coordinates; omit to expand sum t(n^k) beta^-n")
    expand.add_argument("--den", type=int, default=1)
    expand.add_argument("--digits", type=int, default=64)
    expand.add_argument("--k", type=int, default=None)

    stats = sub.add_parser("stats", help="empirical sequence statistics")
    stats.add_argument("stats_kind", choices=STATS_KINDS)
    stats.add_argument("--k", type=int, default=None)
    stats.add_argument("--m", type=int, default=8)
    stats.add_argument("--prefix", dest="prefix_len", type=int, default=1 << 16)
    stats.add_argument("--q1", default="1")
    stats.add_argument("--q2", default="0")
    stats.add_argument("--base", type=int, default=2)

    for p in (witness, lemmas, residual, norm, expand, stats):
        _common(p)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    budgets = Budgets(
        term_budget=args.term_budget,
        precision_ceiling=args.precision_ceiling,
        full_range_limit=args.full_range_limit,
        sample_budget=args.sample_budget,
        chunk_size=args.chunk_size,
    )
    known = {name for name in RunConfig.__dataclass_fields__} - {"budgets"}
    values = {name: value for name, value in vars(args).items() if name in known}
    return RunConfig(budgets=budgets, **values)


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def _table(outputs: Sequence[object]) -> List[Dict[str, str]]:
    for output in reversed(outputs):
        if hasattr(output, "rows"):
            return output.rows()
    raise ValueError("This report has no table to write as CSV")


def render(document: Dict[str, object], outputs: Sequence[object], output_format: str) -> str:
    if output_format == "json":
        return json.dumps(document, indent=2) + "\n"
    rows = _table(outputs)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def run(config: RunConfig) -> int:
    """Execute one configured run, write its report and return the exit code."""
    try:
        dag, audit = build_run(config)
        results = dag.run()
        report = {name: task_json(output) for name, output in results}
        passed = all(task_passed(output) for _, output in results)
        document = {
            "tool": "tmlab",
            "version": TOOL_VERSION,
            "config": config.echo(),
            "timings": {name: f"{seconds:.6f}" for name, seconds in dag.timings.items()},
            "audit": list(audit.entries),
            "report": report,
            "passed": passed,
        }
        text = render(document, [output for _, output in results], config.output_format)
    except (InvariantViolation, PrecisionExhausted, IsolationError) as exc:
        logger.error("internal invariant violated: %s: %s", type(exc).__name__, exc)
        return EXIT_INTERNAL
    except (ValueError, ZeroDivisionError, BudgetExceeded) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE

    if config.output_path:
        Path(config.output_path).write_text(text)
        logger.info("report written to %s", config.output_path)
    else:
        sys.stdout.write(text)
    if not passed:
        logger.warning("one or more checks failed")
    return EXIT_PASS if passed else EXIT_FAIL


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        config = config_from_args(args)
    except ValueError as exc:
        parser.error(str(exc))
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
