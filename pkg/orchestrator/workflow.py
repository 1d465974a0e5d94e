"""Workflow DAG chaining witness construction, lemma sweeps, residual checks, and statistics."""
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from approx.linear_form import LinearForm
from approx.machine import build_approx
from approx.norm_audit import norm_contradiction_check
from approx.residual import oracle_check, residual_series
from betaexp.expansion import beta_expand, expand_series_value, reconstruct
from lab.config import RunConfig
from lab.presets import resolve_field
from lemma_lab.shift_invariance import (
    LEMMA_LOWER,
    LEMMA_SHIFT,
    LEMMA_SPECIAL,
    resolve_lemma,
    verify_lower_powers,
    verify_shift_invariance,
    verify_special_j,
)
from numfield.number_field import NumberField, parse_field, threshold_check
from seqstats.affine import affine_complexity_compare
from seqstats.complexity import moshe_check, subword_complexity
from seqstats.cubes import cube_report
from seqstats.frequencies import block_frequencies
from thue_morse.sequence import tm_word
from witness.congruence import (
    CongruenceWitness,
    InvariantViolation,
    bound_conditions,
    check_tm_identities,
    lambda_floor,
    min_valid_N,
    shift_witness,
    validate_witness,
)

LOGGER_NAME = "tmlab"


@dataclass
class AuditLogger:
    entries: List[str] = field(default_factory=list)
    name: str = LOGGER_NAME

    def log(self, message: str) -> None:
        self.entries.append(message)
        logging.getLogger(self.name).info(message)


@dataclass
class WorkflowTask:
    name: str
    func: Callable[..., object]


class WorkflowDAG:
    def __init__(self, logger: AuditLogger):
        self.logger = logger
        self.tasks: List[WorkflowTask] = []
        self.timings: Dict[str, float] = {}

    def add_task(self, name: str, func: Callable[..., object]) -> None:
        self.tasks.append(WorkflowTask(name=name, func=func))

    def run(self) -> List[Tuple[str, object]]:
        results: List[Tuple[str, object]] = []
        for task in self.tasks:
            started = time.perf_counter()
            output = task.func()
            self.timings[task.name] = time.perf_counter() - started
            results.append((task.name, output))
            self.logger.log(f"executed:{task.name}")
        return results


def task_json(output: object) -> object:
    """JSON rendering of a task output; reports provide ``to_json``."""
    if hasattr(output, "to_json"):
        return output.to_json()
    if isinstance(output, list):
        return [task_json(item) for item in output]
    return output


def task_passed(output: object) -> bool:
    if isinstance(output, list):
        return all(task_passed(item) for item in output)
    if isinstance(output, dict):
        return bool(output.get("passed", True))
    return bool(getattr(output, "passed", True))


def _require_k(config: RunConfig) -> int:
    if config.k is None:
        raise ValueError(f"{config.subcommand} needs --k")
    return config.k


def _field(config: RunConfig) -> NumberField:
    if config.field_poly is None:
        raise ValueError(f"{config.subcommand} needs --field")
    return parse_field(resolve_field(config.field_poly), config.budgets.precision_ceiling)


def _form(config: RunConfig, nf: NumberField, k: int) -> LinearForm:
    if not config.coeffs:
        return LinearForm.indicator(nf, k)
    if len(config.coeffs) != k:
        raise ValueError(f"Expected {k} coefficients a_1..a_{k}, got {len(config.coeffs)}")
    return LinearForm.from_coords(nf, config.coeffs)


def _checked_witness(k: int) -> CongruenceWitness:
    w = shift_witness(k)
    problems = validate_witness(w)
    if not check_tm_identities(w):
        problems.append("Thue-Morse identities")
    if problems:
        raise InvariantViolation(f"Witness for k={k} breaks: {', '.join(problems)}")
    return w


def _add_witness_tasks(dag: WorkflowDAG, config: RunConfig, state: Dict[str, object]) -> None:
    k = _require_k(config)

    def construct():
        state["witness"] = _checked_witness(k)
        return state["witness"]

    def threshold():
        w = state["witness"]
        start = min_valid_N(w)
        out = {"minValidN": str(start), "lambdaFloor": str(lambda_floor(k, start))}
        if config.N is not None:
            coefficient_bound, lower_bound = bound_conditions(w, config.N)
            out.update(
                {
                    "N": str(config.N),
                    "kappa": str(w.kappa(config.N)),
                    "coefficientBound": coefficient_bound,
                    "lowerPowerBound": lower_bound,
                    "passed": coefficient_bound and lower_bound,
                }
            )
        return out

    dag.add_task("witness", construct)
    dag.add_task("threshold", threshold)


def _target_N(config: RunConfig, w: CongruenceWitness) -> int:
    return config.N if config.N is not None else min_valid_N(w)


def _add_lemma_tasks(dag: WorkflowDAG, config: RunConfig, state: Dict[str, object]) -> None:
    k = _require_k(config)
    lemma = resolve_lemma(config.lemma)
    budgets = config.budgets
    sweep = {"budgets": budgets, "seed": config.seed, "workers": config.workers}

    def logged(name: str, report):
        dag.logger.log(f"sweep:{name} tested={report.j_tested} failed={len(report.j_failed)}")
        return report

    if lemma in (LEMMA_SHIFT, "all"):
        dag.add_task(
            LEMMA_SHIFT,
            lambda: logged(LEMMA_SHIFT, verify_shift_invariance(state["witness"], state["N"], **sweep)),
        )
    if lemma in (LEMMA_SPECIAL, "all"):
        dag.add_task(LEMMA_SPECIAL, lambda: logged(LEMMA_SPECIAL, verify_special_j(state["witness"], state["N"])))
    if lemma in (LEMMA_LOWER, "all"):
        for r in range(1, k):
            name = f"{LEMMA_LOWER}:r={r}"
            dag.add_task(
                name,
                lambda r=r, name=name: logged(
                    name, verify_lower_powers(state["witness"], state["N"], r, **sweep)
                ),
            )


def _add_residual_tasks(dag: WorkflowDAG, config: RunConfig, state: Dict[str, object]) -> None:
    k = _require_k(config)

    def field_task():
        nf = _field(config)
        state["field"] = nf
        state["form"] = _form(config, nf, k)
        out = nf.describe()
        out["aboveThreshold"] = threshold_check(nf)
        out["form"] = state["form"].to_json()
        return out

    def approx_task():
        state["pair"] = build_approx(state["witness"], state["form"], state["field"], state["N"], config.budgets)
        return state["pair"]

    def residual_task():
        state["residual"] = residual_series(
            state["witness"],
            state["form"],
            state["field"],
            state["N"],
            tol_bits=config.tol_bits,
            budgets=config.budgets,
            seed=config.seed,
            workers=config.workers,
            enforce_threshold=not config.below_threshold,
        )
        return state["residual"]

    def oracle_task():
        pair = state["pair"]
        if not pair.materialized:
            return {"skipped": f"p_N has {pair.degree - 1} terms, over the term budget"}
        if pair.degree + state["residual"].J > config.budgets.term_budget:
            return {"skipped": "truncation over the term budget"}
        return oracle_check(pair, state["residual"], config.budgets)

    dag.add_task("field", field_task)
    dag.add_task("approx", approx_task)
    dag.add_task("residual", residual_task)
    dag.add_task("oracle", oracle_task)


def _add_norm_tasks(dag: WorkflowDAG, config: RunConfig, state: Dict[str, object]) -> None:
    k = _require_k(config)

    def audit():
        nf = _field(config)
        xi = config.xi_coords or [10] * nf.degree
        return norm_contradiction_check(
            state["witness"], _form(config, nf, k), nf, xi, precision=max(96, config.tol_bits)
        )

    dag.add_task("norm-audit", audit)


def _add_expansion_tasks(dag: WorkflowDAG, config: RunConfig) -> None:
    def expand():
        nf = _field(config)
        if config.num:
            e = beta_expand(nf, config.num, config.den, config.digits)
            out = e.to_json()
            out["reconstructs"] = reconstruct(nf, config.num, config.den, e)
            out["passed"] = out["reconstructs"]
            return out
        k = _require_k(config)
        out = expand_series_value(nf, k, 2 * config.digits + 64, config.digits).to_json()
        out["series"] = f"sum t(n^{k}) beta^-n"
        return out

    dag.add_task("beta-expand", expand)


def _add_stats_tasks(dag: WorkflowDAG, config: RunConfig) -> None:
    kind = config.stats_kind
    m, n = config.m, config.prefix_len
    if kind == "complexity":
        dag.add_task(kind, lambda: subword_complexity(tm_word(1, n, config.k or 1, config.budgets.chunk_size), m))
    elif kind == "frequencies":
        dag.add_task(kind, lambda: block_frequencies(config.k or 2, m, n))
    elif kind == "cubefree":
        dag.add_task(kind, lambda: cube_report(n))
    elif kind == "moshe":
        dag.add_task(kind, lambda: moshe_check(config.k or 2, m, n))
    elif kind == "affine":
        def affine():
            digits = tm_word(1, n, config.k or 2, config.budgets.chunk_size).bits
            return affine_complexity_compare(Fraction(config.q1), Fraction(config.q2), config.base, digits, m)

        dag.add_task(kind, affine)
    else:
        raise ValueError(f"Unknown stats kind: {kind}")


def build_run(config: RunConfig, logger: Optional[AuditLogger] = None) -> Tuple[WorkflowDAG, AuditLogger]:
    """Task chain for one subcommand; tasks share intermediate values through ``state``."""
    config.validate()
    logger = logger or AuditLogger()
    dag = WorkflowDAG(logger)
    state: Dict[str, object] = {}
    sub = config.subcommand

    if sub == "witness":
        _add_witness_tasks(dag, config, state)
        return dag, logger

    if sub in ("verify-lemmas", "residual", "norm-audit"):
        k = _require_k(config)

        def witness_task():
            w = _checked_witness(k)
            state["witness"] = w
            state["N"] = _target_N(config, w)
            return w

        dag.add_task("witness", witness_task)

    if sub == "verify-lemmas":
        _add_lemma_tasks(dag, config, state)
    elif sub == "residual":
        _add_residual_tasks(dag, config, state)
    elif sub == "norm-audit":
        _add_norm_tasks(dag, config, state)
    elif sub == "beta-expand":
        _add_expansion_tasks(dag, config)
    else:
        _add_stats_tasks(dag, config)
    return dag, logger
