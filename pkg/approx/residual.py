"""Certified residual q_N xi - p_N through the difference profile u(j)."""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional

import numpy as np
from mpmath import iv, mp

from approx.linear_form import LinearForm
from approx.machine import ApproxPair, BudgetExceeded, residual_direct, truncated_residual_exact
from lab.config import Budgets
from lemma_lab.sampling import Segment, plan_for
from lemma_lab.shift_invariance import shifted_bases
from lemma_lab.sweep import run_sweep
from numfield.ball import ball_json, interval_precision, overlaps, refine_until, symmetric, upper
from numfield.element import FieldElement, embed
from numfield.number_field import NumberField
from thue_morse.sequence import tm_word
from witness.congruence import CongruenceWitness, lambda_floor, min_valid_N, require_threshold

logger = logging.getLogger(__name__)

ROUTE_LEMMA = "lemma"
ROUTE_FULL = "full"
MIN_WINDOW = 64
PROFILE_LIMIT = 64

CHECK_NAMES = (
    "uVanishesBelow",
    "specialPoints",
    "lowerPowersVanish",
    "lowerBound",
    "upperBound",
    "positivity",
    "decayLaw",
)


@dataclass
class ResidualReport:
    k: int
    N: int
    J: int
    route: str
    below_threshold: bool
    S: object
    scaled: object
    residual_scaled: object
    tail_bound: object
    lower_const: object
    printed_const: object
    epsilon: object
    upper_const: object
    decay: Optional[object]
    decay_window: tuple
    u_profile: List[int] = field(default_factory=list)
    j_tested: int = 0
    plan: str = ""
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> Dict[str, object]:
        return {
            "k": str(self.k),
            "N": str(self.N),
            "J": str(self.J),
            "route": self.route,
            "belowThreshold": self.below_threshold,
            "S": ball_json(self.S),
            "scaled": ball_json(self.scaled),
            "residualScaled": ball_json(self.residual_scaled),
            "tailBound": ball_json(self.tail_bound),
            "lowerConst": ball_json(self.lower_const),
            "printedConst": ball_json(self.printed_const),
            "epsilonN": ball_json(self.epsilon),
            "upperConst": ball_json(self.upper_const),
            "decay": None if self.decay is None else ball_json(self.decay),
            "decayWindow": [None if end is None else ball_json(end) for end in self.decay_window],
            "uProfile": [str(j) for j in self.u_profile],
            "jTested": str(self.j_tested),
            "seedOrPlan": self.plan,
            "checks": dict(self.checks),
            "passed": self.passed,
        }


def u_window(w: CongruenceWitness, N: int, first: int, last: int, r: Optional[int] = None) -> np.ndarray:
    """u_r(j) for first <= j <= last as int8, r defaulting to k."""
    low, high = shifted_bases(w, N)
    r = r or w.k
    length = last - first + 1
    above = tm_word(high + first, length, r).bits.astype(np.int8)
    below = tm_word(low + first, length, r).bits.astype(np.int8)
    return above - below


def _ascending_sum(values: np.ndarray, first: int, top: int, beta: object, skip: Iterable[int] = ()) -> object:
    # sum of values[i] beta^(top - first - i), ascending in j
    skip = set(skip)
    inv = 1 / beta
    power = beta ** (top - first)
    total = iv.mpf(0)
    for offset, value in enumerate(values):
        if value and first + offset not in skip:
            total = total + int(value) * power
        power = power * inv
    return total


def scaled_u_sum(
    w: CongruenceWitness, N: int, beta: object, J: int, skip: Iterable[int] = (), first: Optional[int] = None
) -> object:
    """Interval for sum_{j=first}^{J} u(j) beta^(2^N - j), first defaulting to 2^N + 1."""
    top = 1 << N
    first = top + 1 if first is None else first
    if J < first:
        return iv.mpf(0)
    return _ascending_sum(u_window(w, N, first, J), first, top, beta, skip)


def lower_constants(beta: object, N: int) -> tuple:
    """(lowerConst, printedConst, epsilon_N) at beta."""
    b2 = beta ** 2
    core = beta ** 4 - b2 - 1
    lower_const = core / (beta ** 3 * (b2 - 1))
    printed_const = core / (b2 * (b2 - 1))
    epsilon = b2 / (b2 - 1) * (1 / beta) ** (((1 << N) >> 2) + 2)
    return lower_const, printed_const, epsilon


def upper_constant(norm_a: object, beta: object, N: int, L: int) -> object:
    """C = ||a||_1 beta/(beta - 1) (1 + 2 beta^(2^N - L))."""
    return norm_a * beta / (beta - 1) * (1 + 2 * (1 / beta) ** (L - (1 << N)))


def _choose_window(nf: NumberField, N: int, tol_bits: int, cap: Optional[int]) -> int:
    top = 1 << N
    offset = MIN_WINDOW
    target = mp.ldexp(1, -tol_bits)
    while True:
        J = top + offset if cap is None else min(top + offset, cap)
        if cap is not None and J == cap:
            return J

        def decide(bits: int) -> Optional[bool]:
            beta = nf.beta_ball(bits)
            return upper((1 / beta) ** (J - top) * beta / (beta - 1)) < target

        if refine_until(decide, tol_bits + 64, nf.precision_ceiling, "the truncation tail"):
            return J
        offset *= 2


def _profile_coords(w: CongruenceWitness, form: LinearForm, N: int, J: int) -> np.ndarray:
    """Coordinates of c(j) = sum_r a_r u_r(j) for 0 <= j <= J, one row per j."""
    rows = np.zeros((J + 1, form.field.degree), dtype=object)
    for r, coeff in enumerate(form.coeffs, start=1):
        if coeff.is_zero():
            continue
        us = u_window(w, N, 0, J, r).astype(object)
        rows += np.outer(us, np.array(coeff.coords, dtype=object))
    return rows


def _full_profile_value(w: CongruenceWitness, form: LinearForm, N: int, J: int) -> FieldElement:
    """sum_{j=0}^{J} c(j) beta^(J - j) exactly."""
    nf = form.field
    acc = FieldElement.zero(nf)
    for row in _profile_coords(w, form, N, J):
        acc = acc.times_beta() + FieldElement(tuple(int(c) for c in row), nf)
    return acc


def _vanishing_sweep(w: CongruenceWitness, N: int, budgets: Budgets, seed: int, workers: int):
    top = 1 << N
    plan = plan_for([Segment(0, top + 1)], budgets.full_range_limit, budgets.sample_budget, seed)
    low, high = shifted_bases(w, N)
    failed = run_sweep(low, high, w.k, plan, workers=workers, chunk=budgets.chunk_size)
    return plan, failed


def residual_series(
    w: CongruenceWitness,
    form: LinearForm,
    nf: NumberField,
    N: int,
    tol_bits: int = 64,
    budgets: Optional[Budgets] = None,
    seed: int = 0,
    workers: int = 1,
    enforce_threshold: bool = True,
) -> ResidualReport:
    """Certified S = sum u(j) beta^-j over 2^N < j <= J and the checks built on it.

    At or above the threshold the residual is a_k S plus the lower-power tail beyond
    2^floor(lambda N). Below it, with ``enforce_threshold`` off, the residual is summed
    from the full difference profile instead.
    """
    budgets = budgets or Budgets()
    if form.field != nf:
        raise ValueError("Linear form and field disagree")
    if form.k != w.k:
        raise ValueError(f"Linear form has k={form.k} but the witness has k={w.k}")
    form.require_leading()
    below = N < min_valid_N(w)
    if enforce_threshold:
        require_threshold(w, N)
    route = ROUTE_FULL if below else ROUTE_LEMMA
    top = 1 << N
    L = 1 << lambda_floor(w.k, N)
    J = _choose_window(nf, N, tol_bits, L if route == ROUTE_LEMMA else None)
    logger.debug("residual N=%d route=%s J=%d", N, route, J)

    plan, failed_below = _vanishing_sweep(w, N, budgets, seed, workers)
    us = u_window(w, N, top + 1, J)
    special = abs(int(us[0])) == 1 and int(us[2]) == 0
    lower_ok = all(not u_window(w, N, top + 1, J, r).any() for r in range(1, w.k))
    profile = [top + 1 + int(i) for i in np.flatnonzero(us)[:PROFILE_LIMIT]]
    exact_full = _full_profile_value(w, form, N, J) if route == ROUTE_FULL else None

    start = max(tol_bits, J - top) + 64

    def decide(bits: int) -> Optional[Dict[str, object]]:
        beta = nf.beta_ball(bits)
        inv = 1 / beta
        norm_a = form.norm_bound(nf.beta_index, bits)
        tail_s = iv.mpf(0) if J == L and route == ROUTE_LEMMA else inv ** (J - top) * beta / (beta - 1)
        scaled = _ascending_sum(us, top + 1, top, beta) + symmetric(tail_s)
        if route == ROUTE_LEMMA:
            a_k = embed(form.leading, nf.beta_index, bits)
            outside = norm_a * inv ** (L - top) / (beta - 1)
            residual = a_k * scaled + symmetric(outside)
        else:
            outside = norm_a * inv ** (J - top) / (beta - 1)
            residual = embed(exact_full, nf.beta_index, bits) * inv ** (J - top) + symmetric(outside)
        lower_const, printed_const, epsilon = lower_constants(beta, N)
        upper_const = upper_constant(norm_a, beta, N, L)
        floor = lower_const - epsilon
        nonzero = abs(scaled) > 0
        verdicts = {
            "lowerBound": abs(scaled) >= floor,
            "upperBound": abs(residual) <= upper_const,
            "positivity": _both(nonzero, abs(residual) > 0),
        }
        log_beta = iv.ln(beta)
        window = (-iv.ln(beta / (beta - 1)) / log_beta, None)
        decay = None
        if nonzero is True and (floor > 0) is True:
            window = (window[0], -iv.ln(floor) / log_beta)
            decay = -iv.ln(abs(scaled)) / log_beta
            verdicts["decayLaw"] = _both(decay >= window[0], decay <= window[1])
        else:
            verdicts["decayLaw"] = False
        if any(v is None for v in verdicts.values()):
            # the tail radius does not shrink with precision; past a few doublings
            # an undecided comparison counts as not certified
            if bits < 4 * start:
                return None
            verdicts = {name: bool(v) for name, v in verdicts.items()}
        return {
            "S": scaled * inv ** top,
            "scaled": scaled,
            "residual": residual,
            "tail": tail_s,
            "lower": lower_const,
            "printed": printed_const,
            "epsilon": epsilon,
            "upper": upper_const,
            "decay": decay,
            "window": window,
            "verdicts": verdicts,
        }

    result = refine_until(decide, start, nf.precision_ceiling, "the residual checks")
    checks = {
        "uVanishesBelow": not failed_below,
        "specialPoints": special,
        "lowerPowersVanish": lower_ok,
    }
    checks.update({name: bool(value) for name, value in result["verdicts"].items()})
    return ResidualReport(
        k=w.k,
        N=N,
        J=J,
        route=route,
        below_threshold=below,
        S=result["S"],
        scaled=result["scaled"],
        residual_scaled=result["residual"],
        tail_bound=result["tail"],
        lower_const=result["lower"],
        printed_const=result["printed"],
        epsilon=result["epsilon"],
        upper_const=result["upper"],
        decay=result["decay"],
        decay_window=result["window"],
        u_profile=profile,
        j_tested=plan.count(),
        plan=plan.description,
        checks={name: checks[name] for name in CHECK_NAMES},
    )


def _both(first: Optional[bool], second: Optional[bool]) -> Optional[bool]:
    if first is False or second is False:
        return False
    if first is None or second is None:
        return None
    return True


@dataclass
class OracleReport:
    T: int
    direct: object
    series: object
    exact_agreement: bool
    overlap: bool

    @property
    def passed(self) -> bool:
        return self.exact_agreement and self.overlap

    def to_json(self) -> Dict[str, object]:
        return {
            "T": str(self.T),
            "directScaled": ball_json(self.direct),
            "seriesScaled": ball_json(self.series),
            "exactAgreement": self.exact_agreement,
            "overlap": self.overlap,
            "passed": self.passed,
        }


def oracle_check(pair: ApproxPair, report: ResidualReport, budgets: Optional[Budgets] = None) -> OracleReport:
    """Cross-check a residual report against q_N xi - p_N built from p_N and q_N.

    The truncation T = deg q_N + J keeps the direct tail at the scale of the series tail.
    """
    budgets = budgets or Budgets()
    if not pair.materialized:
        raise BudgetExceeded(f"p_N for N={pair.N} was not materialized")
    if pair.N != report.N:
        raise ValueError(f"Approximation pair is for N={pair.N}, report for N={report.N}")
    T = pair.degree + report.J
    direct, profile = truncated_residual_exact(pair, T, budgets)
    nf = pair.field
    bits = max(128, T + 64)
    with interval_precision(bits):
        scaled = residual_direct(pair, T, bits, budgets) * nf.beta_ball(bits) ** (1 << report.N)
    agree = (direct - profile).is_zero()
    logger.debug("oracle N=%d T=%d exact=%s", pair.N, T, agree)
    return OracleReport(
        T=T,
        direct=scaled,
        series=report.residual_scaled,
        exact_agreement=agree,
        overlap=overlaps(scaled, report.residual_scaled),
    )
