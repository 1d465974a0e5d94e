"""The approximation pair p_N, q_N and exact truncated residuals in Z[beta]."""
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from approx.linear_form import LinearForm, s_of_n
from lab.config import Budgets
from numfield.ball import refine_until, symmetric
from numfield.element import FieldElement, embed
from numfield.number_field import NumberField
from witness.congruence import CongruenceWitness

logger = logging.getLogger(__name__)


class BudgetExceeded(Exception):
    """Raised when a materialization would exceed the configured term budget."""


Sparse = Dict[int, FieldElement]


@dataclass(frozen=True)
class ApproxPair:
    """q_N = X^(2Y) - X^Y and p_N for Y = y 2^kappa(N); p_N is None when not materialized."""

    N: int
    kappa: int
    shift: int
    q_poly: Sparse
    p_poly: Optional[Sparse]
    form: LinearForm

    @property
    def field(self) -> NumberField:
        return self.form.field

    @property
    def degree(self) -> int:
        return 2 * self.shift

    @property
    def materialized(self) -> bool:
        return self.p_poly is not None

    def evaluate_q(self) -> FieldElement:
        return evaluate_sparse(self.q_poly, self.field)

    def evaluate_p(self) -> FieldElement:
        if self.p_poly is None:
            raise BudgetExceeded(f"p_N has {self.degree - 1} terms and was not materialized")
        return evaluate_sparse(self.p_poly, self.field)

    def to_json(self) -> Dict[str, object]:
        return {
            "N": str(self.N),
            "kappa": str(self.kappa),
            "shift": str(self.shift),
            "degreeQ": str(self.degree),
            "qPoly": {str(e): c.to_json() for e, c in sorted(self.q_poly.items())},
            "pTerms": None if self.p_poly is None else str(len(self.p_poly)),
            "materialized": self.materialized,
        }


def evaluate_sparse(poly: Sparse, nf: NumberField) -> FieldElement:
    """Exact value at beta by Horner over the exponent range."""
    acc = FieldElement.zero(nf)
    if not poly:
        return acc
    for e in range(max(poly), -1, -1):
        acc = acc.times_beta()
        if e in poly:
            acc = acc + poly[e]
    return acc


def shift_for(w: CongruenceWitness, N: int) -> int:
    kappa = w.kappa(N)
    if kappa < 0:
        raise ValueError(f"kappa(N) = {kappa} is negative for N={N}")
    return w.y << kappa


def build_approx(
    w: CongruenceWitness, form: LinearForm, nf: NumberField, N: int, budgets: Optional[Budgets] = None
) -> ApproxPair:
    if N < 1:
        raise ValueError("N must be at least 1")
    if form.field != nf:
        raise ValueError("Linear form and field disagree")
    budgets = budgets or Budgets()
    Y = shift_for(w, N)
    one = FieldElement.from_int(nf, 1)
    q_poly = {2 * Y: one, Y: -one}
    p_poly: Optional[Sparse] = None
    if 2 * Y <= budgets.term_budget:
        s = {n: s_of_n(form, n) for n in range(1, 2 * Y)}
        p_poly = {}
        for e in range(1, 2 * Y):
            coeff = s[2 * Y - e]
            if e < Y:
                coeff = coeff - s[Y - e]
            if not coeff.is_zero():
                p_poly[e] = coeff
    else:
        logger.debug("p_N not materialized: %d terms over budget %d", 2 * Y - 1, budgets.term_budget)
    return ApproxPair(N=N, kappa=w.kappa(N), shift=Y, q_poly=q_poly, p_poly=p_poly, form=form)


def _horner(values, nf: NumberField) -> FieldElement:
    """sum_i values[i] beta^(len - 1 - i)."""
    acc = FieldElement.zero(nf)
    for value in values:
        acc = acc.times_beta() + value
    return acc


def truncated_residual_exact(
    pair: ApproxPair, T: int, budgets: Optional[Budgets] = None
) -> Tuple[FieldElement, FieldElement]:
    """beta^T (q_N xi_T - p_N) computed twice: from p_N, q_N directly and from the
    difference profile s(2Y + j) - s(Y + j). Both are exact and must coincide."""
    budgets = budgets or Budgets()
    Y, nf, form = pair.shift, pair.field, pair.form
    if T < 2 * Y:
        raise ValueError(f"Truncation T={T} must be at least deg q_N = {2 * Y}")
    if T > budgets.term_budget:
        raise BudgetExceeded(f"Truncation T={T} exceeds the term budget {budgets.term_budget}")
    s = [None] + [s_of_n(form, n) for n in range(1, T + 1)]

    xi_scaled = _horner(s[1:], nf)
    beta_T = FieldElement.generator(nf) ** T
    direct = pair.evaluate_q() * xi_scaled - beta_T * pair.evaluate_p()

    beta = FieldElement.generator(nf)
    head = _horner([s[2 * Y + j] - s[Y + j] for j in range(T - 2 * Y + 1)], nf) * beta ** (2 * Y)
    rest = _horner([s[Y + j] for j in range(T - 2 * Y + 1, T - Y + 1)], nf) * beta ** Y
    return direct, head - rest


def residual_direct(pair: ApproxPair, T: int, precision: int, budgets: Optional[Budgets] = None) -> object:
    """Certified ball of q_N xi - p_N from the exact truncation at T plus the tail
    |q_N(beta)| ||a||_1 beta^-T / (beta - 1)."""
    nf = pair.field
    direct, _ = truncated_residual_exact(pair, T, budgets)
    form = pair.form

    def decide(bits: int) -> Optional[object]:
        beta = nf.beta_ball(bits)
        inv = 1 / beta
        head = embed(direct, nf.beta_index, bits) * inv ** T
        if form.is_zero():
            return head
        q_abs = beta ** pair.degree + beta ** pair.shift
        tail = q_abs * form.norm_bound(nf.beta_index, bits) * inv ** T / (beta - 1)
        return head + symmetric(tail)

    return refine_until(decide, precision, nf.precision_ceiling, "the direct residual")
