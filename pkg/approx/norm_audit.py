"""Explicit-constant audit of the norm argument: where c1 c2^(d-1) Y^d beta^-2^N drops below 1."""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from mpmath import iv

from approx.linear_form import LinearForm
from numfield.ball import ball_json, refine_until
from numfield.number_field import CLASS_INTEGER, CLASS_PISOT, CLASS_SALEM, NumberField
from witness.congruence import CongruenceWitness, min_valid_N

logger = logging.getLogger(__name__)

AUDITABLE = (CLASS_INTEGER, CLASS_PISOT, CLASS_SALEM)
START_BITS = 96


@dataclass
class NormAuditReport:
    k: int
    degree: int
    xi_coords: List[int]
    c1: object
    c2: Optional[object]
    N0: int
    growth_from: int
    C2_at_N0: Optional[object]
    log2_bound_at_N0: object
    holds_at_N0: bool
    c2_dominates: bool
    trail: Dict[int, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.holds_at_N0 and self.c2_dominates

    def to_json(self) -> Dict[str, object]:
        return {
            "k": str(self.k),
            "degree": str(self.degree),
            "xiCoords": [str(a) for a in self.xi_coords],
            "c1": ball_json(self.c1),
            "c2": None if self.c2 is None else ball_json(self.c2),
            "N0": str(self.N0),
            "decreasingFrom": str(self.growth_from),
            "C2AtN0": None if self.C2_at_N0 is None else ball_json(self.C2_at_N0),
            "log2BoundAtN0": ball_json(self.log2_bound_at_N0),
            "holdsAtN0": self.holds_at_N0,
            "c2Dominates": self.c2_dominates,
            "trail": {str(N): ok for N, ok in sorted(self.trail.items())},
            "passed": self.passed,
        }


def _constants(form: LinearForm, nf: NumberField, xi_coords: Sequence[int], bits: int):
    beta = nf.beta_ball(bits)
    norm_a = form.norm_bound(nf.beta_index, bits)
    c1 = 3 * norm_a * beta / (beta - 1)
    xi_norm = sum(abs(a) for a in xi_coords)
    conj = [form.norm_bound(i, bits) for i in nf.conjugate_indices()]
    return beta, c1, xi_norm, conj


def _max(values: List[object]) -> object:
    # interval maximum
    top = values[0]
    for value in values[1:]:
        top = iv.mpf((max(top.a, value.a), max(top.b, value.b)))
    return top


def _log2_bound(w: CongruenceWitness, N: int, degree: int, beta: object, c1: object, c2: Optional[object]) -> object:
    """log2 of c1 c2^(d-1) Y^d beta^(-2^N) with Y = y 2^kappa(N)."""
    ln2 = iv.ln(2)
    Y = w.y << w.kappa(N)
    value = iv.ln(c1) / ln2 + degree * iv.ln(iv.mpf(Y)) / ln2 - (1 << N) * iv.ln(beta) / ln2
    if c2 is not None and degree > 1:
        value = value + (degree - 1) * iv.ln(c2) / ln2
    return value


def norm_contradiction_check(
    w: CongruenceWitness,
    form: LinearForm,
    nf: NumberField,
    xi_coords: Sequence[int],
    precision: int = START_BITS,
    max_N: Optional[int] = None,
) -> NormAuditReport:
    """Bound audit for a hypothesized xi = sum A_i beta^i.

    c1 = 3 ||a||_1 beta/(beta - 1) bounds |F_N(beta)| beta^(2^N); every conjugate obeys
    |F_N(beta_i)| <= C2(N) = (3Y - 2)||a||_{1,i} + 2||A||_1 <= c2 Y with
    c2 = max_i(3||a||_{1,i} + 2||A||_1). N0 is the least N >= min_valid_N from which
    c1 c2^(d-1) Y^d beta^(-2^N) < 1 for every larger N.
    """
    if nf.classification not in AUDITABLE:
        raise ValueError(f"Norm audit needs conjugates in the closed unit disk; field is {nf.classification}")
    if form.field != nf:
        raise ValueError("Linear form and field disagree")
    if form.is_zero():
        raise ValueError("Norm audit needs a nonzero linear form")
    xi_coords = [int(a) for a in xi_coords]
    d, k = nf.degree, w.k
    start = min_valid_N(w)

    def decide(bits: int) -> Optional[NormAuditReport]:
        beta, c1, xi_norm, conj = _constants(form, nf, xi_coords, bits)
        c2 = _max([3 * a + 2 * xi_norm for a in conj]) if conj else None
        # from here on the bound shrinks at every step: beta^(2^N) > 2^(dk)
        growth_from = 1
        while True:
            shrinking = (1 << growth_from) * iv.ln(beta) > d * k * iv.ln(2)
            if shrinking is None:
                return None
            if shrinking:
                break
            growth_from += 1
        trail: Dict[int, bool] = {}
        N = start
        while True:
            below = _log2_bound(w, N, d, beta, c1, c2) < 0
            if below is None:
                return None
            trail[N] = below
            if N >= growth_from and below:
                break
            N += 1
            if max_N is not None and N > max_N:
                raise ValueError(f"No N0 found up to N={max_N}")
        N0 = N
        while N0 - 1 >= start and trail[N0 - 1]:
            N0 -= 1

        Y = w.y << w.kappa(N0)
        big_c2 = _max([(3 * Y - 2) * a + 2 * xi_norm for a in conj]) if conj else None
        dominates = True if big_c2 is None else big_c2 <= c2 * Y
        if dominates is None:
            return None
        return NormAuditReport(
            k=k,
            degree=d,
            xi_coords=xi_coords,
            c1=c1,
            c2=c2,
            N0=N0,
            growth_from=growth_from,
            C2_at_N0=big_c2,
            log2_bound_at_N0=_log2_bound(w, N0, d, beta, c1, c2),
            holds_at_N0=trail[N0],
            c2_dominates=dominates,
            trail=trail,
        )

    report = refine_until(decide, precision, nf.precision_ceiling, "the norm audit")
    logger.debug("norm audit N0=%d after scanning %d values of N", report.N0, len(report.trail))
    return report
