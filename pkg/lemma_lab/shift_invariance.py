"""Exact verification of the shifted-power lemmas and the difference profile u(j)."""
from dataclasses import dataclass, field
from math import comb
from typing import Dict, Iterable, List, Optional, Tuple

from lab.config import Budgets
from lemma_lab.sampling import JPlan, Segment, plan_for, validate_plan
from lemma_lab.sweep import run_sweep
from thue_morse.sequence import s2, tm_pow
from witness.congruence import CongruenceWitness, lambda_floor, require_threshold

LEMMA_SHIFT = "shift-invariance"
LEMMA_SPECIAL = "special-points"
LEMMA_LOWER = "lower-powers"
LEMMAS = (LEMMA_SHIFT, LEMMA_SPECIAL, LEMMA_LOWER)
# numbered aliases accepted wherever a lemma name is
LEMMA_ALIASES = {"2.2": LEMMA_SHIFT, "2.3": LEMMA_SPECIAL, "2.4": LEMMA_LOWER}
LEMMA_CHOICES = LEMMAS + tuple(LEMMA_ALIASES) + ("all",)


def resolve_lemma(name: str) -> str:
    """Canonical lemma name for a descriptive or numbered spelling, or ``all``."""
    if name not in LEMMA_CHOICES:
        raise ValueError(f"Unknown lemma: {name} (choose from {', '.join(LEMMA_CHOICES)})")
    return LEMMA_ALIASES.get(name, name)


@dataclass
class LemmaReport:
    k: int
    N: int
    lemma: str
    j_tested: int
    j_failed: List[int] = field(default_factory=list)
    sampled: bool = False
    plan: str = ""
    r: Optional[int] = None
    observed_sign: Optional[int] = None
    decomposition_failed: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.j_failed and not self.decomposition_failed

    def to_json(self) -> Dict[str, object]:
        return {
            "k": str(self.k),
            "N": str(self.N),
            "lemma": self.lemma,
            "r": None if self.r is None else str(self.r),
            "jTested": str(self.j_tested),
            "jFailed": [str(j) for j in self.j_failed],
            "sampled": self.sampled,
            "seedOrPlan": self.plan,
            "observedSign": None if self.observed_sign is None else str(self.observed_sign),
            "decompositionFailed": list(self.decomposition_failed),
            "passed": self.passed,
        }


def shifted_bases(w: CongruenceWitness, N: int) -> Tuple[int, int]:
    """(y 2^kappa, y 2^(kappa + 1)) for kappa = kN - nu(k)."""
    kappa = w.kappa(N)
    return w.y << kappa, w.y << (kappa + 1)


def u_value(w: CongruenceWitness, N: int, j: int) -> int:
    """u(j) = t((y 2^(kappa+1) + j)^k) - t((y 2^kappa + j)^k)."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if j < 0:
        raise ValueError("j must be nonnegative")
    low, high = shifted_bases(w, N)
    return tm_pow(high + j, w.k) - tm_pow(low + j, w.k)


def lemma_range(lemma: str, w: CongruenceWitness, N: int) -> List[Segment]:
    if lemma == LEMMA_SHIFT:
        top = 1 << N
        return [Segment(0, top), Segment(top, top + (1 << max(N - 2, 0)) + 1, 2)]
    if lemma == LEMMA_LOWER:
        return [Segment(0, (1 << lambda_floor(w.k, N)) + 1)]
    raise ValueError(f"Lemma {lemma} has no j range")


def _resolve_plan(
    lemma: str, w: CongruenceWitness, N: int, plan: Optional[JPlan], budgets: Budgets, seed: int
) -> JPlan:
    segments = lemma_range(lemma, w, N)
    if plan is None:
        return plan_for(segments, budgets.full_range_limit, budgets.sample_budget, seed)
    validate_plan(plan, segments)
    return plan


def verify_shift_invariance(
    w: CongruenceWitness,
    N: int,
    plan: Optional[JPlan] = None,
    budgets: Optional[Budgets] = None,
    seed: int = 0,
    workers: int = 1,
) -> LemmaReport:
    """u(j) = 0 for j < 2^N and for j = 2^N + 2h, h = 0..2^(N-3)."""
    budgets = budgets or Budgets()
    require_threshold(w, N)
    plan = _resolve_plan(LEMMA_SHIFT, w, N, plan, budgets, seed)
    low, high = shifted_bases(w, N)
    failed = run_sweep(low, high, w.k, plan, workers=workers, chunk=budgets.chunk_size)
    return LemmaReport(
        k=w.k, N=N, lemma=LEMMA_SHIFT, j_tested=plan.count(), j_failed=failed,
        sampled=plan.sampled, plan=plan.description,
    )


def verify_special_j(w: CongruenceWitness, N: int) -> LemmaReport:
    """|u(2^N + 1)| = 1 and u(2^N + 3) = 0; the sign of the first is only recorded."""
    require_threshold(w, N)
    first, third = (1 << N) + 1, (1 << N) + 3
    u_first = u_value(w, N, first)
    failed = []
    if abs(u_first) != 1:
        failed.append(first)
    if u_value(w, N, third) != 0:
        failed.append(third)
    return LemmaReport(
        k=w.k, N=N, lemma=LEMMA_SPECIAL, j_tested=2, j_failed=failed,
        plan=f"j in {{{first}, {third}}}", observed_sign=u_first,
        decomposition_failed=check_special_decomposition(w, N),
    )


def verify_lower_powers(
    w: CongruenceWitness,
    N: int,
    r: int,
    plan: Optional[JPlan] = None,
    budgets: Optional[Budgets] = None,
    seed: int = 0,
    workers: int = 1,
) -> LemmaReport:
    """t((y 2^kappa + j)^r) = t((y 2^(kappa+1) + j)^r) for 0 <= j <= 2^floor(lambda N)."""
    if not 1 <= r <= w.k - 1:
        raise ValueError(f"Power r must lie in 1..{w.k - 1}, got {r}")
    budgets = budgets or Budgets()
    require_threshold(w, N)
    plan = _resolve_plan(LEMMA_LOWER, w, N, plan, budgets, seed)
    low, high = shifted_bases(w, N)
    failed = run_sweep(low, high, r, plan, workers=workers, chunk=budgets.chunk_size)
    return LemmaReport(
        k=w.k, N=N, lemma=LEMMA_LOWER, j_tested=plan.count(), j_failed=failed,
        sampled=plan.sampled, plan=plan.description, r=r,
    )


def coefficient_terms(w: CongruenceWitness, j: int) -> List[int]:
    """A_l = C(k, l) y^l j^(k - l) for l = 0..k; they do not depend on the shift."""
    return [comb(w.k, ell) * w.y ** ell * j ** (w.k - ell) for ell in range(w.k + 1)]


def check_coefficient_bounds(w: CongruenceWitness, N: int, js: Iterable[int]) -> List[int]:
    """Those j for which some A_l with l >= 1 reaches 2^(kN - nu)."""
    ceiling = 1 << w.kappa(N)
    return [j for j in js if any(term >= ceiling for term in coefficient_terms(w, j)[1:])]


def _parity(n: int) -> int:
    return s2(n) & 1


def special_point_terms(w: CongruenceWitness, i: int, delta: int) -> Tuple[List[int], int, List[int]]:
    """Blocks of j^k + z j^(k-1) 2^(kN+delta) at j = 2^N + i.

    Returns (B, middle, C): B[l] = C(k, l) i^(k-l) sits at 2^(Nl) for l < k,
    middle = 1 + z i^(k-1) 2^delta at 2^(kN), and C[l-k-1] = C(k-1, l-k) z i^(2k-l-1)
    at 2^(Nl+delta) for l = k+1..2k-1. None of them depends on N.
    """
    k = w.k
    low = [comb(k, ell) * i ** (k - ell) for ell in range(k)]
    middle = 1 + (w.z * i ** (k - 1) << delta)
    high = [comb(k - 1, ell - k) * w.z * i ** (2 * k - ell - 1) for ell in range(k + 1, 2 * k)]
    return low, middle, high


def check_special_decomposition(w: CongruenceWitness, N: int) -> List[str]:
    """Descriptions of the failing steps of the block decomposition at j = 2^N + 1 and 2^N + 3.

    For both shifts delta the blocks must reassemble to j^k + z j^(k-1) 2^(kN+delta),
    fit below 2^N so that t of the sum is the sum of the t values mod 2, and the
    middle block must carry like the witness: t(1 + z) = t(z) and
    t(1 + 3^(k-1) z) = 1 - t(3^(k-1) z).
    """
    require_threshold(w, N)
    k = w.k
    problems: List[str] = []
    for i in (1, 3):
        j = (1 << N) + i
        for delta in (0, 1):
            low, middle, high = special_point_terms(w, i, delta)
            total = j ** k + (w.z * j ** (k - 1) << (k * N + delta))
            assembled = (
                sum(b << (N * ell) for ell, b in enumerate(low))
                + (middle << (k * N))
                + sum(c << (N * ell + delta) for ell, c in enumerate(high, start=k + 1))
            )
            if assembled != total:
                problems.append(f"expansion i={i} delta={delta}")
            blocks = low + [middle >> delta] + high
            if any(b >= 1 << N for b in blocks):
                problems.append(f"block overlap i={i} delta={delta}")
            separated = (sum(_parity(b) for b in low + [middle] + high)) & 1
            if _parity(total) != separated:
                problems.append(f"parity separation i={i} delta={delta}")
        scaled = w.z * i ** (k - 1)
        expected = _parity(scaled) if i == 1 else 1 - _parity(scaled)
        if _parity(1 + scaled) != expected:
            problems.append(f"carry i={i}")
    return problems


def check_congruence_identity(w: CongruenceWitness, N: int, js: Iterable[int]) -> List[int]:
    """Those j where t((y 2^(kappa+delta) + j)^k) differs mod 2 from
    t(j^k) + t(z j^(k-1)) + sum_{l>=2} t(A_l), for either delta in {0, 1}."""
    kappa = w.kappa(N)
    failed = []
    for j in js:
        terms = coefficient_terms(w, j)
        shortcut = (_parity(j ** w.k) + _parity(w.z * j ** (w.k - 1)) + sum(_parity(a) for a in terms[2:])) & 1
        if any(tm_pow((w.y << (kappa + delta)) + j, w.k) != shortcut for delta in (0, 1)):
            failed.append(j)
    return failed


def verify_lemmas(
    w: CongruenceWitness,
    N: int,
    lemma: str = "all",
    budgets: Optional[Budgets] = None,
    seed: int = 0,
    workers: int = 1,
) -> List[LemmaReport]:
    """Reports for one lemma or, with ``all``, every lemma and every lower power r."""
    lemma = resolve_lemma(lemma)
    reports: List[LemmaReport] = []
    if lemma in (LEMMA_SHIFT, "all"):
        reports.append(verify_shift_invariance(w, N, budgets=budgets, seed=seed, workers=workers))
    if lemma in (LEMMA_SPECIAL, "all"):
        reports.append(verify_special_j(w, N))
    if lemma in (LEMMA_LOWER, "all"):
        for r in range(1, w.k):
            reports.append(verify_lower_powers(w, N, r, budgets=budgets, seed=seed, workers=workers))
    return reports
