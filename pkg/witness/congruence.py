"""Congruence witnesses (m, n, x), the shift witness y and the explicit N threshold."""
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple

from thue_morse.sequence import tm

CASE_EVEN = "even-k"
CASE_ODD_S_ODD = "odd-s-odd"
CASE_ODD_S_EVEN = "odd-s-even"


class InvariantViolation(Exception):
    """Raised when a construction breaks an invariant its derivation guarantees."""


class ThresholdError(ValueError):
    """Raised when N is below the threshold from which the shift lemmas are proved."""


@dataclass(frozen=True)
class CongruenceWitness:
    k: int
    nu: int
    m: int
    n: int
    x: int
    y: int
    z: int
    case_tag: str
    s: Optional[int] = None
    a: Optional[int] = None

    @property
    def modulus_exponent(self) -> int:
        return 2 * self.m + 2 * self.n + 1

    @property
    def modulus(self) -> int:
        return 1 << self.modulus_exponent

    @property
    def odd_part(self) -> int:
        return self.k >> self.nu

    def kappa(self, N: int) -> int:
        """Shift exponent kN - nu(k)."""
        return self.k * N - self.nu

    def to_json(self) -> Dict[str, Optional[str]]:
        return {
            "k": str(self.k),
            "nu": str(self.nu),
            "m": str(self.m),
            "n": str(self.n),
            "x": str(self.x),
            "y": str(self.y),
            "z": str(self.z),
            "caseTag": self.case_tag,
            "s": None if self.s is None else str(self.s),
            "a": None if self.a is None else str(self.a),
        }


def two_adic_valuation(k: int) -> int:
    if k < 1:
        raise ValueError("2-adic valuation needs a positive integer")
    return (k & -k).bit_length() - 1


def _solve_with_case(k: int) -> Tuple[int, int, int, str, Optional[int], Optional[int]]:
    if k < 2:
        raise ValueError("Congruence witnesses exist for k >= 2 only")
    if k % 2 == 0:
        return 1, 1, 1, CASE_EVEN, None, None

    excess = pow(3, k - 1) - 1
    s = two_adic_valuation(excess)
    if s < 3:
        raise InvariantViolation(f"3^{k - 1} - 1 has 2-adic valuation {s} < 3")
    a = (excess >> (s + 1)) & 1
    u, odd_s = divmod(s, 2)
    if odd_s:
        m = n = u + 1
        x = (1 << (2 * u + 1)) - 1 + (1 - a) * (1 << (2 * u + 2))
        tag = CASE_ODD_S_ODD
    else:
        m, n = u + 1, u
        x = (1 << (2 * u + 1)) - 1 + (1 << (2 * u + 2))
        tag = CASE_ODD_S_EVEN
    return m, n, x, tag, s, a


def solve_congruence(k: int) -> Tuple[int, int, int]:
    """Constructive solution (m, n, x) of the two simultaneous congruences.

    Even k always gives (1, 1, 1). For odd k the exponent s is the lowest set
    bit of 3^(k-1) - 1 and a the bit above it, so that
    3^(k-1) = 1 + 2^s + a*2^(s+1) (mod 2^(s+2)).
    """
    m, n, x, _, _, _ = _solve_with_case(k)
    if not verify_congruence(k, m, n, x):
        raise InvariantViolation(f"Constructed ({m}, {n}, {x}) does not solve the congruences for k={k}")
    return m, n, x


def verify_congruence(k: int, m: int, n: int, x: int) -> bool:
    """x = 2^(2m-1) - 1 (mod 2^(2m)) and 3^(k-1) x = 2^(2n) - 1 (mod 2^(2n+1))."""
    if k < 2 or m < 1 or n < 1 or x < 1:
        return False
    first = x % (1 << (2 * m)) == (1 << (2 * m - 1)) - 1
    second = (pow(3, k - 1) * x) % (1 << (2 * n + 1)) == (1 << (2 * n)) - 1
    return first and second


@lru_cache(maxsize=None)
def shift_witness(k: int) -> CongruenceWitness:
    """Complete witness with the least positive y solving (k/2^nu) y = x mod 2^(2m+2n+1)."""
    nu = two_adic_valuation(k)
    m, n, x, tag, s, a = _solve_with_case(k)
    modulus = 1 << (2 * m + 2 * n + 1)
    odd = k >> nu
    y = (pow(odd, -1, modulus) * x) % modulus or modulus
    witness = CongruenceWitness(k=k, nu=nu, m=m, n=n, x=x, y=y, z=odd * y, case_tag=tag, s=s, a=a)
    problems = validate_witness(witness)
    if problems:
        raise InvariantViolation(f"Witness for k={k} violates: {'; '.join(problems)}")
    return witness


def witness_table(ks: Iterable[int]) -> Dict[int, CongruenceWitness]:
    return {k: shift_witness(k) for k in ks}


def _suffix_ok(value: int, width: int) -> bool:
    # width low bits must read 0 then width-1 ones
    bits = format(value, "b").zfill(width)[-width:]
    return bits == "0" + "1" * (width - 1)


def validate_witness(w: CongruenceWitness) -> List[str]:
    """Names of the witness invariants that fail; empty when the witness is sound."""
    problems: List[str] = []
    modulus = w.modulus
    if w.nu != two_adic_valuation(w.k):
        problems.append("nu is not the 2-adic valuation of k")
    if not verify_congruence(w.k, w.m, w.n, w.x):
        problems.append("congruences")
    if not 1 <= w.y <= modulus:
        problems.append("y outside [1, modulus]")
    if (w.odd_part * w.y - w.x) % modulus:
        problems.append("odd part of k times y is not x modulo 2^(2m+2n+1)")
    if w.z != w.odd_part * w.y:
        problems.append("z differs from odd part of k times y")
    if not _suffix_ok(w.x, 2 * w.m):
        problems.append("binary suffix of x")
    if not _suffix_ok(pow(3, w.k - 1) * w.x, 2 * w.n + 1):
        problems.append("binary suffix of 3^(k-1) x")
    return problems


def check_tm_identities(w: CongruenceWitness) -> bool:
    """t(1 + x) = t(x), t(1 + 3^(k-1) x) = 1 - t(3^(k-1) x), and both binary suffix forms."""
    scaled = pow(3, w.k - 1) * w.x
    identities = tm(1 + w.x) == tm(w.x) and tm(1 + scaled) == 1 - tm(scaled)
    return identities and _suffix_ok(w.x, 2 * w.m) and _suffix_ok(scaled, 2 * w.n + 1)


def lambda_floor(k: int, N: int) -> int:
    """floor(lambda N) with lambda = 1 + 1/(2(k - 1)), in exact integer arithmetic."""
    return ((2 * k - 1) * N) // (2 * (k - 1))


def bound_conditions(w: CongruenceWitness, N: int) -> Tuple[bool, bool]:
    """The two exact coefficient inequalities at N.

    (i)  2^k (2^M)^k (5 * 2^(N-2))^(k-1) < 2^(kN - nu), multiplied through by 4^(k-1);
    (ii) 2^(k-1) (2^M)^(k-1) 2^(floor(lambda N)(k-1)) < 2^(kN - nu),
    with M = 2m + 2n + 1.
    """
    k, M = w.k, w.modulus_exponent
    target = 1 << w.kappa(N)
    first = (1 << (k + M * k)) * pow(5, k - 1) * (1 << (N * (k - 1))) < target * (1 << (2 * (k - 1)))
    second = (1 << (k - 1 + M * (k - 1) + lambda_floor(k, N) * (k - 1))) < target
    return first, second


def _safe_threshold(w: CongruenceWitness) -> int:
    # both conditions hold for every N at or beyond this point
    k, M = w.k, w.modulus_exponent
    return max(2 * ((k - 1) * (M + 1) + w.nu), k * (M + 1) + w.nu + k) + 1


@lru_cache(maxsize=None)
def _min_valid_N(w: CongruenceWitness) -> int:
    last_failure = 0
    for N in range(1, _safe_threshold(w) + 1):
        if not all(bound_conditions(w, N)):
            last_failure = N
    return last_failure + 1


def min_valid_N(w: CongruenceWitness) -> int:
    """Least N from which both coefficient inequalities hold for every larger N.

    Condition (ii) is not monotone in N, so the scan runs up to an analytic
    point past which both hold and returns one more than the last failure.
    """
    return _min_valid_N(w)


def require_threshold(w: CongruenceWitness, N: int) -> None:
    threshold = min_valid_N(w)
    if N < threshold:
        raise ThresholdError(f"N={N} is below the threshold {threshold} for k={w.k}")
