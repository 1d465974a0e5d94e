"""Greedy beta-expansions of elements of Q(beta) with exact orbits, and certified digits of series values."""
import logging
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from mpmath import iv, mp

from approx.machine import BudgetExceeded
from numfield.ball import interval_precision, lower, refine_until, upper
from numfield.element import FieldElement, embed
from numfield.number_field import NumberField
from thue_morse.sequence import tm_word

logger = logging.getLogger(__name__)

START_BITS = 64
COORDINATE_BITS = 1 << 14

State = Tuple[Tuple[int, ...], int]


@dataclass
class BetaExpansion:
    digits: List[int]
    orbit: List[State] = field(default_factory=list)
    preperiod: Optional[int] = None
    period: Optional[int] = None
    exact: bool = True
    scale: int = 0

    def to_json(self) -> Dict[str, object]:
        return {
            "digits": [str(d) for d in self.digits],
            "length": str(len(self.digits)),
            "preperiod": None if self.preperiod is None else str(self.preperiod),
            "period": None if self.period is None else str(self.period),
            "periodic": self.period is not None,
            "exact": self.exact,
            "scaleExponent": str(self.scale),
            "orbitStates": str(len(self.orbit)),
        }


def _normalize(coords: Sequence[int], q: int) -> State:
    g = gcd(q, *coords)
    return tuple(c // g for c in coords), q // g


def _floor(value: FieldElement, q: int) -> int:
    """floor(value / q) at beta, with exact detection of integer values."""
    nf = value.field

    def decide(bits: int) -> Optional[int]:
        v = embed(value, nf.beta_index, bits) / q
        lo, hi = int(mp.floor(lower(v))), int(mp.floor(upper(v)))
        if lo == hi:
            return lo
        if hi == lo + 1 and (value - FieldElement.from_int(nf, hi * q)).is_zero():
            return hi
        return None

    return refine_until(decide, START_BITS, nf.precision_ceiling, "a beta-digit")


def _check_unit_interval(x: FieldElement, q: int) -> None:
    nf = x.field
    if x.is_zero():
        return
    if (x - FieldElement.from_int(nf, q)).is_zero():
        raise ValueError("x = 1 is outside [0, 1)")

    def decide(bits: int) -> Optional[bool]:
        v = embed(x, nf.beta_index, bits) / q
        inside = (v > 0, v < 1)
        if False in inside:
            return False
        return None if None in inside else True

    if not refine_until(decide, START_BITS, nf.precision_ceiling, "0 <= x < 1"):
        raise ValueError("x must lie in [0, 1)")


def detect_period(orbit: Sequence[State]) -> Optional[Tuple[int, int]]:
    """(preperiod, period) of the first exact repetition in an orbit, or None."""
    seen: Dict[State, int] = {}
    for index, state in enumerate(orbit):
        if state in seen:
            return seen[state], index - seen[state]
        seen[state] = index
    return None


def beta_expand(
    nf: NumberField, num: Sequence[int], den: int, max_digits: int, coordinate_bits: int = COORDINATE_BITS
) -> BetaExpansion:
    """Greedy digits of x = (sum_i num[i] beta^i) / den with the exact orbit of tails."""
    if den < 1:
        raise ValueError("Denominator must be positive")
    if max_digits < 0:
        raise ValueError("Digit budget must be nonnegative")
    x = FieldElement.from_coords(nf, num)
    _check_unit_interval(x, den)
    state = _normalize(x.coords, den)
    orbit = [state]
    seen = {state: 0}
    digits: List[int] = []
    periodic: Optional[Tuple[int, int]] = None
    for index in range(1, max_digits + 1):
        coords, q = state
        shifted = FieldElement(coords, nf).times_beta()
        digit = _floor(shifted, q)
        state = _normalize((shifted - FieldElement.from_int(nf, digit * q)).coords, q)
        digits.append(digit)
        if max(abs(c) for c in state[0]).bit_length() > coordinate_bits:
            raise BudgetExceeded(f"Orbit coordinates exceed {coordinate_bits} bits after {index} digits")
        if periodic is None:
            orbit.append(state)
            if state in seen:
                periodic = seen[state], index - seen[state]
                logger.debug("beta-expansion period %s found after %d digits", periodic, index)
            else:
                seen[state] = index
    preperiod, period = periodic if periodic else (None, None)
    return BetaExpansion(digits=digits, orbit=orbit, preperiod=preperiod, period=period)


def reconstruct(nf: NumberField, num: Sequence[int], den: int, e: BetaExpansion) -> bool:
    """x = sum_{i<=n} d_i beta^-i + x_n beta^-n exactly, for the last orbit state x_n reached.

    With a detected period the orbit stops at the repetition, so the tail state is
    recovered from the cycle.
    """
    if not e.exact:
        raise ValueError("Only exact expansions carry an orbit to reconstruct from")
    n = len(e.digits)
    if n < len(e.orbit):
        last = n
    elif e.period is not None:
        last = e.preperiod + (n - e.preperiod) % e.period
    else:
        raise ValueError("Orbit does not cover the emitted digits")
    coords, q = e.orbit[last]
    x = FieldElement.from_coords(nf, num)
    beta = FieldElement.generator(nf)
    digit_sum = FieldElement.zero(nf)
    for d in e.digits:
        digit_sum = digit_sum * beta + d
    lhs = x * (beta ** n) * q
    rhs = digit_sum * (den * q) + FieldElement(coords, nf) * den
    return (lhs - rhs).is_zero()


def series_ball(nf: NumberField, k: int, terms: int, bits: int) -> object:
    """Interval for gamma_k = sum_n t(n^k) beta^-n: partial sum over n <= terms plus tail."""
    beta = nf.beta_ball(bits)
    inv = 1 / beta
    power = inv
    total = iv.mpf(0)
    for bit in tm_word(1, terms, k).bits:
        if bit:
            total = total + power
        power = power * inv
    # power is now beta^-(terms + 1)
    return total + iv.mpf((0, upper(power * beta / (beta - 1))))


def expand_series_value(nf: NumberField, k: int, terms: int, max_digits: int) -> BetaExpansion:
    """Greedy digits of gamma_k emitted only while the enclosing ball fixes them.

    No period is ever claimed. Values >= 1 are first scaled by beta^-e, with e
    reported as the scale exponent.
    """
    bits = max(START_BITS, 2 * terms + 64)
    with interval_precision(bits):
        value = series_ball(nf, k, terms, bits)
        beta = nf.beta_ball(bits)
        scale = 0
        while (value < 1) is not True:
            if (value >= 1) is not True:
                return BetaExpansion(digits=[], exact=False)
            value = value / beta
            scale += 1
        digits: List[int] = []
        for _ in range(max_digits):
            v = value * beta
            lo, hi = int(mp.floor(lower(v))), int(mp.floor(upper(v)))
            if lo != hi:
                break
            digits.append(lo)
            value = v - lo
    return BetaExpansion(digits=digits, exact=False, scale=scale)
