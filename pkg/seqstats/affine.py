"""Digits of q1 xi + q2 certified from a digit prefix of xi, and their complexity against xi's."""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence

import gmpy2
import numpy as np
from mpmath import mp, nstr

from seqstats.complexity import count_distinct

MAX_BASE = 36


@dataclass
class AffineReport:
    q1: Fraction
    q2: Fraction
    base: int
    input_digits: int
    integer_part: int
    digits: List[int]
    lost_digits: int
    m_values: List[int] = field(default_factory=list)
    p_xi: List[int] = field(default_factory=list)
    p_image: List[int] = field(default_factory=list)

    def ratios(self) -> List[object]:
        return [mp.mpf(b) / a for a, b in zip(self.p_xi, self.p_image)]

    def rows(self) -> List[Dict[str, str]]:
        return [
            {"m": str(m), "pXi": str(a), "pImage": str(b), "ratio": nstr(r, 15)}
            for m, a, b, r in zip(self.m_values, self.p_xi, self.p_image, self.ratios())
        ]

    def to_json(self) -> Dict[str, object]:
        return {
            "q1": str(self.q1),
            "q2": str(self.q2),
            "base": str(self.base),
            "inputDigits": str(self.input_digits),
            "certifiedDigits": str(len(self.digits)),
            "integerPart": str(self.integer_part),
            "lostDigits": str(self.lost_digits),
            "rows": self.rows(),
        }


def _value(digits: Sequence[int], base: int) -> Fraction:
    numerator = 0
    for d in digits:
        numerator = numerator * base + int(d)
    return Fraction(numerator, base ** len(digits))


def _fraction_digits(value: Fraction, base: int, count: int) -> str:
    scaled = value.numerator * base ** count // value.denominator
    return gmpy2.digits(gmpy2.mpz(scaled), base).zfill(count)


def certified_affine_digits(q1: Fraction, q2: Fraction, base: int, xi_digits: Sequence[int]):
    """(integer part, fractional digits) valid for every xi with the given prefix.

    xi lies in [0.d1...dn, 0.d1...dn + base^-n]; the digits returned are the common
    prefix of the digit strings of both ends of the image interval.
    """
    if q1 == 0:
        raise ValueError("q1 must be nonzero")
    if not 2 <= base <= MAX_BASE:
        raise ValueError(f"Base must lie in 2..{MAX_BASE}")
    if any(not 0 <= int(d) < base for d in xi_digits):
        raise ValueError(f"Digits must lie in 0..{base - 1}")
    n = len(xi_digits)
    low = _value(xi_digits, base)
    high = low + Fraction(1, base ** n)
    ends = sorted((q1 * low + q2, q1 * high + q2))
    whole = ends[0].numerator // ends[0].denominator
    if ends[1].numerator // ends[1].denominator != whole:
        return whole, []
    first = _fraction_digits(ends[0] - whole, base, n)
    second = _fraction_digits(ends[1] - whole, base, n)
    common = 0
    while common < n and first[common] == second[common]:
        common += 1
    return whole, [int(ch, base) for ch in first[:common]]


def affine_complexity_compare(
    q1: Fraction, q2: Fraction, base: int, xi_digits: Sequence[int], m_max: int
) -> AffineReport:
    """Complexities p(m) of xi and of q1 xi + q2 over the same number of certified digits.

    Exploratory only: no verdict is attached to the ratios.
    """
    whole, digits = certified_affine_digits(q1, q2, base, xi_digits)
    report = AffineReport(
        q1=q1, q2=q2, base=base, input_digits=len(xi_digits), integer_part=whole,
        digits=digits, lost_digits=len(xi_digits) - len(digits),
    )
    length = len(digits)
    if length == 0:
        return report
    xi_word = np.asarray(xi_digits[:length], dtype=np.uint8)
    image_word = np.asarray(digits, dtype=np.uint8)
    for m in range(1, min(m_max, length) + 1):
        report.m_values.append(m)
        report.p_xi.append(count_distinct(xi_word, m, base))
        report.p_image.append(count_distinct(image_word, m, base))
    return report
