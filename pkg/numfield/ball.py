"""Certified ball arithmetic helpers over mpmath's interval context."""
from contextlib import contextmanager
from fractions import Fraction
from typing import Callable, Dict, Iterator, Optional, TypeVar, Union

from mpmath import iv, mp, nstr

T = TypeVar("T")

REPORT_DIGITS = 30


class PrecisionExhausted(Exception):
    """Raised when a certified decision needs more bits than the precision ceiling."""


@contextmanager
def interval_precision(bits: int) -> Iterator[None]:
    """Temporarily set the working precision of mpmath's interval context."""
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def exact(value: Union[int, Fraction]) -> object:
    """Interval enclosure of an integer or a fraction at the current precision."""
    if isinstance(value, Fraction):
        return iv.mpf(value.numerator) / iv.mpf(value.denominator)
    return iv.mpf(value)


def point(value: object) -> object:
    """Degenerate interval at an mpmath real or complex number."""
    if isinstance(value, mp.mpc):
        return iv.mpc(iv.mpf(value.real), iv.mpf(value.imag))
    return iv.mpf(value)


def lower(x: object) -> mp.mpf:
    return mp.mpf(x.a)


def upper(x: object) -> mp.mpf:
    return mp.mpf(x.b)


def abs_upper(x: object) -> mp.mpf:
    return upper(abs(x))


def center(x: object) -> mp.mpf:
    return mp.ldexp(mp.fadd(lower(x), upper(x), exact=True), -1)


def radius(x: object) -> mp.mpf:
    with mp.workprec(max(iv.prec, 53) + 8):
        return mp.fsub(upper(x), lower(x), rounding="u") / 2


def is_real(x: object) -> bool:
    return hasattr(x, "_mpi_")


def refine_until(decide: Callable[[int], Optional[T]], start_bits: int, ceiling: int, what: str) -> T:
    """Run ``decide`` at doubling precisions until it returns something other than None."""
    bits = max(2, min(start_bits, ceiling))
    while True:
        with interval_precision(bits):
            result = decide(bits)
        if result is not None:
            return result
        if bits >= ceiling:
            raise PrecisionExhausted(f"Could not decide {what} within {ceiling} bits")
        bits = min(2 * bits, ceiling)


def ball_json(x: object, digits: int = REPORT_DIGITS) -> Dict[str, object]:
    """(center, radius) decimal strings; complex balls report both parts."""
    if not is_real(x):
        return {"real": ball_json(x.real, digits), "imag": ball_json(x.imag, digits)}
    return {"center": nstr(center(x), digits), "radius": nstr(radius(x), 5)}


def overlaps(x: object, y: object) -> bool:
    """Whether two real intervals share a point."""
    return lower(x) <= upper(y) and lower(y) <= upper(x)


def symmetric(bound: object) -> object:
    """The interval [-bound, bound] around zero."""
    top = upper(abs(bound)) if hasattr(bound, "_mpi_") else mp.mpf(bound)
    return iv.mpf((-top, top))
