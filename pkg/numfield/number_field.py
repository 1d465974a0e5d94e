"""Real algebraic number fields Q(beta) given by a monic irreducible integer polynomial."""
import logging
import threading
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from mpmath import iv, mp, nstr

from numfield.ball import (
    PrecisionExhausted,
    ball_json,
    interval_precision,
    point,
    refine_until,
    upper,
)

logger = logging.getLogger(__name__)

X = sympy.Symbol("x")
Y = sympy.Symbol("y")

CLASS_INTEGER = "rational-integer"
CLASS_PISOT = "pisot"
CLASS_SALEM = "salem"
CLASS_OTHER = "other"

START_PRECISION = 128
GUARD_BITS = 32
DEFAULT_CEILING = 1 << 20
SQRT_GOLDEN_POLY = (-1, 0, -1, 0, 1)


class ReducibleError(ValueError):
    """Raised when the input polynomial factors over the rationals."""

    def __init__(self, factor: str):
        super().__init__(f"Polynomial is reducible over Q; found factor {factor}")
        self.factor = factor


class IsolationError(Exception):
    """Raised when certified root disks contradict the polynomial they were built from."""


@dataclass(frozen=True)
class RootDisk:
    """Disk certified to hold exactly one root; real disks are centred on the real axis."""

    center: object
    radius: object
    real: bool

    def ball(self, bits: int) -> object:
        """Interval enclosure of the disk with endpoints rounded at ``bits`` bits."""
        with interval_precision(bits):
            spread = iv.mpf((-self.radius, self.radius))
            if self.real:
                return point(self.center.real) + spread
            return iv.mpc(point(self.center.real) + spread, point(self.center.imag) + spread)


def _descending(coeffs: Sequence[int]) -> List[int]:
    return list(reversed(coeffs))


def _derivative(desc: Sequence[int]) -> List[int]:
    d = len(desc) - 1
    return [c * (d - i) for i, c in enumerate(desc[:-1])]


def horner(desc: Sequence[int], z: object) -> object:
    acc = iv.mpf(0) if hasattr(z, "_mpi_") else iv.mpc(0, 0)
    for c in desc:
        acc = acc * z + c
    return acc


def _newton(desc: Sequence[int], deriv: Sequence[int], z: object, bits: int) -> object:
    for _ in range(4 * bits.bit_length() + 60):
        slope = mp.polyval(deriv, z)
        if slope == 0:
            break
        step = mp.polyval(desc, z) / slope
        z -= step
        if abs(step) <= mp.ldexp(abs(z) + 1, -bits):
            break
    return z


def _inclusion_radius(desc: Sequence[int], deriv: Sequence[int], z: object) -> Optional[object]:
    # d |p(z)| / |p'(z)| bounds the distance from z to the nearest root
    zi = point(z)
    slope = abs(horner(deriv, zi))
    if (slope > 0) is not True:
        return None
    return upper(iv.mpf(len(deriv)) * abs(horner(desc, zi)) / slope)


def _disjoint(disks: Sequence[RootDisk]) -> bool:
    for i, first in enumerate(disks):
        for second in disks[i + 1 :]:
            gap = abs(point(first.center) - point(second.center))
            if (gap > iv.mpf(first.radius) + iv.mpf(second.radius)) is not True:
                return False
    return True


def _isolate(coeffs: Sequence[int], bits: int) -> Optional[List[RootDisk]]:
    desc = _descending(coeffs)
    deriv = _derivative(desc)
    d = len(desc) - 1
    with mp.workprec(bits):
        try:
            seeds = mp.polyroots(desc, maxsteps=100 + 20 * d, extraprec=bits)
        except mp.NoConvergence:
            return None
        roots = [_newton(desc, deriv, mp.mpc(z), bits) for z in seeds]
    disks: List[RootDisk] = []
    with mp.workprec(bits + 16), interval_precision(bits + 16):
        for z in roots:
            r = _inclusion_radius(desc, deriv, z)
            if r is None:
                return None
            if abs(z.imag) <= r:
                disks.append(RootDisk(center=mp.mpc(z.real, 0), radius=mp.fadd(r, abs(z.imag), rounding="u"), real=True))
            else:
                disks.append(RootDisk(center=mp.mpc(z), radius=r, real=False))
        if not _disjoint(disks):
            return None
    return disks


def _refine(coeffs: Sequence[int], disk: RootDisk, bits: int, ceiling: int) -> RootDisk:
    """Shrink an isolating disk to radius <= 2^-bits max(1, |center|) around the same root."""
    desc = _descending(coeffs)
    deriv = _derivative(desc)
    work = bits + 32
    while True:
        with mp.workprec(work):
            start = mp.mpf(disk.center.real) if disk.real else mp.mpc(disk.center)
            z = _newton(desc, deriv, start, work)
        with mp.workprec(work), interval_precision(work):
            r = _inclusion_radius(desc, deriv, z)
            if r is not None:
                inside = (abs(point(mp.mpc(z)) - point(disk.center)) + iv.mpf(r) <= iv.mpf(disk.radius)) is True
                tight = r <= mp.ldexp(max(mp.mpf(1), abs(z)), -bits)
                if inside and tight:
                    return RootDisk(center=mp.mpc(z), radius=r, real=disk.real)
        if work >= ceiling:
            raise PrecisionExhausted(f"Root refinement to {bits} bits exceeded {ceiling} bits")
        work = min(2 * work, ceiling)


@dataclass(frozen=True, eq=False)
class NumberField:
    """Q(beta) with certified root disks; coefficients are stored constant term first."""

    min_poly: Tuple[int, ...]
    roots: Tuple[RootDisk, ...]
    beta_index: int
    classification: str
    precision_ceiling: int = DEFAULT_CEILING
    _refined: Dict[Tuple[int, int], RootDisk] = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NumberField) and self.min_poly == other.min_poly

    def __hash__(self) -> int:
        return hash(self.min_poly)

    @property
    def degree(self) -> int:
        return len(self.min_poly) - 1

    def conjugate_indices(self) -> List[int]:
        return [i for i in range(self.degree) if i != self.beta_index]

    def root_disk(self, index: int, bits: int) -> RootDisk:
        if not 0 <= index < self.degree:
            raise IndexError(f"Root index {index} outside 0..{self.degree - 1}")
        if self.degree == 1:
            return self.roots[0]
        key = (index, bits)
        with self._lock:
            if key not in self._refined:
                self._refined[key] = _refine(self.min_poly, self.roots[index], bits, self.precision_ceiling)
            return self._refined[key]

    def root_ball(self, index: int, bits: int) -> object:
        """Interval enclosure of root ``index`` accurate to about ``bits`` bits."""
        return self.root_disk(index, bits).ball(bits + GUARD_BITS)

    def beta_ball(self, bits: int) -> object:
        return self.root_ball(self.beta_index, bits)

    def polynomial(self) -> sympy.Poly:
        return sympy.Poly(_descending(self.min_poly), X)

    def describe(self) -> Dict[str, object]:
        with interval_precision(START_PRECISION):
            return {
                "minPoly": [str(c) for c in self.min_poly],
                "polynomial": str(self.polynomial().as_expr()),
                "degree": str(self.degree),
                "classification": self.classification,
                "betaIndex": str(self.beta_index),
                "beta": ball_json(self.beta_ball(START_PRECISION // 2)),
                "roots": [
                    {"center": nstr(disk.center, 20), "radius": nstr(disk.radius, 5), "real": disk.real}
                    for disk in self.roots
                ],
            }


def trace_polynomial(coeffs: Sequence[int]) -> sympy.Poly:
    """Q with p(x) = x^m Q(x + 1/x) for a palindromic p of degree 2m."""
    m = (len(coeffs) - 1) // 2
    previous, current = sympy.Poly(2, Y), sympy.Poly(Y, Y)
    trace = sympy.Poly(coeffs[m], Y)
    for i in range(1, m + 1):
        trace += coeffs[m + i] * current
        previous, current = current, sympy.Poly(Y, Y) * current - previous
    return trace


def _is_salem(coeffs: Sequence[int]) -> bool:
    d = len(coeffs) - 1
    if d < 4 or d % 2:
        return False
    m = d // 2
    trace = trace_polynomial(coeffs)
    return trace.count_roots(-2, 2) == m - 1 and trace.count_roots(2, None) == 1


def _check_irreducible(coeffs: Sequence[int]) -> None:
    poly = sympy.Poly(_descending(coeffs), X)
    _, factors = poly.factor_list()
    if len(factors) != 1 or factors[0][1] != 1:
        raise ReducibleError(str(factors[0][0].as_expr()))


def _choose_beta(coeffs: Sequence[int], disks: Sequence[RootDisk], ceiling: int) -> int:
    real = [i for i, disk in enumerate(disks) if disk.real]
    if not real:
        raise ValueError("Polynomial has no real root > 1")
    index = max(real, key=lambda i: disks[i].center.real)

    def decide(bits: int) -> Optional[bool]:
        return _refine(coeffs, disks[index], bits, ceiling).ball(bits + GUARD_BITS) > 1

    if not refine_until(decide, 64, ceiling, "beta > 1"):
        raise ValueError("Polynomial has no real root > 1")
    return index


def _is_reciprocal(coeffs: Sequence[int]) -> bool:
    return tuple(coeffs) == tuple(reversed(coeffs))


def _is_pisot(coeffs: Sequence[int], disks: Sequence[RootDisk], beta_index: int, ceiling: int) -> bool:
    """Every conjugate other than beta lies strictly inside the unit disk."""
    if _is_reciprocal(coeffs) and len(coeffs) - 1 > 2:
        # roots pair up as r, 1/r; a pair other than beta, 1/beta cannot both lie inside
        return False

    # an irreducible polynomial with a root on the unit circle is reciprocal,
    # so below every comparison is decided at some finite precision
    def decide(bits: int) -> Optional[bool]:
        undecided = False
        for i, disk in enumerate(disks):
            if i == beta_index:
                continue
            modulus = abs(_refine(coeffs, disk, bits, ceiling).ball(bits + GUARD_BITS))
            if (modulus < 1) is True:
                continue
            if (modulus > 1) is True:
                return False
            undecided = True
        return None if undecided else True

    return refine_until(decide, 64, ceiling, "conjugate moduli")


def _classify(coeffs: Sequence[int], disks: Sequence[RootDisk], beta_index: int, ceiling: int) -> str:
    if len(coeffs) - 1 == 1:
        return CLASS_INTEGER
    if _is_pisot(coeffs, disks, beta_index, ceiling):
        return CLASS_PISOT
    if _is_reciprocal(coeffs) and _is_salem(coeffs):
        return CLASS_SALEM
    return CLASS_OTHER


def _check_root_product(coeffs: Sequence[int], disks: Sequence[RootDisk]) -> None:
    d = len(coeffs) - 1
    expected = (-1) ** d * coeffs[0]
    with interval_precision(START_PRECISION):
        product = iv.mpc(1, 0)
        for disk in disks:
            product = product * disk.ball(START_PRECISION)
        if not (expected in product.real and 0 in product.imag):
            raise IsolationError("Product of certified roots does not enclose the constant term")


def parse_field(coeffs: Sequence[int], precision_ceiling: int = DEFAULT_CEILING) -> NumberField:
    """Build Q(beta) from integer coefficients listed constant term first."""
    coeffs = tuple(int(c) for c in coeffs)
    if len(coeffs) < 2:
        raise ValueError("Minimal polynomial must have degree at least 1")
    if coeffs[-1] != 1:
        raise ValueError("Minimal polynomial must be monic (leading coefficient 1)")
    d = len(coeffs) - 1
    if d == 1:
        beta = -coeffs[0]
        if beta < 2:
            raise ValueError("Polynomial has no real root > 1")
        disk = RootDisk(center=mp.mpc(beta), radius=mp.mpf(0), real=True)
        return NumberField(coeffs, (disk,), 0, CLASS_INTEGER, precision_ceiling)

    _check_irreducible(coeffs)
    bits = START_PRECISION
    while True:
        disks = _isolate(coeffs, bits)
        if disks is not None:
            break
        if bits >= precision_ceiling:
            raise PrecisionExhausted(f"Root isolation failed within {precision_ceiling} bits")
        logger.debug("root isolation retry at %d bits", 2 * bits)
        bits = min(2 * bits, precision_ceiling)
    _check_root_product(coeffs, disks)
    beta_index = _choose_beta(coeffs, disks, precision_ceiling)
    classification = _classify(coeffs, disks, beta_index, precision_ceiling)
    return NumberField(coeffs, tuple(disks), beta_index, classification, precision_ceiling)


def threshold_check(nf: NumberField) -> bool:
    """Whether beta > sqrt(phi), i.e. beta^4 - beta^2 - 1 > 0.

    beta = sqrt(phi) exactly is caught by a polynomial gcd before any ball
    evaluation and reported False.
    """
    boundary = sympy.Poly(_descending(SQRT_GOLDEN_POLY), X)
    if sympy.gcd(nf.polynomial(), boundary).degree() > 0:
        return False

    def decide(bits: int) -> Optional[bool]:
        beta = nf.beta_ball(bits)
        return beta ** 4 - beta ** 2 - 1 > 0

    return refine_until(decide, 64, nf.precision_ceiling, "the sign of beta^4 - beta^2 - 1")
