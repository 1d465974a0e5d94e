"""Elements of Z[beta] in the power basis, with exact ring operations, embeddings and norms."""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import sympy
from mpmath import mp

from numfield.ball import abs_upper, radius, refine_until
from numfield.number_field import X, NumberField, horner


class FieldMismatch(ValueError):
    """Raised when elements of different fields are combined."""


@dataclass(frozen=True)
class FieldElement:
    """sum_i coords[i] * beta^i."""

    coords: Tuple[int, ...]
    field: NumberField

    def __post_init__(self) -> None:
        if len(self.coords) != self.field.degree:
            raise ValueError(f"Expected {self.field.degree} coordinates, got {len(self.coords)}")

    @classmethod
    def from_coords(cls, nf: NumberField, coords: Sequence[int]) -> "FieldElement":
        """Reduce an arbitrary-length coordinate list (a polynomial in beta) into the field."""
        return cls(_reduce(list(int(c) for c in coords), nf.min_poly), nf)

    @classmethod
    def from_int(cls, nf: NumberField, value: int) -> "FieldElement":
        return cls((int(value),) + (0,) * (nf.degree - 1), nf)

    @classmethod
    def zero(cls, nf: NumberField) -> "FieldElement":
        return cls.from_int(nf, 0)

    @classmethod
    def generator(cls, nf: NumberField) -> "FieldElement":
        return cls.from_coords(nf, [0, 1])

    def is_zero(self) -> bool:
        return not any(self.coords)

    def _coerce(self, other: Union["FieldElement", int]) -> "FieldElement":
        if isinstance(other, int):
            return FieldElement.from_int(self.field, other)
        if other.field != self.field:
            raise FieldMismatch("Elements belong to different fields")
        return other

    def __add__(self, other: Union["FieldElement", int]) -> "FieldElement":
        other = self._coerce(other)
        return FieldElement(tuple(a + b for a, b in zip(self.coords, other.coords)), self.field)

    __radd__ = __add__

    def __sub__(self, other: Union["FieldElement", int]) -> "FieldElement":
        other = self._coerce(other)
        return FieldElement(tuple(a - b for a, b in zip(self.coords, other.coords)), self.field)

    def __rsub__(self, other: int) -> "FieldElement":
        return self._coerce(other) - self

    def __neg__(self) -> "FieldElement":
        return FieldElement(tuple(-a for a in self.coords), self.field)

    def __mul__(self, other: Union["FieldElement", int]) -> "FieldElement":
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        product = [0] * (2 * self.field.degree - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    product[i + j] += a * b
        return FieldElement(_reduce(product, self.field.min_poly), self.field)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "FieldElement":
        if exponent < 0:
            raise ValueError("Only nonnegative powers stay in Z[beta]")
        result = FieldElement.from_int(self.field, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, factor: int) -> "FieldElement":
        return FieldElement(tuple(factor * a for a in self.coords), self.field)

    def times_beta(self) -> "FieldElement":
        """Multiplication by beta: shift coordinates and fold the top one back."""
        top = self.coords[-1]
        shifted = (0,) + self.coords[:-1]
        if not top:
            return FieldElement(shifted, self.field)
        return FieldElement(tuple(s - top * c for s, c in zip(shifted, self.field.min_poly)), self.field)

    def to_json(self) -> List[str]:
        return [str(a) for a in self.coords]


def _reduce(poly: List[int], min_poly: Sequence[int]) -> Tuple[int, ...]:
    d = len(min_poly) - 1
    poly = list(poly) + [0] * max(0, d - len(poly))
    for top in range(len(poly) - 1, d - 1, -1):
        c = poly[top]
        if c:
            base = top - d
            for j in range(d):
                poly[base + j] -= c * min_poly[j]
            poly[top] = 0
    return tuple(poly[:d])


OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
}


def elem_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    if op not in OPS:
        raise ValueError(f"Unknown ring operation: {op}")
    if a.field != b.field:
        raise FieldMismatch("Elements belong to different fields")
    return OPS[op](a, b)


def horner_at(coords: Sequence[int], z: object) -> object:
    """Evaluate sum_i coords[i] z^i on an interval z."""
    return horner(list(reversed(coords)), z)


def _tight(value: object, precision: int) -> bool:
    parts = (value,) if hasattr(value, "_mpi_") else (value.real, value.imag)
    magnitude = max(mp.mpf(1), abs_upper(value))
    return all(radius(part) <= mp.ldexp(magnitude, -precision - 1) for part in parts)


def embed(a: FieldElement, root_index: int, precision: int, ceiling: Optional[int] = None) -> object:
    """Interval enclosure of a at root ``root_index`` with radius <= 2^-precision max(1, |a|)."""
    nf = a.field
    ceiling = ceiling or nf.precision_ceiling

    def decide(bits: int) -> Optional[object]:
        value = horner_at(a.coords, nf.root_ball(root_index, bits))
        return value if _tight(value, precision) else None

    return refine_until(decide, precision + 32, ceiling, "an embedding")


def norm(a: FieldElement) -> int:
    """Exact field norm as the resultant of the minimal polynomial and the coordinate polynomial."""
    if a.is_zero():
        return 0
    if a.field.degree == 1:
        return a.coords[0]
    coordinate_poly = sympy.Poly(list(reversed(a.coords)), X)
    return int(a.field.polynomial().resultant(coordinate_poly))
