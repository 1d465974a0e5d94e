"""Linear forms s(n) = a_1 t(n) + ... + a_k t(n^k) with coefficients in Z[beta]."""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from mpmath import iv

from numfield.element import FieldElement, embed
from numfield.number_field import NumberField
from thue_morse.sequence import tm_pow


@dataclass(frozen=True)
class LinearForm:
    coeffs: Tuple[FieldElement, ...]
    constant: Optional[FieldElement] = None

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValueError("A linear form needs at least one coefficient")
        fields = {c.field for c in self.coeffs}
        if len(fields) != 1:
            raise ValueError("All coefficients must lie in one field")

    @classmethod
    def from_coords(cls, nf: NumberField, coeffs: Sequence[Sequence[int]]) -> "LinearForm":
        """a_i given as coordinate lists in the power basis, a_1 first."""
        return cls(tuple(FieldElement.from_coords(nf, c) for c in coeffs))

    @classmethod
    def indicator(cls, nf: NumberField, k: int) -> "LinearForm":
        """The form picking out t(n^k) alone."""
        coeffs = [FieldElement.zero(nf)] * (k - 1) + [FieldElement.from_int(nf, 1)]
        return cls(tuple(coeffs))

    @property
    def k(self) -> int:
        return len(self.coeffs)

    @property
    def field(self) -> NumberField:
        return self.coeffs[0].field

    @property
    def leading(self) -> FieldElement:
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def require_leading(self) -> None:
        if self.leading.is_zero():
            raise ValueError(f"Leading coefficient a_{self.k} must be nonzero")

    def norm_bound(self, root_index: int, precision: int) -> object:
        """Interval for sum_i |a_i| at the root with the given index."""
        total = iv.mpf(0)
        for c in self.coeffs:
            if not c.is_zero():
                total = total + abs(embed(c, root_index, precision))
        return total

    def to_json(self) -> Dict[str, object]:
        return {
            "k": str(self.k),
            "coeffs": [c.to_json() for c in self.coeffs],
            "constant": None if self.constant is None else self.constant.to_json(),
        }


def s_of_n(form: LinearForm, n: int) -> FieldElement:
    if n < 1:
        raise ValueError("s(n) is defined for n >= 1")
    total = FieldElement.zero(form.field)
    for power, coeff in enumerate(form.coeffs, start=1):
        if tm_pow(n, power):
            total = total + coeff
    return total


def s_values(form: LinearForm, ns: Sequence[int]) -> List[FieldElement]:
    return [s_of_n(form, n) for n in ns]
