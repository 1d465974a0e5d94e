"""Configuration models for verification runs."""
import os
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

TOOL_VERSION = "0.1.0"

SUBCOMMANDS = ("witness", "verify-lemmas", "residual", "norm-audit", "beta-expand", "stats")
STATS_KINDS = ("complexity", "frequencies", "cubefree", "affine", "moshe")
OUTPUT_FORMATS = ("json", "csv")


@dataclass
class Budgets:
    """Resource ceilings shared by every subcommand."""

    term_budget: int = 1 << 16
    precision_ceiling: int = 1 << 20
    full_range_limit: int = 1 << 26
    sample_budget: int = 10 ** 6
    chunk_size: int = 1 << 16

    def validate(self) -> None:
        bad = [name for name, value in asdict(self).items() if value <= 0]
        if bad:
            raise ValueError(f"Budgets must be positive: {', '.join(bad)}")


@dataclass
class RunConfig:
    """Everything a single run depends on; echoed verbatim into the report."""

    subcommand: str
    k: Optional[int] = None
    N: Optional[int] = None
    field_poly: Optional[str] = None
    coeffs: List[List[int]] = field(default_factory=list)
    xi_coords: List[int] = field(default_factory=list)
    lemma: str = "all"
    tol_bits: int = 64
    below_threshold: bool = False
    num: List[int] = field(default_factory=list)
    den: int = 1
    digits: int = 64
    stats_kind: Optional[str] = None
    m: int = 8
    prefix_len: int = 1 << 16
    q1: str = "1"
    q2: str = "0"
    base: int = 2
    seed: int = 0
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)
    output_format: str = "json"
    output_path: Optional[str] = None
    budgets: Budgets = field(default_factory=Budgets)

    def validate(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise ValueError(f"Unknown subcommand: {self.subcommand}")
        if self.subcommand == "stats" and self.stats_kind not in STATS_KINDS:
            raise ValueError(f"Unknown stats kind: {self.stats_kind}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"Unknown output format: {self.output_format}")
        if self.workers < 1:
            raise ValueError("Worker count must be positive")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be positive")
        if self.N is not None and self.N < 1:
            raise ValueError("N must be positive")
        if self.den < 1:
            raise ValueError("Denominator must be positive")
        if self.tol_bits < 1 or self.digits < 0 or self.m < 1 or self.prefix_len < 1:
            raise ValueError("Numeric options must be positive")
        for name in ("q1", "q2"):
            try:
                Fraction(getattr(self, name))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"Bad rational for {name}: {getattr(self, name)!r}") from exc
        self.budgets.validate()

    def echo(self) -> Dict[str, object]:
        """Decimal-string rendering of the configuration for reports."""
        return _stringify(asdict(self))


def _stringify(value: object) -> object:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, dict):
        return {key: _stringify(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_stringify(item) for item in value]
    return value
