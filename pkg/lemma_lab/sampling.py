"""Selections of j values: full arithmetic ranges or deterministic samples."""
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Set, Tuple

import numpy as np

BOUNDARY_VALUES = 16


class PlanError(ValueError):
    """Raised when a plan selects j outside the range a lemma speaks about."""


@dataclass(frozen=True)
class Segment:
    """Arithmetic progression start, start + step, ... below stop."""

    start: int
    stop: int
    step: int = 1

    def __len__(self) -> int:
        if self.stop <= self.start:
            return 0
        return (self.stop - self.start + self.step - 1) // self.step

    @property
    def last(self) -> int:
        return self.start + (len(self) - 1) * self.step

    def __contains__(self, j: int) -> bool:
        return self.start <= j < self.stop and (j - self.start) % self.step == 0

    def nth(self, index: int) -> int:
        return self.start + index * self.step

    def split(self, chunk: int) -> Iterator["Segment"]:
        span = chunk * self.step
        for lo in range(self.start, self.stop, span):
            yield Segment(lo, min(self.stop, lo + span), self.step)


@dataclass(frozen=True)
class JPlan:
    """A j-selection: arithmetic segments (full coverage) or explicit values."""

    segments: Tuple[Segment, ...] = ()
    values: Tuple[int, ...] = ()
    sampled: bool = False
    description: str = ""

    def count(self) -> int:
        return sum(len(seg) for seg in self.segments) + len(self.values)

    def __iter__(self) -> Iterator[int]:
        for seg in self.segments:
            yield from range(seg.start, seg.stop, seg.step)
        yield from self.values


def explicit_plan(values: Sequence[int], description: str = "explicit") -> JPlan:
    return JPlan(values=tuple(sorted(set(int(v) for v in values))), sampled=True, description=description)


def _draw(rng: np.random.Generator, size: int, count: int) -> List[int]:
    # 32-bit chunks, one more than the range needs, reduced mod size
    words = (size.bit_length() + 63) // 32
    chunks = rng.integers(0, 1 << 32, size=(count, words), dtype=np.uint64)
    acc = np.zeros(count, dtype=object)
    for column in range(words - 1, -1, -1):
        acc = (acc << 32) | chunks[:, column].astype(object)
    return (acc % size).tolist()


def sample_plan(range_end: int, budget: int, seed: int = 0) -> JPlan:
    """Deterministic selection from 0..range_end inclusive.

    Small ranges are covered completely. Otherwise the plan takes the lowest
    budget // 2 values, the top 16 boundary values, then seeded pseudo-random
    values until exactly ``budget`` distinct j are chosen.
    """
    if budget < 1:
        raise ValueError("Sample budget must be at least 1")
    if range_end < 0:
        raise ValueError("Range end must be nonnegative")
    size = range_end + 1
    if size <= budget:
        return JPlan(segments=(Segment(0, size),), description=f"full 0..{range_end}")

    low = budget // 2
    chosen: Set[int] = set(range(low))
    boundary = min(BOUNDARY_VALUES, budget - low)
    chosen.update(range(size - boundary, size))
    rng = np.random.default_rng(seed)
    while len(chosen) < budget:
        chosen.update(_draw(rng, size, budget - len(chosen)))
    return JPlan(
        values=tuple(sorted(chosen)),
        sampled=True,
        description=f"sampled {budget} of 0..{range_end} (seed={seed})",
    )


def plan_for(segments: Sequence[Segment], full_range_limit: int, sample_budget: int, seed: int = 0) -> JPlan:
    """Full plan over ``segments`` when small enough, else a sample mapped onto them."""
    total = sum(len(seg) for seg in segments)
    if total <= full_range_limit:
        return JPlan(segments=tuple(segments), description=f"full range of {total} values")
    indices = sample_plan(total - 1, sample_budget, seed)
    return JPlan(
        values=tuple(_index_to_j(segments, i) for i in indices),
        sampled=True,
        description=f"sampled {indices.count()} of {total} values (seed={seed})",
    )


def _index_to_j(segments: Sequence[Segment], index: int) -> int:
    for seg in segments:
        size = len(seg)
        if index < size:
            return seg.nth(index)
        index -= size
    raise IndexError("Plan index beyond the range")


def validate_plan(plan: JPlan, segments: Sequence[Segment]) -> None:
    for seg in plan.segments:
        if len(seg) and not any(
            seg.start in allowed and seg.last in allowed and seg.step % allowed.step == 0 for allowed in segments
        ):
            raise PlanError(f"Segment {seg.start}..{seg.last} lies outside the lemma range")
    for j in plan.values:
        if not any(j in allowed for allowed in segments):
            raise PlanError(f"j={j} lies outside the lemma range")
