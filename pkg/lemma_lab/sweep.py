"""Parallel comparison sweeps of t((low + j)^r) against t((high + j)^r)."""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import gmpy2
import numpy as np

from lemma_lab.sampling import JPlan, Segment
from thue_morse.kernels import LIMB_BASE, parity_of_powers

logger = logging.getLogger(__name__)

DEFAULT_CHUNK = 1 << 16


@dataclass(frozen=True)
class SweepTask:
    low: int
    high: int
    r: int
    segment: Optional[Segment] = None
    values: Tuple[int, ...] = ()


def _mismatches(task: SweepTask) -> List[int]:
    if task.segment is not None:
        seg = task.segment
        if len(seg) == 0:
            return []
        if task.high + seg.last < LIMB_BASE:
            js = np.arange(seg.start, seg.stop, seg.step, dtype=np.uint64)
            below = parity_of_powers(js + np.uint64(task.low), task.r)
            above = parity_of_powers(js + np.uint64(task.high), task.r)
            return [int(j) for j in js[below != above]]
        js = range(seg.start, seg.stop, seg.step)
    else:
        js = task.values
    low, high = gmpy2.mpz(task.low), gmpy2.mpz(task.high)
    return [
        j for j in js if (gmpy2.popcount((low + j) ** task.r) ^ gmpy2.popcount((high + j) ** task.r)) & 1
    ]


def split_tasks(low: int, high: int, r: int, plan: JPlan, chunk: int = DEFAULT_CHUNK) -> Iterator[SweepTask]:
    for seg in plan.segments:
        for part in seg.split(chunk):
            yield SweepTask(low=low, high=high, r=r, segment=part)
    for lo in range(0, len(plan.values), chunk):
        yield SweepTask(low=low, high=high, r=r, values=plan.values[lo : lo + chunk])


def run_sweep(low: int, high: int, r: int, plan: JPlan, workers: int = 1, chunk: int = DEFAULT_CHUNK) -> List[int]:
    """Every planned j whose two shifted r-th powers differ in Thue-Morse value, ascending.

    The result does not depend on ``workers``: chunks are merged and sorted.
    """
    tasks = list(split_tasks(low, high, r, plan, chunk))
    logger.debug("sweep r=%d tasks=%d workers=%d", r, len(tasks), workers)
    if workers <= 1 or len(tasks) <= 1:
        parts = [_mismatches(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_mismatches, tasks))
    return sorted(j for part in parts for j in part)
