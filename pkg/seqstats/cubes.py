"""Cube detection (factors aaa) by hashed longest-common-extension queries at period checkpoints."""
import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from seqstats.complexity import Word, letters
from thue_morse.sequence import tm_word

logger = logging.getLogger(__name__)

MODULI = (2147483647, 2147483629)
BASES = (911382323, 972663749)
BATCH = 1 << 20


def _powers(base: int, count: int, mod: int) -> np.ndarray:
    """base^i mod mod for 0 <= i < count, filled by doubling."""
    out = np.ones(count, dtype=np.int64)
    filled = 1
    while filled < count:
        take = min(filled, count - filled)
        out[filled : filled + take] = out[:take] * pow(base, filled, mod) % mod
        filled += take
    return out


class RollingHash:
    """Equality of factors by two modular hashes; comparisons are vectorized."""

    def __init__(self, bits: np.ndarray):
        n = bits.size
        self.n = n
        self.prefix: List[np.ndarray] = []
        self.power: List[np.ndarray] = []
        values = bits.astype(np.int64) + 1
        for mod, base in zip(MODULI, BASES):
            inverse = pow(base, mod - 2, mod)
            inv_pow = _powers(inverse, n, mod)
            # G[i] = sum_{t<i} x[t] base^-t; the running sum stays below 2^63 for n < 2^32
            terms = values * inv_pow % mod
            prefix = np.zeros(n + 1, dtype=np.int64)
            prefix[1:] = np.cumsum(terms) % mod
            self.prefix.append(prefix)
            self.power.append(_powers(base, n + 1, mod))

    def equal(self, a: np.ndarray, b: np.ndarray, length: np.ndarray) -> np.ndarray:
        """x[a:a+length] == x[b:b+length], elementwise."""
        same = np.ones(a.size, dtype=bool)
        for mod, prefix, power in zip(MODULI, self.prefix, self.power):
            left = (prefix[a + length] - prefix[a]) % mod * power[a] % mod
            right = (prefix[b + length] - prefix[b]) % mod * power[b] % mod
            same &= left == right
        return same


def _extend(h: RollingHash, a: np.ndarray, b: np.ndarray, cap: np.ndarray, backward: bool) -> np.ndarray:
    """Longest common extension of positions a and b (to the left when backward), capped."""
    lo = np.zeros(a.size, dtype=np.int64)
    hi = cap.astype(np.int64)
    while True:
        active = lo < hi
        if not active.any():
            return lo
        mid = (lo + hi + 1) // 2
        mid = np.where(active, mid, lo)
        if backward:
            ok = h.equal(a - mid, b - mid, mid)
        else:
            ok = h.equal(a, b, mid)
        lo = np.where(active & ok, mid, lo)
        hi = np.where(active & ~ok, mid - 1, hi)


def _checkpoints(n: int) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Batches of (period, checkpoint) pairs with checkpoint a multiple of period and checkpoint + 2 period <= n."""
    periods = np.arange(1, n // 3 + 1, dtype=np.int64)
    if periods.size == 0:
        return
    counts = (n - 2 * periods) // periods + 1
    ends = np.cumsum(counts)
    cuts = np.searchsorted(ends, np.arange(BATCH, int(ends[-1]), BATCH), side="right")
    bounds = [0, *np.unique(cuts).tolist(), periods.size]
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if hi <= lo:
            continue
        block = counts[lo:hi]
        repeated = np.repeat(periods[lo:hi], block)
        starts = np.repeat(np.cumsum(block) - block, block)
        yield repeated, (np.arange(repeated.size, dtype=np.int64) - starts) * repeated


def _is_cube(bits: np.ndarray, start: int, p: int) -> bool:
    block = bits[start : start + p]
    return (
        start + 3 * p <= bits.size
        and np.array_equal(block, bits[start + p : start + 2 * p])
        and np.array_equal(block, bits[start + 2 * p : start + 3 * p])
    )


def _exact_scan(bits: np.ndarray, p: int) -> Optional[int]:
    """Least start of a cube of period p, or None."""
    if bits.size < 3 * p:
        return None
    same = np.concatenate(([0], np.cumsum(bits[:-p] == bits[p:], dtype=np.int64)))
    hits = np.flatnonzero(same[2 * p :] - same[: -2 * p] == 2 * p)
    return int(hits[0]) if hits.size else None


def find_cube(word: Word) -> Optional[Tuple[int, int]]:
    """(start, period) of a cube with the smallest period found, 0-based, or None.

    A cube of period p contains an aligned square x[q:q+p] = x[q+p:q+2p] with q a
    multiple of p; only those checkpoints go on to the extension search.
    """
    bits = letters(word)
    n = bits.size
    if n < 3:
        return None
    h = RollingHash(bits)
    for periods, qs in _checkpoints(n):
        square = h.equal(qs, qs + periods, periods)
        periods, qs = periods[square], qs[square]
        if periods.size == 0:
            continue
        back = _extend(h, qs, qs + periods, np.minimum(periods, qs), backward=True)
        forward = _extend(h, qs, qs + periods, np.minimum(2 * periods, n - qs - periods), backward=False)
        hits = np.flatnonzero(back + forward >= 2 * periods)
        for index in hits:
            p, start = int(periods[index]), int(qs[index] - back[index])
            if _is_cube(bits, start, p):
                return start, p
            # hash collision; settle this period exactly
            exact = _exact_scan(bits, p)
            if exact is not None:
                return exact, p
    return None


@dataclass
class CubeReport:
    prefix_len: int
    cube: Optional[Tuple[int, int]]

    @property
    def cube_free(self) -> bool:
        return self.cube is None

    def rows(self) -> List[Dict[str, str]]:
        row = {key: "" if value is None else str(value) for key, value in self.to_json().items()}
        return [row]

    def to_json(self) -> Dict[str, object]:
        return {
            "prefixLen": str(self.prefix_len),
            "cubeFree": self.cube_free,
            "cubeStart": None if self.cube is None else str(self.cube[0] + 1),
            "cubePeriod": None if self.cube is None else str(self.cube[1]),
        }


def cube_report(prefix_len: int) -> CubeReport:
    if prefix_len < 3:
        raise ValueError("Cube search needs a prefix of length at least 3")
    cube = find_cube(tm_word(1, prefix_len, 1))
    logger.debug("cube search over %d letters: %s", prefix_len, cube)
    return CubeReport(prefix_len=prefix_len, cube=cube)


def cube_free_check(prefix_len: int) -> bool:
    """True iff t(1) ... t(prefix_len) contains no factor aaa."""
    return cube_report(prefix_len).cube_free
