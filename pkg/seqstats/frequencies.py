"""Overlapping block frequencies of t(n^k)."""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List

import numpy as np
from mpmath import mp, nstr

from seqstats.complexity import DEFAULT_CHUNK, window_codes
from thue_morse.sequence import tm_word

MAX_BLOCK = 16


@dataclass
class FrequencyTable:
    k: int
    m: int
    prefix_len: int
    counts: np.ndarray

    @property
    def windows(self) -> int:
        return int(self.counts.sum())

    def frequency(self, block: int) -> Fraction:
        return Fraction(int(self.counts[block]), self.windows)

    def total(self) -> Fraction:
        return sum((self.frequency(b) for b in range(self.counts.size)), Fraction(0))

    def max_deviation(self) -> Fraction:
        """max over blocks of |frequency 2^m - 1|."""
        top, bottom = int(self.counts.max()), int(self.counts.min())
        scale = 1 << self.m
        return max(abs(Fraction(top * scale, self.windows) - 1), abs(Fraction(bottom * scale, self.windows) - 1))

    def missing(self) -> List[str]:
        return [format(b, f"0{self.m}b") for b in np.flatnonzero(self.counts == 0)]

    def rows(self) -> List[Dict[str, str]]:
        return [
            {
                "block": format(b, f"0{self.m}b"),
                "count": str(int(self.counts[b])),
                "frequency": nstr(mp.mpf(int(self.counts[b])) / self.windows, 15),
            }
            for b in range(self.counts.size)
        ]

    def to_json(self) -> Dict[str, object]:
        deviation = self.max_deviation()
        return {
            "k": str(self.k),
            "m": str(self.m),
            "prefixLen": str(self.prefix_len),
            "windows": str(self.windows),
            "rows": self.rows(),
            "maxDeviation": nstr(mp.mpf(deviation.numerator) / deviation.denominator, 15),
            "missingBlocks": self.missing(),
            "sumIsOne": self.total() == 1,
        }


def block_frequencies(k: int, m: int, prefix_len: int) -> FrequencyTable:
    if not 1 <= m <= MAX_BLOCK:
        raise ValueError(f"Block length must lie in 1..{MAX_BLOCK}")
    if prefix_len < m:
        raise ValueError("Prefix shorter than the block length")
    bits = tm_word(1, prefix_len, k).bits
    counts = np.zeros(1 << m, dtype=np.int64)
    for lo in range(0, prefix_len - m + 1, DEFAULT_CHUNK):
        hi = min(prefix_len, lo + DEFAULT_CHUNK + m - 1)
        counts += np.bincount(window_codes(bits[lo:hi], m).astype(np.int64), minlength=1 << m)
    return FrequencyTable(k=k, m=m, prefix_len=prefix_len, counts=counts)
