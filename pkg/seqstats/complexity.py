"""Subword complexity of finite prefixes, entropy estimates and the lower bound for t(n^k)."""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

import gmpy2
import numpy as np
from mpmath import mp, nstr

from thue_morse.sequence import BinaryWord, tm_word

logger = logging.getLogger(__name__)

MAX_WINDOW = 64
BINCOUNT_LIMIT = 24
DEFAULT_CHUNK = 1 << 22

Word = Union[BinaryWord, np.ndarray]


def letters(word: Word) -> np.ndarray:
    if isinstance(word, BinaryWord):
        return word.bits
    return np.asarray(word, dtype=np.uint8)


def window_codes(word: Word, m: int, base: int = 2) -> np.ndarray:
    """Integer code of every length-m window, most significant letter first."""
    bits = letters(word)
    n = bits.size
    if m < 1 or m > n:
        raise ValueError(f"Window length {m} outside 1..{n}")
    if base ** m > 1 << 64:
        raise ValueError(f"Windows of {m} letters over base {base} do not fit 64-bit codes")
    count = n - m + 1
    codes = np.zeros(count, dtype=np.uint64)
    radix = np.uint64(base)
    for t in range(m):
        codes = codes * radix + bits[t : t + count].astype(np.uint64)
    return codes


def count_distinct(word: Word, m: int, base: int = 2, chunk: int = DEFAULT_CHUNK) -> int:
    """Number of distinct length-m factors."""
    bits = letters(word)
    n = bits.size
    if base == 2 and m <= BINCOUNT_LIMIT:
        seen = np.zeros(1 << m, dtype=bool)
        # chunks overlap by m - 1 letters so that every window is seen once
        for lo in range(0, n - m + 1, chunk):
            hi = min(n, lo + chunk + m - 1)
            seen[window_codes(bits[lo:hi], m).astype(np.int64)] = True
        return int(np.count_nonzero(seen))
    return int(np.unique(window_codes(bits, m, base)).size)


def entropy_estimate(count: int, m: int) -> object:
    """(log p(m)) / m."""
    return mp.log(count) / m


@dataclass
class ComplexityReport:
    m_values: List[int]
    pf: List[int]
    prefix_len: int
    bounds: Optional[List[int]] = None
    flags: Dict[str, bool] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def entropy(self) -> object:
        return entropy_estimate(self.pf[-1], self.m_values[-1])

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def rows(self) -> List[Dict[str, str]]:
        rows = []
        for index, (m, count) in enumerate(zip(self.m_values, self.pf)):
            bound = None if self.bounds is None else self.bounds[index]
            rows.append({
                "m": str(m),
                "count": str(count),
                "bound": "" if bound is None else str(bound),
                "margin": "" if bound is None else str(count - bound),
            })
        return rows

    def to_json(self) -> Dict[str, object]:
        return {
            "mValues": [str(m) for m in self.m_values],
            "pf": [str(p) for p in self.pf],
            "prefixLen": str(self.prefix_len),
            "entropyEstimate": nstr(self.entropy, 15),
            "bounds": None if self.bounds is None else [str(b) for b in self.bounds],
            "rows": self.rows(),
            "flags": dict(self.flags),
            "notes": list(self.notes),
            "passed": self.passed,
        }


def subword_complexity(word: Word, m_max: int, base: int = 2) -> ComplexityReport:
    bits = letters(word)
    n = bits.size
    if not 1 <= m_max <= n:
        raise ValueError(f"m_max must lie in 1..{n}")
    if m_max > MAX_WINDOW:
        raise ValueError(f"m_max above {MAX_WINDOW} is not supported")
    m_values = list(range(1, m_max + 1))
    pf = []
    for m in m_values:
        pf.append(count_distinct(bits, m, base))
        logger.debug("p(%d) = %d", m, pf[-1])
    within = all(p <= min(base ** m, n - m + 1) for m, p in zip(m_values, pf))
    report = ComplexityReport(m_values=m_values, pf=pf, prefix_len=n, flags={"countsWithinLimits": within})
    # complexity of an infinite word is nondecreasing; a prefix only shows it with room to spare
    checked = [m for m in m_values[:-1] if n >= 1 << (m + 2)]
    report.flags["nondecreasing"] = all(pf[m] >= pf[m - 1] for m in checked)
    unchecked = [m for m in m_values[:-1] if m not in checked]
    if unchecked:
        report.notes.append(f"monotonicity report-only for m in {unchecked[0]}..{unchecked[-1]}")
    return report


def moshe_bound(k: int, m: int) -> int:
    """ceil(2^(m / 2^(k-2)))."""
    if k < 2:
        raise ValueError("The lower bound is stated for k >= 2")
    root, exact = gmpy2.iroot(gmpy2.mpz(1) << m, 1 << (k - 2))
    return int(root) if exact else int(root) + 1


def moshe_check(k: int, m_max: int, prefix_len: int) -> ComplexityReport:
    """p_{t^k}(m) >= ceil(2^(m / 2^(k-2))) on the prefix t(1^k) ... t(prefix_len^k).

    For k = 2 the bound is 2^m, which is the statement that every block occurs.
    """
    word = tm_word(1, prefix_len, k)
    report = subword_complexity(word, m_max)
    report.bounds = [moshe_bound(k, m) for m in report.m_values]
    report.flags["lowerBound"] = all(p >= b for p, b in zip(report.pf, report.bounds))
    if k == 2:
        report.notes.append("for k = 2 the bound coincides with all 2^m blocks occurring")
    return report
