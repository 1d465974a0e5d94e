"""Thue-Morse values on arbitrary-precision integers, along powers and in batches."""
from dataclasses import dataclass
from typing import Iterable, List

import gmpy2
import numpy as np

from thue_morse.kernels import LIMB_BASE, parity_of_powers

DEFAULT_CHUNK = 1 << 20


@dataclass
class BinaryWord:
    """Finite 0/1 word; ``offset`` is the sequence index of the first letter."""

    bits: np.ndarray
    offset: int = 1

    def __post_init__(self) -> None:
        self.bits = np.asarray(self.bits, dtype=np.uint8)
        if self.bits.ndim != 1:
            raise ValueError("BinaryWord bits must be one-dimensional")
        if self.bits.size and int(self.bits.max()) > 1:
            raise ValueError("BinaryWord letters must be 0 or 1")

    @classmethod
    def from_bits(cls, bits: Iterable[int], offset: int = 1) -> "BinaryWord":
        return cls(bits=np.fromiter((int(b) for b in bits), dtype=np.uint8), offset=offset)

    @classmethod
    def from_string(cls, text: str, offset: int = 1) -> "BinaryWord":
        if any(ch not in "01" for ch in text):
            raise ValueError(f"Not a binary word: {text!r}")
        return cls.from_bits((int(ch) for ch in text), offset=offset)

    def __len__(self) -> int:
        return int(self.bits.size)

    def __getitem__(self, index: int) -> int:
        return int(self.bits[index])

    def to_list(self) -> List[int]:
        return [int(b) for b in self.bits]

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)


def s2(n: int) -> int:
    """Number of one-bits of ``n``."""
    if n < 0:
        raise ValueError("s2 is defined for nonnegative integers only")
    return int(gmpy2.popcount(gmpy2.mpz(n)))


def tm(n: int) -> int:
    if n < 1:
        raise ValueError("Thue-Morse positions start at n = 1")
    return s2(n) & 1


def tm_pow(n: int, k: int) -> int:
    """t(n**k) with exact big-integer exponentiation."""
    if k < 1:
        raise ValueError("Exponent k must be at least 1")
    if n < 1:
        raise ValueError("Thue-Morse positions start at n = 1")
    return int(gmpy2.popcount(gmpy2.mpz(n) ** k)) & 1


def tm_word(start: int, length: int, k: int, chunk: int = DEFAULT_CHUNK) -> BinaryWord:
    """The word t(start**k) ... t((start + length - 1)**k).

    Arguments below 2**32 go through the vectorized limb kernel chunk by chunk,
    larger ones through gmpy2 one at a time.
    """
    if start < 1:
        raise ValueError("Thue-Morse positions start at n = 1")
    if length < 0:
        raise ValueError("Word length must be nonnegative")
    if k < 1:
        raise ValueError("Exponent k must be at least 1")
    bits = np.empty(length, dtype=np.uint8)
    if start + length - 1 < LIMB_BASE:
        for lo in range(0, length, chunk):
            hi = min(length, lo + chunk)
            ns = np.arange(start + lo, start + hi, dtype=np.uint64)
            bits[lo:hi] = parity_of_powers(ns, k)
    else:
        for i in range(length):
            bits[i] = tm_pow(start + i, k)
    return BinaryWord(bits=bits, offset=start)
