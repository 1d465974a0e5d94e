import random

import numpy as np
import pytest

from thue_morse.kernels import parity_of_powers
from thue_morse.sequence import BinaryWord, s2, tm, tm_pow, tm_word


def _naive_s2(n):
    count = 0
    while n:
        count += n % 2
        n //= 2
    return count


def test_s2_examples():
    assert s2(0) == 0
    assert s2(7) == 3
    assert s2(207) == 6 == _naive_s2(207)


def test_s2_is_additive_on_disjoint_bits():
    rng = random.Random(7)
    for _ in range(50):
        a, b = rng.getrandbits(256), rng.getrandbits(256)
        assert s2((a << 256) + b) == s2(a) + s2(b)


def test_tm_examples_and_rejects_zero():
    assert tm(1) == 1
    assert tm(3) == 0
    assert tm(9) == 0
    with pytest.raises(ValueError):
        tm(0)


def test_tm_recurrence():
    for n in range(1, 5000):
        assert tm(2 * n) == tm(n)
        assert tm(2 * n + 1) == 1 - tm(n)


def test_tm_pow_matches_definition():
    assert tm_pow(3, 2) == 0
    assert tm_pow(5, 2) == 1
    for n in range(1, 300):
        assert tm_pow(n, 1) == tm(n)
        for k in range(2, 7):
            assert tm_pow(n, k) == _naive_s2(n ** k) % 2
    with pytest.raises(ValueError):
        tm_pow(3, 0)


def test_tm_word_examples():
    assert tm_word(1, 5, 1).to_list() == [1, 1, 0, 1, 0]
    assert tm_word(1, 5, 2).to_list() == [1, 1, 0, 1, 1]
    empty = tm_word(7, 0, 3)
    assert len(empty) == 0
    assert empty.offset == 7


@pytest.mark.parametrize("start,k", [(1, 2), (1000, 3), (65521, 4), ((1 << 32) - 3, 2)])
def test_tm_word_agrees_with_scalar(start, k):
    word = tm_word(start, 40, k, chunk=16)
    assert word.offset == start
    assert word.to_list() == [tm_pow(start + i, k) for i in range(40)]


def test_parity_kernel_matches_gmpy2():
    ns = np.arange(1, 2000, dtype=np.uint64) * np.uint64(2654435761) % np.uint64(1 << 32)
    ns[ns == 0] = 1
    for k in (1, 2, 3, 5):
        expected = [s2(int(n) ** k) & 1 for n in ns]
        assert parity_of_powers(ns, k).tolist() == expected


def test_binary_word_validation():
    assert BinaryWord.from_string("0110").to_string() == "0110"
    with pytest.raises(ValueError):
        BinaryWord.from_string("012")
