"""Vectorized Thue-Morse parity kernels over 32-bit limbs held in uint64 arrays."""
import numpy as np

LIMB_BITS = np.uint64(32)
LIMB_MASK = np.uint64(0xFFFFFFFF)
LIMB_BASE = 1 << 32


def fold_parity(arr: np.ndarray) -> np.ndarray:
    """Parity of the one-bits of every uint64 entry by XOR folding."""
    arr = arr.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        arr ^= arr >> np.uint64(shift)
    return (arr & np.uint64(1)).astype(np.uint8)


def power_limbs(ns: np.ndarray, k: int) -> np.ndarray:
    """Little-endian 32-bit limbs of ns**k, one row per limb.

    ``ns`` must hold values below 2**32 so that every limb product plus carry
    stays inside uint64.
    """
    ns = np.asarray(ns, dtype=np.uint64)
    if ns.size and int(ns.max()) >= LIMB_BASE:
        raise ValueError("power_limbs requires arguments below 2**32")
    limbs = np.zeros((k, ns.size), dtype=np.uint64)
    limbs[0] = 1
    for step in range(k):
        carry = np.zeros(ns.size, dtype=np.uint64)
        for i in range(min(step + 1, k)):
            product = limbs[i] * ns + carry
            limbs[i] = product & LIMB_MASK
            carry = product >> LIMB_BITS
        if step + 1 < k:
            limbs[step + 1] = carry
    return limbs


def parity_of_powers(ns: np.ndarray, k: int) -> np.ndarray:
    """t(n**k) for every n of a uint64 array with entries in [1, 2**32)."""
    if k < 1:
        raise ValueError("Exponent k must be positive")
    ns = np.asarray(ns, dtype=np.uint64)
    if k == 1 or (ns.size and int(ns.max()) < (1 << (64 // k))):
        return fold_parity(ns ** np.uint64(k))
    limbs = power_limbs(ns, k)
    acc = np.bitwise_xor.reduce(limbs, axis=0)
    return fold_parity(acc)
