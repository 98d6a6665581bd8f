"""Independent brute-force oracles used to pin expected values.

Everything here recomputes quantities from their definitions (per-base
censuses, definitional Carmichael test), deliberately avoiding the closed
formulas and sieves used by the library.
"""

from __future__ import annotations

import math

import numpy as np


def vec_pow_mod(bases: np.ndarray, e: int, m: int) -> np.ndarray:
    r = np.ones_like(bases)
    b = bases % m
    while e:
        if e & 1:
            r = r * b % m
        b = b * b % m
        e >>= 1
    return r


def phi_census(k: int) -> int:
    """Count 1 <= a <= k with gcd(a, k) = 1."""
    return int(np.count_nonzero(np.gcd(np.arange(1, k + 1), k) == 1))


def fermat_liar_census(k: int) -> int:
    """Count 1 <= a < k with a^(k-1) = 1 mod k (coprimality is implied)."""
    a = np.arange(1, k, dtype=np.int64)
    return int(np.count_nonzero(vec_pow_mod(a, k - 1, k) == 1))


def strong_liar_census(k: int) -> int:
    """Count strong non-witnesses among 1 <= a < k for odd k."""
    assert k % 2 == 1 and k >= 3
    n, s = k - 1, 0
    while n % 2 == 0:
        n //= 2
        s += 1
    a = np.arange(1, k, dtype=np.int64)
    x = vec_pow_mod(a, n, k)
    liar = (x == 1) | (x == k - 1)
    for _ in range(s - 1):
        x = x * x % k
        liar |= x == k - 1
    return int(liar.sum())


def is_prime_naive(k: int) -> bool:
    if k < 2:
        return False
    return all(k % d for d in range(2, math.isqrt(k) + 1))


def carmichael_definitional(k: int) -> bool:
    """Composite k with a^(k-1) = 1 mod k for every coprime 1 < a < k."""
    if k < 4 or is_prime_naive(k):
        return False
    return all(
        pow(a, k - 1, k) == 1 for a in range(2, k) if math.gcd(a, k) == 1
    )


def strong_witness_scalar(k: int, a: int) -> bool:
    """Textbook strong-witness check via the standard decomposition."""
    n, s = k - 1, 0
    while n % 2 == 0:
        n //= 2
        s += 1
    x = pow(a, n, k)
    if x == 1 or x == k - 1:
        return False
    for _ in range(s - 1):
        x = x * x % k
        if x == k - 1:
            return False
    return True
