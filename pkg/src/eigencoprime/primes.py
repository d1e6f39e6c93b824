"""Sieves shared by the coefficient and statistics code."""

from __future__ import annotations

from functools import lru_cache
from math import isqrt

import numpy as np

# 10^8 entries of int32 spf data is already ~400 MB
MAX_SIEVE = 10 ** 8


def _check(x: int) -> None:
    if x > MAX_SIEVE:
        raise MemoryError(f"sieve bound {x} exceeds the cap {MAX_SIEVE}")


def prime_mask(x: int) -> np.ndarray:
    _check(x)
    mask = np.ones(max(x + 1, 2), dtype=bool)
    mask[:2] = False
    for p in range(2, isqrt(x) + 1):
        if mask[p]:
            mask[p * p::p] = False
    return mask[: x + 1]


def sieve_primes(x: int) -> list[int]:
    """All primes <= x in increasing order."""
    if x < 2:
        return []
    return np.flatnonzero(prime_mask(x)).tolist()


def segmented_primes(x: int, segment: int = 1 << 15) -> list[int]:
    """Same output as :func:`sieve_primes`, computed one window at a time."""
    if x < 2:
        return []
    base = sieve_primes(isqrt(x))
    out = []
    for lo in range(2, x + 1, segment):
        hi = min(lo + segment, x + 1)
        mask = np.ones(hi - lo, dtype=bool)
        for p in base:
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            mask[start - lo::p] = False
        out.extend((np.flatnonzero(mask) + lo).tolist())
    return out


def prime_pi(x: int) -> int:
    return int(prime_mask(x).sum()) if x >= 2 else 0


def totient_sieve(x: int) -> np.ndarray:
    """phi[n] for 0 <= n <= x (phi[0] = 0)."""
    _check(x)
    phi = np.arange(x + 1, dtype=np.int64)
    for p in sieve_primes(x):
        phi[p::p] -= phi[p::p] // p
    return phi


@lru_cache(maxsize=4)
def spf_sieve(x: int) -> np.ndarray:
    """Smallest prime factor of every n <= x (spf[0] = 0, spf[1] = 1)."""
    _check(x)
    spf = np.zeros(x + 1, dtype=np.int64)
    if x >= 1:
        spf[1] = 1
    for p in range(2, x + 1):
        if p * p > x:
            break
        if spf[p] == 0:
            block = spf[p * p::p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest[rest >= 2]] = rest[rest >= 2]
    return spf


def factorize(n: int, spf: np.ndarray | None = None) -> list[tuple[int, int]]:
    """Prime factorization [(p, e), ...] with p increasing.

    Uses the smallest-prime-factor table when n is inside it, trial division
    otherwise.
    """
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out: list[tuple[int, int]] = []
    if spf is not None and n < len(spf):
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def distinct_prime_factors(n: int, spf: np.ndarray | None = None) -> list[int]:
    return [p for p, _ in factorize(abs(n), spf)] if n else []
