"""Counts for the maximal mod-m image of a pair of eigenforms.

Closed forms at a prime modulus, plus an exhaustive census of GL2(Z/m) by
(trace, determinant) that recomputes every count from scratch for any m.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np

from .primes import factorize, is_prime

ENUMERATION_CAP = 100


@dataclass(frozen=True)
class WeightPair:
    k1: int
    k2: int

    def __post_init__(self):
        for k in (self.k1, self.k2):
            if k < 2 or k % 2:
                raise ValueError(f"weights must be even and >= 2, got {k}")


def _weights(w) -> WeightPair:
    return w if isinstance(w, WeightPair) else WeightPair(*w)


@dataclass(frozen=True)
class ImageCounts:
    m: int
    k1: int
    k2: int
    d: int
    lambda_size: int
    A: int
    C: int
    source: str
    flags: tuple[str, ...] = field(default=())

    @property
    def delta(self) -> Fraction:
        return Fraction(self.C, self.A)

    def as_dict(self) -> dict:
        dl = self.delta
        return {"m": self.m, "k1": self.k1, "k2": self.k2, "d": self.d, "lambda": self.lambda_size,
                "A": self.A, "C": self.C, "delta_num": dl.numerator, "delta_den": dl.denominator,
                "source": self.source, "flags": list(self.flags)}


def _check_prime(ell: int) -> None:
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")


def d_of(ell: int, w) -> int:
    _check_prime(ell)
    w = _weights(w)
    return gcd(ell - 1, w.k1 - 1, w.k2 - 1)


def lambda_size(ell: int, w) -> int:
    return (ell - 1) // d_of(ell, w)


def lambda_set(m: int, w) -> set[tuple[int, int]]:
    """{(v^(k1-1), v^(k2-1)) mod m : v a unit mod m}, by enumeration."""
    w = _weights(w)
    if m == 1:
        return {(0, 0)}
    return {(pow(v, w.k1 - 1, m), pow(v, w.k2 - 1, m)) for v in range(1, m) if gcd(v, m) == 1}


def _model_flags(ell: int) -> tuple[str, ...]:
    flags = ["unverified-for-specific-forms"]
    if ell == 2:
        flags.insert(0, "special-prime-2")
    return tuple(flags)


def maximal_image_counts(ell: int, w) -> ImageCounts:
    """|A_l| = (l-1)^3 (l^2+l)^2 / d and |C_l| = l^2 (l-1)(l^2+1) / d."""
    w = _weights(w)
    d = d_of(ell, w)
    A = (ell - 1) ** 3 * (ell * ell + ell) ** 2 // d
    C = ell * ell * (ell - 1) * (ell * ell + 1) // d
    return ImageCounts(ell, w.k1, w.k2, d, (ell - 1) // d, A, C, "formula", _model_flags(ell))


def delta_exact(ell: int) -> Fraction:
    """Model density (l^2 + 1) / (l^2 - 1)^2; the weights cancel."""
    _check_prime(ell)
    return Fraction(ell * ell + 1, (ell * ell - 1) ** 2)


def legendre(a: int, ell: int) -> int:
    a %= ell
    if a == 0:
        return 0
    return 1 if pow(a, (ell - 1) // 2, ell) == 1 else -1


def trace_det_class_count(ell: int, t: int) -> int:
    """#{A in GL2(F_l) : det A = t, tr A = 0}: l^2 + l if -t is a square, else l^2 - l."""
    _check_prime(ell)
    if ell == 2:
        raise ValueError("the residue dichotomy needs an odd prime")
    if t % ell == 0:
        raise ValueError(f"{t} is not a unit mod {ell}")
    return ell * ell + ell if legendre(-t, ell) == 1 else ell * ell - ell


@dataclass(frozen=True)
class TraceDetHistogram:
    """counts[t, u] = #{A in M2(Z/m) : tr A = t, det A = u}; only unit columns u are GL2."""

    m: int
    counts: np.ndarray = field(repr=False)

    def units(self) -> list[int]:
        return [u for u in range(self.m) if gcd(u, self.m) == 1]

    def N(self, t: int, u: int) -> int:
        return int(self.counts[t % self.m, u % self.m])

    def det_count(self, u: int) -> int:
        return int(self.counts[:, u % self.m].sum())

    def total(self) -> int:
        return int(self.counts[:, self.units()].sum())


def gl2_order(m: int) -> int:
    out = m ** 4
    for p, _ in factorize(m):
        out = out * (p - 1) * (p * p - 1) // p ** 3
    return out


def sl2_order(m: int) -> int:
    out = m ** 3
    for p, _ in factorize(m):
        out = out * (p * p - 1) // (p * p)
    return out


def _ad_block(m: int, a_values: range) -> np.ndarray:
    # W[t, s] = #{(a, d) : a in block, a + d = t, a d = s}
    W = np.zeros((m, m), dtype=np.int64)
    d = np.arange(m)
    for a in a_values:
        np.add.at(W, ((a + d) % m, (a * d) % m), 1)
    return W


def trace_det_histogram(m: int, cap: int = ENUMERATION_CAP, workers: int = 1) -> TraceDetHistogram:
    """Census of all m^4 matrices (a b; c d) over Z/m by trace and determinant.

    The sum is grouped: (a, d) fix the trace and the product ad, (b, c) fix bc,
    and det = ad - bc. Blocks of the first-row entry a can be spread over
    workers; partial tables are added in block order.
    """
    if m < 2:
        raise ValueError("modulus must be >= 2")
    if m > cap:
        raise ValueError(f"modulus {m} exceeds the enumeration cap {cap}")
    return _histogram(m, max(1, workers))


@lru_cache(maxsize=256)
def _histogram(m: int, workers: int) -> TraceDetHistogram:
    r = np.arange(m)
    bc = np.bincount((np.outer(r, r) % m).ravel(), minlength=m).astype(np.int64)
    blocks = [range(i, m, workers) for i in range(workers)]
    if workers == 1:
        parts = [_ad_block(m, blocks[0])]
    else:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda b: _ad_block(m, b), blocks))
    W = sum(parts[1:], parts[0])
    # det = s - v where v = bc, so counts[t, u] = sum_s W[t, s] * bc[(s - u) % m]
    circ = bc[(r[:, None] - r[None, :]) % m]
    counts = W @ circ
    counts.setflags(write=False)
    return TraceDetHistogram(m, counts)


def pair_counts_enumerated(m: int, w, cap: int = ENUMERATION_CAP, workers: int = 1) -> ImageCounts:
    """|A_m| and |C_m| for the maximal model at any modulus, from the census."""
    w = _weights(w)
    hist = trace_det_histogram(m, cap, workers)
    lam = lambda_set(m, w)
    ndet = {u: hist.det_count(u) for u in hist.units()}
    A = sum(ndet[t1] * ndet[t2] for t1, t2 in lam)
    C = sum(hist.N(0, t1) * hist.N(0, t2) for t1, t2 in lam)
    if is_prime(m):
        d, flags = gcd(m - 1, w.k1 - 1, w.k2 - 1), _model_flags(m)
    else:
        d, flags = 1, ("composite-d-convention",)
    return ImageCounts(m, w.k1, w.k2, d, len(lam), A, C, "enumeration", flags)


def coprime_splits(m: int) -> list[tuple[int, int]]:
    """All (m1, m2) with m1 * m2 = m, gcd = 1, 1 < m1 < m2."""
    fac = [p ** e for p, e in factorize(m)]
    out = []
    for mask in range(1, 2 ** len(fac) - 1):
        m1 = 1
        for i, q in enumerate(fac):
            if mask >> i & 1:
                m1 *= q
        m2 = m // m1
        if m1 < m2:
            out.append((m1, m2))
    return out
