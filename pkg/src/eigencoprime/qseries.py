"""Exact integer q-expansions and the level-one eigenforms of one-dimensional weight."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

try:
    from gmpy2 import mpz as _big
except ImportError:  # pragma: no cover - gmpy2 is optional
    _big = int

LEVEL1_WEIGHTS = (12, 16, 18, 20, 22, 26)


@dataclass(frozen=True)
class QSeries:
    """Truncated power series sum_{n < prec} coeffs[n] q^n with integer coefficients."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int]):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in coeffs))
        if not self.coeffs:
            raise ValueError("a q-series needs at least one known coefficient")

    @property
    def prec(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int) -> int:
        if n < 0 or n >= self.prec:
            raise IndexError(f"coefficient of q^{n} unknown at precision {self.prec}")
        return self.coeffs[n]

    def __len__(self) -> int:
        return self.prec

    def truncate(self, prec: int) -> QSeries:
        if prec > self.prec:
            raise ValueError(f"cannot raise precision from {self.prec} to {prec}")
        return QSeries(self.coeffs[:prec])

    def __add__(self, other: QSeries) -> QSeries:
        p = min(self.prec, other.prec)
        return QSeries(a + b for a, b in zip(self.coeffs[:p], other.coeffs[:p]))

    def __sub__(self, other: QSeries) -> QSeries:
        p = min(self.prec, other.prec)
        return QSeries(a - b for a, b in zip(self.coeffs[:p], other.coeffs[:p]))

    def __neg__(self) -> QSeries:
        return QSeries(-a for a in self.coeffs)

    def scale(self, c: int) -> QSeries:
        return QSeries(c * a for a in self.coeffs)

    def exact_div(self, d: int) -> QSeries:
        """Divide every coefficient by ``d``; a nonzero remainder is an error."""
        out = []
        for n, a in enumerate(self.coeffs):
            q, r = divmod(a, d)
            if r:
                raise ArithmeticError(f"coefficient of q^{n} ({a}) is not divisible by {d}")
            out.append(q)
        return QSeries(out)

    def __mul__(self, other: QSeries) -> QSeries:
        return mul(self, other)

    def __pow__(self, e: int) -> QSeries:
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = one(self.prec)
        base = self
        while e:
            if e & 1:
                result = mul(result, base)
            e >>= 1
            if e:
                base = mul(base, base)
        return result


def one(prec: int) -> QSeries:
    return QSeries([1] + [0] * (prec - 1))


def _pack(coeffs: Sequence[int], nbytes: int) -> int:
    pos = b"".join((c if c > 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    neg = b"".join((-c if c < 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _unpack(z: int, count: int, nbytes: int) -> list[int]:
    # bias every digit by 2^(8*nbytes-1) so signed digits decode without borrows
    half = 1 << (8 * nbytes - 1)
    bias = int.from_bytes((b"\x00" * (nbytes - 1) + b"\x80") * count, "little")
    w = (z + bias) & ((1 << (8 * nbytes * count)) - 1)
    raw = w.to_bytes(nbytes * count, "little")
    return [int.from_bytes(raw[i:i + nbytes], "little") - half
            for i in range(0, nbytes * count, nbytes)]


def mul(a: QSeries, b: QSeries) -> QSeries:
    """Truncated Cauchy product at precision min(a.prec, b.prec).

    Uses Kronecker substitution: both series are packed into one big integer
    each, multiplied once, and the product digits are read back.
    """
    p = min(a.prec, b.prec)
    x, y = a.coeffs[:p], b.coeffs[:p]
    amax = max(abs(c) for c in x)
    bmax = max(abs(c) for c in y)
    if amax == 0 or bmax == 0:
        return QSeries([0] * p)
    bits = amax.bit_length() + bmax.bit_length() + p.bit_length() + 1
    nbytes = bits // 8 + 1
    z = int(_big(_pack(x, nbytes)) * _big(_pack(y, nbytes)))
    return QSeries(_unpack(z, p, nbytes))


def mul_naive(a: QSeries, b: QSeries) -> QSeries:
    """Schoolbook O(P^2) product; kept as a reference for :func:`mul`."""
    p = min(a.prec, b.prec)
    out = [0] * p
    for i, ai in enumerate(a.coeffs[:p]):
        if ai:
            for j in range(p - i):
                out[i + j] += ai * b.coeffs[j]
    return QSeries(out)


def sigma_power_sum(n: int, r: int) -> int:
    """sigma_r(n) = sum of d^r over the divisors d of n."""
    if n < 1:
        raise ValueError("sigma_r(n) needs n >= 1")
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d ** r
            e = n // d
            if e != d:
                total += e ** r
        d += 1
    return total


def sigma_table(r: int, prec: int) -> list[int]:
    """[0, sigma_r(1), ..., sigma_r(prec - 1)] by a divisor sieve."""
    table = [0] * prec
    for d in range(1, prec):
        dr = d ** r
        for m in range(d, prec, d):
            table[m] += dr
    return table


_EISENSTEIN = {"E4": (3, 240), "E6": (5, -504)}


def eisenstein(kind: str, prec: int) -> QSeries:
    """Normalized E4 = 1 + 240 sum sigma_3(n) q^n or E6 = 1 - 504 sum sigma_5(n) q^n."""
    if kind not in _EISENSTEIN:
        raise ValueError(f"unknown Eisenstein series {kind!r}; expected E4 or E6")
    if prec < 1:
        raise ValueError("precision must be positive")
    r, c = _EISENSTEIN[kind]
    coeffs = [c * s for s in sigma_table(r, prec)]
    coeffs[0] = 1
    return QSeries(coeffs)


def delta(prec: int) -> QSeries:
    """Ramanujan's Delta as (E4^3 - E6^2) / 1728, with exact division enforced."""
    e4 = eisenstein("E4", prec)
    e6 = eisenstein("E6", prec)
    return (e4 ** 3 - e6 ** 2).exact_div(1728)


def _cofactor(weight: int, prec: int) -> QSeries:
    e4 = eisenstein("E4", prec)
    e6 = eisenstein("E6", prec)
    return {
        12: one(prec),
        16: e4,
        18: e6,
        20: e4 * e4,
        22: e4 * e6,
        26: e4 * e4 * e6,
    }[weight]


@dataclass(frozen=True)
class Level1Form:
    weight: int
    series: QSeries

    def __post_init__(self):
        if self.series.prec > 1 and (self.series[0] != 0 or self.series[1] != 1):
            raise ValueError("level-one eigenform must start 0 + q + ...")

    def coefficient(self, n: int) -> int:
        return self.series[n]


def level1_eigenform(weight: int, prec: int) -> Level1Form:
    """The normalized cusp form Delta * E_{k-12} spanning S_k(SL2(Z)).

    Only weights where the cusp space is one-dimensional are supported,
    so the product is automatically a Hecke eigenform.
    """
    if weight not in LEVEL1_WEIGHTS:
        raise ValueError(f"weight {weight} unsupported: need dim S_k(1) = 1, i.e. k in {LEVEL1_WEIGHTS}")
    if prec < 2:
        raise ValueError("precision must be at least 2")
    return Level1Form(weight, delta(prec) * _cofactor(weight, prec))
