"""Eigenform coefficient tables: file format, validation and Hecke assembly.

A table stores a(p) for every prime p up to its bound (``kind=ap``) or a(n)
for every n up to its bound (``kind=an``). Values at composite n are derived
multiplicatively from the prime values through the Hecke recursion.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .errors import DataError, FormatError, InsufficientDataError, ValidationError
from .primes import factorize, is_prime, sieve_primes, spf_sieve

SOURCES = ("local", "remote", "generated")


@dataclass(frozen=True)
class FormDescriptor:
    label: str
    level: int
    weight: int
    source: str = "local"

    def __post_init__(self):
        if self.level < 1:
            raise ValueError(f"level must be >= 1, got {self.level}")
        if self.weight < 2 or self.weight % 2:
            raise ValueError(f"weight must be even and >= 2, got {self.weight}")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")


@dataclass(frozen=True)
class PrimeCoefficientTable:
    descriptor: FormDescriptor
    bound: int
    entries: dict[int, int] = field(repr=False)

    kind = "ap"

    def __post_init__(self):
        expected = sieve_primes(self.bound)
        if len(expected) != len(self.entries) or any(p not in self.entries for p in expected):
            missing = [p for p in expected if p not in self.entries][:5]
            raise FormatError(f"{self.descriptor.label}: prime coverage has gaps (e.g. {missing}) "
                              f"or stray indices up to bound {self.bound}")

    @property
    def level(self) -> int:
        return self.descriptor.level

    @property
    def weight(self) -> int:
        return self.descriptor.weight

    def ap(self, p: int) -> int:
        try:
            return self.entries[p]
        except KeyError:
            raise InsufficientDataError(
                f"{self.descriptor.label}: a({p}) not available (table bound {self.bound})") from None

    def primes(self) -> list[int]:
        return sorted(self.entries)

    def restrict(self, bound: int) -> PrimeCoefficientTable:
        if bound > self.bound:
            raise InsufficientDataError(f"{self.descriptor.label}: need bound {bound}, have {self.bound}")
        return PrimeCoefficientTable(self.descriptor, bound,
                                     {p: a for p, a in self.entries.items() if p <= bound})


@dataclass(frozen=True)
class FullCoefficientTable:
    descriptor: FormDescriptor
    bound: int
    entries: dict[int, int] = field(repr=False)

    kind = "an"

    def __post_init__(self):
        if sorted(self.entries) != list(range(1, self.bound + 1)):
            raise FormatError(f"{self.descriptor.label}: integer coverage 1..{self.bound} has gaps")
        if self.entries[1] != 1:
            raise ValidationError(f"{self.descriptor.label}: a(1) = {self.entries[1]}, expected 1")

    @property
    def level(self) -> int:
        return self.descriptor.level

    @property
    def weight(self) -> int:
        return self.descriptor.weight

    def ap(self, p: int) -> int:
        if p > self.bound:
            raise InsufficientDataError(f"{self.descriptor.label}: a({p}) beyond bound {self.bound}")
        return self.entries[p]

    def to_prime_table(self) -> PrimeCoefficientTable:
        return PrimeCoefficientTable(self.descriptor, self.bound,
                                     {p: self.entries[p] for p in sieve_primes(self.bound)})


# --------------------------------------------------------------------------- file format

_HEADER_KEYS = ("label", "level", "weight", "kind", "bound")
_RECORD = re.compile(r"^\s*(\d+)\s+([-−]?\d+)\s*$")


def _deligne_ok(a: int, p: int, k: int) -> bool:
    # |a| <= 2 p^((k-1)/2)  <=>  a^2 <= 4 p^(k-1)
    return a * a <= 4 * p ** (k - 1)


def parse_coefficient_file(content: bytes | str, source: str = "local"):
    """Parse and validate a coefficient file; returns the table kind the header names."""
    text = content.decode("utf-8") if isinstance(content, (bytes, bytearray)) else content
    header: dict[str, str] = {}
    records: list[tuple[int, int]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if line.lstrip().startswith("#"):
            if records:
                raise FormatError(f"line {lineno}: header line after data records")
            for token in line.lstrip()[1:].split():
                if "=" not in token:
                    raise FormatError(f"line {lineno}: header token {token!r} is not key=value")
                key, value = token.split("=", 1)
                header[key.strip()] = value.strip()
            continue
        m = _RECORD.match(line)
        if not m:
            raise FormatError(f"line {lineno}: malformed record {line!r}")
        idx = int(m.group(1))
        val = int(m.group(2).replace("−", "-"))
        if records and idx <= records[-1][0]:
            raise FormatError(f"line {lineno}: index {idx} does not increase")
        records.append((idx, val))

    missing = [k for k in _HEADER_KEYS if k not in header]
    if missing:
        raise FormatError(f"header is missing required keys {missing}")
    try:
        level, weight, bound = int(header["level"]), int(header["weight"]), int(header["bound"])
    except ValueError as exc:
        raise FormatError(f"non-integer header value: {exc}") from None
    kind = header["kind"]
    if kind not in ("ap", "an"):
        raise FormatError(f"kind must be ap or an, got {kind!r}")
    try:
        desc = FormDescriptor(header["label"], level, weight, source)
    except ValueError as exc:
        raise FormatError(str(exc)) from None

    entries = dict(records)
    if any(i > bound for i in entries):
        raise FormatError(f"record index beyond declared bound {bound}")
    if kind == "ap":
        if any(not is_prime(i) for i in entries):
            raise FormatError("kind=ap file contains a non-prime index")
        table = PrimeCoefficientTable(desc, bound, entries)
        primes = table.primes()
    else:
        if entries.get(1) != 1:
            raise ValidationError("kind=an file must start with the normalization record '1 1'")
        table = FullCoefficientTable(desc, bound, entries)
        primes = sieve_primes(bound)
    for p in primes:
        if level % p and not _deligne_ok(entries[p], p, weight):
            raise ValidationError(f"a({p}) = {entries[p]} violates the Deligne bound for weight {weight}")
    return table


def serialize_table(table) -> str:
    d = table.descriptor
    lines = [f"# label={d.label}", f"# level={d.level}", f"# weight={d.weight}",
             f"# kind={table.kind}", f"# bound={table.bound}"]
    lines.extend(f"{n} {a}" for n, a in sorted(table.entries.items()))
    return "\n".join(lines) + "\n"


def load_table(path) -> PrimeCoefficientTable | FullCoefficientTable:
    with open(path, "rb") as fh:
        return parse_coefficient_file(fh.read())


# --------------------------------------------------------------------------- Hecke

def hecke_prime_power(a_p: int, p: int, alpha: int, k: int, N: int) -> int:
    """a(p^alpha) from a(p).

    Good primes use a(p^{j+1}) = a(p) a(p^j) - p^{k-1} a(p^{j-1}); for p | N the
    newform relation a(p^alpha) = a(p)^alpha is assumed.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 0:
        return 1
    if N % p == 0:
        return a_p ** alpha
    pk = p ** (k - 1)
    prev, cur = 1, a_p
    for _ in range(alpha - 1):
        prev, cur = cur, a_p * cur - pk * prev
    return cur


def coefficient_at(table, n: int, spf: np.ndarray | None = None) -> int:
    """a(n) assembled multiplicatively from the prime values of ``table``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    result = 1
    for p, e in factorize(n, spf):
        if p > table.bound:
            raise InsufficientDataError(
                f"{table.descriptor.label}: a({n}) needs a({p}) beyond bound {table.bound}")
        result *= hecke_prime_power(table.ap(p), p, e, table.weight, table.level)
    return result


def coefficients_upto(table, x: int) -> list[int]:
    """[0, a(1), ..., a(x)] in one multiplicative pass over a smallest-prime-factor table."""
    if x > table.bound:
        raise InsufficientDataError(f"{table.descriptor.label}: need a(p) up to {x}, bound is {table.bound}")
    out = [0] * (x + 1)
    if x >= 1:
        out[1] = 1
    spf = spf_sieve(max(x, 1)).tolist()
    k, N = table.weight, table.level
    for n in range(2, x + 1):
        p = spf[n]
        m, e = n, 0
        while m % p == 0:
            m //= p
            e += 1
        if m == 1:
            if e == 1:
                out[n] = table.ap(p)
            else:
                out[n] = hecke_prime_power(table.ap(p), p, e, k, N)
        else:
            out[n] = out[n // m] * out[m]
    return out


# --------------------------------------------------------------------------- validation

@dataclass
class ValidationReport:
    label: str
    failures: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def lines(self) -> list[str]:
        status = "PASS" if self.ok else "FAIL"
        out = [f"{self.label}: {status} ({self.checked} checks, "
               f"{len(self.failures)} failures, {len(self.warnings)} warnings)"]
        out += [f"  FAIL {m}" for m in self.failures]
        out += [f"  WARN {m}" for m in self.warnings]
        return out


def validate(table) -> ValidationReport:
    d = table.descriptor
    rep = ValidationReport(d.label)
    k, N = d.weight, d.level
    primes = table.primes() if isinstance(table, PrimeCoefficientTable) else sieve_primes(table.bound)
    for p in primes:
        a = table.ap(p)
        rep.checked += 1
        if N % p:
            if not _deligne_ok(a, p, k):
                rep.failures.append(f"a({p}) = {a} exceeds 2*{p}^({k}-1)/2")
        elif N % (p * p):
            expect = p ** ((k - 2) // 2)
            if abs(a) != expect:
                rep.warnings.append(f"|a({p})| = {abs(a)} at p || N, expected {expect}")
    if isinstance(table, FullCoefficientTable):
        B = table.bound
        for p in primes:
            pe, e = p * p, 2
            while pe <= B:
                rep.checked += 1
                derived = hecke_prime_power(table.ap(p), p, e, k, N)
                if table.entries[pe] != derived:
                    rep.failures.append(f"a({p}^{e}) = {table.entries[pe]}, recursion gives {derived}")
                pe *= p
                e += 1
        for m in range(2, B + 1):
            f = factorize(m)
            if len(f) < 2:
                continue
            q = f[0][0] ** f[0][1]
            rep.checked += 1
            if table.entries[m] != table.entries[q] * table.entries[m // q]:
                rep.failures.append(f"a({m}) != a({q}) a({m // q})")
    return rep


def require_valid(table) -> None:
    rep = validate(table)
    if not rep.ok:
        raise ValidationError("; ".join(rep.failures[:5]))


def table_from_coefficients(descriptor: FormDescriptor, coeffs, bound: int, kind: str = "ap"):
    """Build a table from a dense sequence coeffs[n] = a(n) (index 0 ignored)."""
    if len(coeffs) <= bound:
        raise InsufficientDataError(f"{descriptor.label}: {len(coeffs) - 1} coefficients, need {bound}")
    if kind == "ap":
        return PrimeCoefficientTable(descriptor, bound, {p: int(coeffs[p]) for p in sieve_primes(bound)})
    return FullCoefficientTable(descriptor, bound, {n: int(coeffs[n]) for n in range(1, bound + 1)})


def pair_level(t1, t2) -> int:
    return t1.level * t2.level // gcd(t1.level, t2.level)
