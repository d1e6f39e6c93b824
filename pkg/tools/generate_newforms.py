#!/usr/bin/env python3
"""Generate the vendored a(p) tables for the three rational newforms of prime level.

The forms are located as the unique T_2-eigenvector with the given integer
eigenvalue inside M_k(Gamma0(N)), spanned by products of Eisenstein series
(trivial and quadratic character) and, for N = 11, eta(z)^2 eta(11z)^2.
The eigenvector is then expanded to the requested bound with exact integer
arithmetic, and the full expansion is checked for Hecke multiplicativity
before the prime-indexed coefficients are written.

    python3 tools/generate_newforms.py --bound 100000 --outdir src/eigencoprime/data
"""

from __future__ import annotations

import argparse
import itertools
import sys
from fractions import Fraction
from math import gcd, lcm
from pathlib import Path

import sympy

from eigencoprime.coeffs import FormDescriptor, PrimeCoefficientTable, serialize_table
from eigencoprime.primes import sieve_primes
from eigencoprime.qseries import QSeries, one

# label, level, weight, a(2), first coefficients listed for the form
FORMS = {
    "f1": (11, 6, -4, [1, -4, -15, -16, -19, 60]),
    "f2": (13, 4, -5, [1, -5, -7, 17, -7, 35]),
    "f3": (13, 8, 10, [1, 10, -73, -28, -295, -730]),
}


def legendre(n: int, p: int) -> int:
    return int(sympy.legendre_symbol(n % p, p)) if n % p else 0


def dim_cusp(N: int, k: int) -> int:
    mu = Fraction(N + 1)
    nu2 = 1 + legendre(-1, N)
    nu3 = 1 + legendre(-3, N)
    d = (k - 1) * mu / 12 + (k // 4 - Fraction(k - 1, 4)) * nu2 + (k // 3 - Fraction(k - 1, 3)) * nu3 - 1
    assert d.denominator == 1
    return int(d)


def _integral(coeffs: list[Fraction]) -> QSeries:
    den = lcm(*(c.denominator for c in coeffs))
    return QSeries(int(c * den) for c in coeffs)


def sigma_char(prec: int, r: int, left, right) -> list[int]:
    """sum_{d | n} left(n/d) right(d) d^r for 0 < n < prec."""
    out = [0] * prec
    for d in range(1, prec):
        rd = right(d)
        if rd == 0:
            continue
        w = rd * d ** r
        for m in range(d, prec, d):
            lv = left(m // d)
            if lv:
                out[m] += lv * w
    return out


def atoms(N: int, prec: int) -> list[tuple[str, int, bool, QSeries]]:
    """(name, weight, has quadratic character, integral q-series)."""
    triv = lambda n: 1
    chi = lambda n: legendre(n, N)
    out = []

    def dilate(s: list[int]) -> list[int]:
        t = [0] * prec
        for n in range(0, (prec - 1) // N + 1):
            t[n * N] = s[n]
        return t

    s1 = sigma_char(prec, 1, triv, triv)
    e2 = [1] + [-24 * s for s in s1[1:]]
    out.append(("G2", 2, False, QSeries(a - N * b for a, b in zip(e2, dilate(e2)))))
    for k, c in ((4, 240), (6, -504)):
        s = sigma_char(prec, k - 1, triv, triv)
        e = [1] + [c * v for v in s[1:]]
        out.append((f"E{k}", k, False, QSeries(e)))
        out.append((f"E{k}N", k, False, QSeries(dilate(e))))
    if N == 11:
        # prod (1 - q^n) by the pentagonal number theorem
        pent = [0] * prec
        j = 0
        while j * (3 * j - 1) // 2 < prec:
            for e in {j * (3 * j - 1) // 2, j * (3 * j + 1) // 2}:
                if e < prec:
                    pent[e] = -1 if j % 2 else 1
            j += 1
        eta = QSeries(pent)
        eta11 = QSeries(dilate(list(eta.coeffs)))
        g = eta * eta * eta11 * eta11
        out.append(("eta2eta11^2", 2, False, QSeries([0] + list(g.coeffs[:-1]))))
    parity = 0 if legendre(-1, N) == 1 else 1
    for k in range(1, 7):
        if k % 2 != parity:
            continue
        bk = sympy.bernoulli(k, sympy.Symbol("x"))
        xs = sympy.Symbol("x")
        gen_b = N ** (k - 1) * sum(chi(a) * bk.subs(xs, sympy.Rational(a, N)) for a in range(1, N + 1))
        const = Fraction(str(-gen_b / k))
        s = sigma_char(prec, k - 1, triv, chi)
        out.append((f"E{k}[1,chi]", k, True, _integral([const] + [Fraction(2 * v) for v in s[1:]])))
        if k > 1:
            s = sigma_char(prec, k - 1, chi, triv)
            out.append((f"E{k}[chi,1]", k, True, QSeries([0] + [2 * v for v in s[1:]])))
    return out


def monomials(atom_list, k: int, max_degree: int = 3):
    for deg in range(1, max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(len(atom_list)), deg):
            if sum(atom_list[i][1] for i in combo) != k:
                continue
            if sum(atom_list[i][2] for i in combo) % 2:
                continue
            yield combo


def product(atom_list, combo, prec):
    s = one(prec)
    for i in combo:
        s = s * atom_list[i][3].truncate(prec)
    return s


def hecke(series: QSeries, p: int, k: int, count: int) -> list[int]:
    return [series[p * n] + (p ** (k - 1) * series[n // p] if n % p == 0 else 0) for n in range(count)]


def find_eigenform(N: int, k: int, a2: int, work_prec: int = 100):
    dim_m = dim_cusp(N, k) + 2
    atom_list = atoms(N, work_prec)
    combos, rows = [], []
    for combo in monomials(atom_list, k):
        s = product(atom_list, combo, work_prec)
        trial = sympy.Matrix(rows + [list(s.coeffs)])
        if trial.rank() > len(rows):
            rows.append(list(s.coeffs))
            combos.append(combo)
        if len(rows) == dim_m:
            break
    # more independent forms than dim M_k would mean a broken generator
    for combo in monomials(atom_list, k):
        s = product(atom_list, combo, work_prec)
        if sympy.Matrix(rows + [list(s.coeffs)]).rank() > dim_m:
            raise RuntimeError(f"generator {combo} is not in M_{k}(Gamma0({N}))")
    if len(rows) < dim_m:
        raise RuntimeError(f"generators span only {len(rows)} of {dim_m} dimensions")
    half = work_prec // 2
    mat = sympy.Matrix([
        [t - a2 * r[n] for n, t in enumerate(hecke(QSeries(r), 2, k, half))] for r in rows
    ])
    null = mat.T.nullspace()
    if len(null) != 1:
        raise RuntimeError(f"T_2 - {a2} kernel has dimension {len(null)}")
    vec = null[0]
    f = [sum(vec[i] * rows[i][n] for i in range(len(rows))) for n in range(work_prec)]
    scale = f[1]
    coeffs = [Fraction(str(c / scale)) for c in vec]
    return atom_list, combos, coeffs


def expand(N: int, k: int, a2: int, bound: int) -> list[int]:
    _, combos, coeffs = find_eigenform(N, k, a2)
    prec = bound + 1
    atom_list = atoms(N, prec)
    den = lcm(*(c.denominator for c in coeffs))
    total = [0] * prec
    for combo, c in zip(combos, coeffs):
        if c == 0:
            continue
        s = product(atom_list, combo, prec)
        w = int(c * den)
        for n, v in enumerate(s.coeffs):
            if v:
                total[n] += w * v
    out = []
    for n, v in enumerate(total):
        q, r = divmod(v, den)
        if r:
            raise ArithmeticError(f"non-integral coefficient at q^{n}")
        out.append(q)
    return out


def check_multiplicative(a: list[int], N: int, k: int, primes: list[int]) -> None:
    bound = len(a) - 1
    for p in primes:
        if p * p > bound:
            break
        good = N % p != 0
        expect = a[p] ** 2 - (p ** (k - 1) if good else 0)
        if a[p * p] != expect:
            raise AssertionError(f"a({p}^2) fails the Hecke recursion")
    for m in range(2, bound + 1):
        # m = p^e * rest with gcd(p, rest) = 1 for the smallest prime p
        p = next(q for q in primes if m % q == 0)
        pe = 1
        while m % (pe * p) == 0:
            pe *= p
        rest = m // pe
        if rest > 1 and a[m] != a[pe] * a[rest]:
            raise AssertionError(f"a({m}) != a({pe}) a({rest})")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bound", type=int, default=100_000)
    ap.add_argument("--outdir", type=Path, default=Path("data"))
    ap.add_argument("--forms", nargs="*", default=sorted(FORMS))
    args = ap.parse_args(argv)
    args.outdir.mkdir(parents=True, exist_ok=True)
    primes = sieve_primes(args.bound)
    for label in args.forms:
        N, k, a2, head = FORMS[label]
        a = expand(N, k, a2, args.bound)
        if a[1:7] != head:
            raise AssertionError(f"{label}: leading coefficients {a[1:7]} != {head}")
        check_multiplicative(a, N, k, primes)
        table = PrimeCoefficientTable(
            FormDescriptor(label, N, k, "generated"), args.bound, {p: a[p] for p in primes}
        )
        path = args.outdir / f"{label}.ap"
        path.write_text(serialize_table(table), encoding="utf-8")
        print(f"{label}: level {N} weight {k}, {len(table.entries)} primes -> {path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
