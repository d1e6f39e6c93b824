"""Prime-indexed gcd statistics for a pair of eigenforms.

Every count here is an exact integer and every density an exact Fraction;
floats only appear in comparisons against analytic main terms.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Mapping

import numpy as np
import sympy

from . import galois
from .coeffs import coefficients_upto, hecke_prime_power
from .errors import InsufficientDataError
from .primes import factorize, prime_mask, sieve_primes, spf_sieve, totient_sieve

__all__ = [
    "DensityEstimate", "ExperimentConfig", "FormPairDataset", "alpha_empirical", "alpha_exact_product",
    "alpha_prime_truncated", "coprime_prime_count", "delta_empirical", "detect_exceptional",
    "erdos_phi_count", "iterated_log", "omega_sums", "pi_m", "pi_star", "reciprocal_prime_sum",
    "rough_count", "sieve_primes", "sieve_upper_count", "sum_v", "sum_v_sq", "theorem1_counts",
    "totient_sieve", "v_of", "v_zero_count", "zero_coeff_count",
]

EULER_GAMMA = 0.5772156649015329


def gcd0(a: int, b: int) -> int:
    """gcd(|a|, |b|) with gcd(0, a) = |a| and gcd(0, 0) = 0."""
    return gcd(a, b)


@dataclass(frozen=True)
class DensityEstimate:
    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("density needs a positive denominator")
        if not 0 <= self.numerator <= self.denominator:
            raise ValueError("density must lie in [0, 1]")

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def decimal(self, places: int = 5) -> str:
        return render_decimal(self.value, places)

    def __float__(self) -> float:
        return self.numerator / self.denominator


def render_decimal(q: Fraction | int, places: int = 5) -> str:
    """Round an exact rational half-to-even at ``places`` digits."""
    q = Fraction(q)
    scaled = round(q * 10 ** places)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}" if places else f"{sign}{digits}"


@dataclass(frozen=True)
class ExperimentConfig:
    x: int = 100_000
    y: int = 50_000
    L: int = 100
    d: int = 2
    u: int | None = None
    overrides: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.y > self.x:
            raise ValueError(f"y = {self.y} exceeds x = {self.x}")
        if self.L > self.y:
            raise ValueError(f"L = {self.L} exceeds y = {self.y}")


class FormPairDataset:
    """Two prime-coefficient tables aligned on the primes up to a common bound."""

    def __init__(self, t1, t2, workers: int = 1):
        if hasattr(t1, "to_prime_table"):
            t1 = t1.to_prime_table()
        if hasattr(t2, "to_prime_table"):
            t2 = t2.to_prime_table()
        self.t1, self.t2 = t1, t2
        self.bound = min(t1.bound, t2.bound)
        self.N = lcm(t1.level, t2.level)
        self.workers = max(1, workers)
        self.primes = sieve_primes(self.bound)
        self.a1 = [t1.ap(p) for p in self.primes]
        self.a2 = [t2.ap(p) for p in self.primes]
        self.g = [gcd0(a, b) for a, b in zip(self.a1, self.a2)]
        self._full: dict[int, tuple[list[int], list[int]]] = {}

    @property
    def label(self) -> str:
        return f"({self.t1.descriptor.label},{self.t2.descriptor.label})"

    def upto(self, x: int) -> int:
        """Number of dataset primes <= x; raises if x is past the data."""
        if x > self.bound:
            raise InsufficientDataError(f"{self.label}: x = {x} exceeds data bound {self.bound}")
        return int(np.searchsorted(self.primes, x, side="right"))

    def full_coefficients(self, x: int) -> tuple[list[int], list[int]]:
        """Dense [a_i(0..x)] for both forms, assembled multiplicatively."""
        if x not in self._full:
            self._full[x] = (coefficients_upto(self.t1, x), coefficients_upto(self.t2, x))
        return self._full[x]

    def scan(self, fn: Callable[[int], int], x: int) -> int:
        """sum(fn(i)) over dataset indices of primes <= x, chunked across workers."""
        n = self.upto(x)
        if self.workers == 1 or n < 2 * self.workers:
            return sum(fn(i) for i in range(n))
        bounds = np.linspace(0, n, self.workers + 1).astype(int)
        with ThreadPoolExecutor(self.workers) as pool:
            parts = pool.map(lambda ab: sum(fn(i) for i in range(*ab)), zip(bounds[:-1], bounds[1:]))
            return sum(parts)


# --------------------------------------------------------------------------- prime counts

def prime_pi(x: int) -> int:
    return int(prime_mask(x).sum()) if x >= 2 else 0


def coprime_prime_count(ds: FormPairDataset, x: int) -> tuple[int, DensityEstimate]:
    """C(x) = #{p <= x : gcd(a1(p), a2(p)) = 1} and R(x) = C(x) / pi(x)."""
    n = ds.upto(x)
    C = ds.scan(lambda i: ds.g[i] == 1, x)
    return C, DensityEstimate(C, max(n, 1)) if n else DensityEstimate(0, 1)


def _divisible(ds: FormPairDataset, i: int, m: int) -> bool:
    return ds.a1[i] % m == 0 and ds.a2[i] % m == 0


def pi_m(ds: FormPairDataset, x: int, m: int, include_ramified: bool = False) -> int:
    """#{p <= x : (p, mN) = 1, m | a1(p), m | a2(p)}.

    ``include_ramified`` drops the (p, mN) = 1 condition.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    mN = m * ds.N
    return ds.scan(lambda i: (include_ramified or mN % ds.primes[i] != 0) and _divisible(ds, i, m), x)


def pi_star(ds: FormPairDataset, x: int, m: int, include_ramified: bool = False) -> int:
    """#{p <= x : a1(p) a2(p) != 0, m | both}, excluding p | mN unless asked not to."""
    if m < 1:
        raise ValueError("m must be >= 1")
    mN = m * ds.N
    return ds.scan(lambda i: ds.a1[i] != 0 and ds.a2[i] != 0
                   and (include_ramified or mN % ds.primes[i] != 0) and _divisible(ds, i, m), x)


def delta_empirical(ds: FormPairDataset, y: int, ell: int, include_ramified: bool = False) -> DensityEstimate:
    """pi(y, l) / pi(y)."""
    n = ds.upto(y)
    if n == 0:
        return DensityEstimate(0, 1)
    return DensityEstimate(pi_m(ds, y, ell, include_ramified), n)


def alpha_empirical(ds: FormPairDataset, L: int, y: int, include_ramified: bool = False) -> Fraction:
    """prod_{l <= L} (1 - delta(y, l)), exact."""
    out = Fraction(1)
    for ell in sieve_primes(L):
        out *= 1 - delta_empirical(ds, y, ell, include_ramified).value
    return out


def delta_used(ell: int, overrides: Mapping[int, Fraction] | None = None) -> Fraction:
    if overrides and ell in overrides:
        return Fraction(overrides[ell])
    return galois.delta_exact(ell)


def alpha_exact_product(L: int, overrides: Mapping[int, Fraction] | None = None) -> Fraction:
    """prod_{l <= L} (1 - delta(l)) with the model density unless overridden."""
    out = Fraction(1)
    for ell in sieve_primes(L):
        out *= 1 - delta_used(ell, overrides)
    return out


def delta_tail_bound(L: int) -> float:
    """Upper bound for sum_{l > L} delta(l) from delta(l) <= 3 / l^2 and sum_{n > L} 1/n^2 < 1/L."""
    return 3.0 / L


@dataclass(frozen=True)
class MoebiusSum:
    value: Fraction
    lower: float
    upper: float
    product_check: Fraction | None


def _squarefree_deltas(B: int, overrides) -> list[tuple[int, Fraction]]:
    """(mu(n), delta(n)) expansions over squarefree n <= B, delta multiplicative."""
    out = [(1, Fraction(1))]
    stack = [(1, 0, Fraction(1), 1)]
    primes = sieve_primes(B)
    while stack:
        n, start, dl, mu = stack.pop()
        for j in range(start, len(primes)):
            m = n * primes[j]
            if m > B:
                break
            d2 = dl * delta_used(primes[j], overrides)
            out.append((-mu, d2))
            stack.append((m, j + 1, d2, -mu))
    return out


def alpha_prime_truncated(B: int, overrides: Mapping[int, Fraction] | None = None,
                          product_cutoff: int = 100_000) -> MoebiusSum:
    """sum_{n <= B} mu(n) delta(n) for multiplicative delta, with a bracketing interval.

    The omitted terms are bounded in absolute value by
    prod_l (1 + delta(l)) - sum_{n <= B} mu(n)^2 delta(n), where the product is
    taken up to ``product_cutoff`` and closed off with the 3/l^2 tail bound.
    """
    terms = _squarefree_deltas(B, overrides)
    value = sum((mu * dl for mu, dl in terms), Fraction(0))
    covered = float(sum((dl for _, dl in terms), Fraction(0)))
    logp = sum(math.log1p(float(delta_used(ell, overrides))) for ell in sieve_primes(product_cutoff))
    full = math.exp(logp + delta_tail_bound(product_cutoff))
    slack = max(full - covered, 0.0)
    check = alpha_exact_product(B, overrides) if B <= 10_000 else None
    return MoebiusSum(value, float(value) - slack, float(value) + slack, check)


@dataclass(frozen=True)
class ExceptionalReport:
    ell: int
    observed: Fraction
    model: Fraction
    threshold: float
    flagged: bool

    @property
    def deviation(self) -> float:
        return abs(float(self.observed - self.model))


def fluctuation_threshold(model: Fraction, n: int) -> float:
    """max(3 sqrt(delta / pi(y)), 1e-3): a binomial-fluctuation heuristic, not a theorem."""
    return max(3.0 * math.sqrt(float(model) / n), 1e-3)


def detect_exceptional(ds: FormPairDataset, ell: int, y: int,
                       overrides: Mapping[int, Fraction] | None = None,
                       include_ramified: bool = False) -> ExceptionalReport:
    n = ds.upto(y)
    if n == 0:
        raise InsufficientDataError(f"pi({y}) = 0: no primes to estimate delta({ell}) from")
    obs = delta_empirical(ds, y, ell, include_ramified).value
    model = delta_used(ell, overrides)
    thr = fluctuation_threshold(model, n)
    return ExceptionalReport(ell, obs, model, thr, abs(float(obs - model)) > thr)


# --------------------------------------------------------------------------- v(l, n)

def _flagged_prime_powers(ds: FormPairDataset, x: int, ell: int) -> list[tuple[int, int]]:
    """All (p^a, p) with p^a <= x and l dividing both a1(p^a) and a2(p^a)."""
    if x > ds.bound:
        raise InsufficientDataError(f"{ds.label}: x = {x} exceeds data bound {ds.bound}")
    t1, t2 = ds.t1, ds.t2
    out = []
    for i in range(ds.upto(x)):
        p = ds.primes[i]
        q, alpha = p, 1
        while q <= x:
            b1 = ds.a1[i] if alpha == 1 else hecke_prime_power(ds.a1[i], p, alpha, t1.weight, t1.level)
            b2 = ds.a2[i] if alpha == 1 else hecke_prime_power(ds.a2[i], p, alpha, t2.weight, t2.level)
            if b1 % ell == 0 and b2 % ell == 0:
                out.append((q, p))
            q *= p
            alpha += 1
    return out


def v_of(ds: FormPairDataset, ell: int, n: int) -> int:
    """#{p^a || n : l | a1(p^a) and l | a2(p^a)}."""
    count = 0
    for p, e in factorize(n):
        if p > ds.bound:
            raise InsufficientDataError(f"{ds.label}: a({p}) beyond bound {ds.bound}")
        i = ds.upto(p) - 1
        b1 = hecke_prime_power(ds.a1[i], p, e, ds.t1.weight, ds.t1.level)
        b2 = hecke_prime_power(ds.a2[i], p, e, ds.t2.weight, ds.t2.level)
        count += b1 % ell == 0 and b2 % ell == 0
    return count


def v_array(ds: FormPairDataset, x: int, ell: int) -> np.ndarray:
    """v(l, n) for 0 <= n <= x (entry 0 unused)."""
    v = np.zeros(x + 1, dtype=np.int64)
    for q, p in _flagged_prime_powers(ds, x, ell):
        v[q::q] += 1
        if q * p <= x:
            v[q * p::q * p] -= 1
    return v


def sum_v(ds: FormPairDataset, x: int, ell: int) -> int:
    # each flagged p^a exactly divides floor(x/p^a) - floor(x/p^{a+1}) integers n <= x
    total = 0
    for q, p in _flagged_prime_powers(ds, x, ell):
        total += x // q - x // (q * p)
    return total


def sum_v_sq(ds: FormPairDataset, x: int, ell: int) -> int:
    v = v_array(ds, x, ell)
    return int((v[1:] ** 2).sum())


def v_zero_count(ds: FormPairDataset, x: int, ell: int) -> int:
    v = v_array(ds, x, ell)
    return int((v[1:] == 0).sum())


@dataclass(frozen=True)
class VSumsReport:
    x: int
    ell: int
    sum_v: int
    sum_v_sq: int
    v_zero: int
    main_v: float | None
    main_v_sq: float | None


def v_sums(ds: FormPairDataset, x: int, ell: int, overrides=None) -> VSumsReport:
    dl = float(delta_used(ell, overrides))
    try:
        l2 = iterated_log(x, 2)
        main_v, main_sq = dl * x * l2, dl * dl * x * l2 * l2
    except ValueError:
        main_v = main_sq = None
    return VSumsReport(x, ell, sum_v(ds, x, ell), sum_v_sq(ds, x, ell), v_zero_count(ds, x, ell), main_v, main_sq)


def reciprocal_prime_sum(ds: FormPairDataset, x: int, ell: int,
                         overrides=None) -> tuple[Fraction, float | None]:
    """sum 1/p over p <= x with (p, lN) = 1 and l | g(p); also its ratio to delta(l) L2(x)."""
    lN = ell * ds.N
    total = Fraction(0)
    for i in range(ds.upto(x)):
        p = ds.primes[i]
        if lN % p and ds.g[i] % ell == 0:
            total += Fraction(1, p)
    try:
        ratio = float(total) / (float(delta_used(ell, overrides)) * iterated_log(x, 2))
    except ValueError:
        ratio = None
    return total, ratio


# --------------------------------------------------------------------------- counts over n

def iterated_log(x: float, i: int) -> float:
    """L_1 = log x, L_i = log L_{i-1}; requires every level to be positive."""
    if i < 1:
        raise ValueError("i must be >= 1")
    val = float(x)
    for level in range(1, i + 1):
        if val <= 0:
            raise ValueError(f"L_{level - 1}({x}) = {val} <= 0; L_{i} undefined")
        val = math.log(val)
    if val <= 0:
        raise ValueError(f"L_{i}({x}) = {val} is not positive")
    return val


def _envelopes(x: int) -> dict[str, float | None]:
    try:
        l3 = iterated_log(x, 3)
        l2 = iterated_log(x, 2)
    except ValueError:
        return {"env_a": None, "env_b": None}
    return {"env_a": x / l3, "env_b": x * l3 / l2}


def theorem1_counts(ds: FormPairDataset, x: int, d: int = 2) -> dict:
    """Counts over 1 <= n <= x of gcd(n, g(n)) = 1, gcd(d, g(n)) = 1, g(n) = 1, and gcd(n, a_i(n)) = 1."""
    if d <= 1:
        raise ValueError("d must be > 1")
    c1, c2 = ds.full_coefficients(x)
    count_a = count_b = count_cor = s1 = s2 = 0
    for n in range(1, x + 1):
        g = gcd0(c1[n], c2[n])
        count_a += gcd(n, g) == 1
        count_b += gcd(d, g) == 1
        count_cor += g == 1
        s1 += gcd(n, c1[n]) == 1
        s2 += gcd(n, c2[n]) == 1
    out = {"x": x, "d": d, "count_a": count_a, "count_b": count_b, "count_cor": count_cor,
           "count_single_1": s1, "count_single_2": s2}
    out.update(_envelopes(x))
    return out


def _omega(n: int, spf: np.ndarray, u: int | None = None) -> tuple[int, int]:
    """(omega(n), omega_u(n)) for n >= 1."""
    if n < len(spf):
        ps = []
        while n > 1:
            p = int(spf[n])
            ps.append(p)
            while n % p == 0:
                n //= p
    else:
        ps = list(sympy.factorint(n))
    w = len(ps)
    wu = w if u is None else sum(1 for p in ps if p <= u)
    return w, wu


@dataclass(frozen=True)
class OmegaReport:
    x: int
    u: int | None
    S1: int
    S2: int
    S1_u: int
    S2_u: int
    c1_model: float
    c2_model: float
    model_L: int
    c1_tail: float
    c2_tail: float


def model_constants(L: int, overrides=None) -> tuple[Fraction, Fraction]:
    """(c1, c2) truncated at primes <= L; c2 uses delta(l1 l2) = delta(l1) delta(l2)."""
    ds_ = [delta_used(ell, overrides) for ell in sieve_primes(L)]
    c1 = sum(ds_, Fraction(0))
    sq = sum((d * d for d in ds_), Fraction(0))
    return c1, c1 * c1 - sq + c1


def omega_sums(ds: FormPairDataset, x: int, u: int | None = None, overrides=None,
               model_L: int = 1000) -> OmegaReport:
    """Sums of omega and omega^2 of g(p) over p <= x with a1(p) a2(p) != 0."""
    spf = spf_sieve(1 << 20)

    def part(i: int) -> tuple[int, int, int, int]:
        if ds.a1[i] == 0 or ds.a2[i] == 0:
            return 0, 0, 0, 0
        w, wu = _omega(ds.g[i], spf, u)
        return w, w * w, wu, wu * wu

    n = ds.upto(x)
    if ds.workers > 1:
        with ThreadPoolExecutor(ds.workers) as pool:
            rows = list(pool.map(part, range(n)))
    else:
        rows = [part(i) for i in range(n)]
    S = [sum(r[j] for r in rows) for j in range(4)]
    c1, c2 = model_constants(model_L, overrides)
    tail1 = delta_tail_bound(model_L)
    return OmegaReport(x, u, S[0], S[1], S[2], S[3], float(c1), float(c2), model_L,
                       tail1, tail1 * (2 * float(c1) + tail1) + tail1)


def zero_coeff_count(table, x: int) -> int:
    """#{p <= x : a(p) = 0}."""
    if x > table.bound:
        raise InsufficientDataError(f"{table.descriptor.label}: x = {x} exceeds bound {table.bound}")
    return sum(1 for p in sieve_primes(x) if table.ap(p) == 0)


def sieve_upper_count(ds: FormPairDataset, x: int, y: int) -> int:
    """#{p <= x : gcd(g(p), P(y)) = 1} with P(y) the product of primes < y."""
    small = [ell for ell in sieve_primes(y) if ell < y]

    def coprime(i: int) -> bool:
        g = ds.g[i]
        if g == 0:
            return not small
        return all(g % ell for ell in small)

    return ds.scan(coprime, x)


def rough_count(x: int, y: float) -> int:
    """#{1 <= n <= x : every prime factor of n exceeds y}."""
    if x < 1:
        return 0
    alive = np.ones(x + 1, dtype=bool)
    alive[0] = False
    for p in sieve_primes(int(y)):
        alive[p::p] = False
    return int(alive.sum())


def rough_main_term(x: int, y: float) -> float:
    out = float(x)
    for p in sieve_primes(int(y)):
        out *= 1 - 1 / p
    return out


def erdos_phi_count(x: int) -> tuple[int, float | None]:
    """#{n <= x : gcd(n, phi(n)) = 1} and its ratio to e^-gamma x / L3(x)."""
    if x < 1:
        return 0, None
    phi = totient_sieve(x)
    n = np.arange(x + 1, dtype=np.int64)
    count = int((np.gcd(n[1:], phi[1:]) == 1).sum())
    try:
        ratio = count / (math.exp(-EULER_GAMMA) * x / iterated_log(x, 3))
    except ValueError:
        ratio = None
    return count, ratio
