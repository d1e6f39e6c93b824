import random

import pytest
from hypothesis import given, settings, strategies as st

from eigencoprime.coeffs import hecke_prime_power
from eigencoprime.qseries import (LEVEL1_WEIGHTS, QSeries, delta, eisenstein, level1_eigenform, mul,
                                  mul_naive, one, sigma_power_sum, sigma_table)


def test_sigma_power_sum_small():
    assert sigma_power_sum(1, 3) == 1
    assert sigma_power_sum(2, 3) == 9
    assert sigma_power_sum(2, 5) == 33
    with pytest.raises(ValueError):
        sigma_power_sum(0, 3)


def test_sigma_table_matches_divisor_sum():
    table = sigma_table(3, 200)
    assert table[1:] == [sum(d ** 3 for d in range(1, n + 1) if n % d == 0) for n in range(1, 200)]


def test_eisenstein_heads():
    assert eisenstein("E4", 1).coeffs == (1,)
    assert eisenstein("E4", 3).coeffs == (1, 240, 2160)
    assert eisenstein("E6", 2).coeffs == (1, -504)
    with pytest.raises(ValueError):
        eisenstein("E8", 3)


def test_mul_identity_and_truncation():
    e4 = eisenstein("E4", 5)
    assert mul(one(5), e4) == e4
    assert mul(e4, e4)[1] == 480
    assert mul(QSeries([1, 2, 3, 4, 5]), QSeries([1, 1, 1])).prec == 3


coeff_lists = st.lists(st.integers(-10 ** 30, 10 ** 30), min_size=1, max_size=40)


@settings(max_examples=200, deadline=None)
@given(coeff_lists, coeff_lists)
def test_kronecker_mul_matches_schoolbook(a, b):
    assert mul(QSeries(a), QSeries(b)) == mul_naive(QSeries(a), QSeries(b))


def test_kronecker_mul_large_random():
    rng = random.Random(7)
    a = QSeries(rng.randint(-10 ** 50, 10 ** 50) for _ in range(400))
    b = QSeries(rng.randint(-10 ** 3, 10 ** 3) for _ in range(350))
    assert mul(a, b) == mul_naive(a, b)


def test_delta_head_and_exact_division():
    d = delta(7)
    assert d.coeffs == (0, 1, -24, 252, -1472, 4830, -6048)
    e4, e6 = eisenstein("E4", 300), eisenstein("E6", 300)
    assert all(c % 1728 == 0 for c in (e4 ** 3 - e6 ** 2).coeffs)


def test_exact_div_rejects_remainder():
    with pytest.raises(ArithmeticError):
        QSeries([1, 2, 3]).exact_div(2)


def test_delta_against_product_formula():
    # q prod (1 - q^n)^24, an independent construction of the same series
    P = 400
    prod = [0] * P
    prod[0] = 1
    for n in range(1, P):
        for _ in range(24):
            for i in range(P - 1, n - 1, -1):
                prod[i] -= prod[i - n]
    assert delta(P).coeffs == tuple([0] + prod[:P - 1])


def test_weight16_a2():
    f = level1_eigenform(16, 10)
    assert f.coefficient(2) == 216
    assert f.coefficient(2) == -24 + 240


@pytest.mark.parametrize("k", LEVEL1_WEIGHTS)
def test_level1_hecke_relations(k):
    f = level1_eigenform(k, 200).series
    assert f[0] == 0 and f[1] == 1
    assert f[6] == f[2] * f[3]
    for p in (2, 3, 5, 7, 11, 13):
        for alpha in range(2, 5):
            if p ** alpha < 200:
                assert f[p ** alpha] == hecke_prime_power(f[p], p, alpha, k, 1)
    assert f[4] == f[2] ** 2 - 2 ** (k - 1)


def test_level1_rejects_multidimensional_weight():
    with pytest.raises(ValueError):
        level1_eigenform(24, 10)


def test_determinism():
    assert level1_eigenform(20, 500) == level1_eigenform(20, 500)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 60), st.integers(1, 60))
def test_precision_never_drops_below_inputs(p, q):
    a, b = eisenstein("E4", p), eisenstein("E6", q)
    assert (a * b).prec == min(p, q)
    assert (a ** 3).prec == p
