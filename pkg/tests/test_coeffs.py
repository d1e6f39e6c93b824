import math
from functools import lru_cache

import pytest
from hypothesis import given, settings, strategies as st

from eigencoprime.coeffs import (FormDescriptor, FullCoefficientTable, PrimeCoefficientTable, coefficient_at,
                                 coefficients_upto, hecke_prime_power, parse_coefficient_file, serialize_table,
                                 table_from_coefficients, validate)
from eigencoprime.errors import FormatError, InsufficientDataError, ValidationError
from eigencoprime.forms import REFERENCE_FORMS, check_reference_prefix, generated_table, load_bundled

F1_HEAD = "# label=f1 level=11 weight=6 kind=ap bound=5\n"


def test_parse_small_ap_file():
    t = parse_coefficient_file(F1_HEAD + "2 −4\n3 -15\n5 −19\n")
    assert isinstance(t, PrimeCoefficientTable)
    assert t.entries == {2: -4, 3: -15, 5: -19}
    assert (t.level, t.weight, t.bound) == (11, 6, 5)


def test_parse_header_one_key_per_line():
    text = "# label=x\n# level=11\n# weight=6\n# kind=ap\n# bound=3\n2 -4\n3 -15\n"
    assert parse_coefficient_file(text).ap(3) == -15


@pytest.mark.parametrize("text, err", [
    ("# label=a level=1 weight=12 kind=an bound=2\n2 -24\n", ValidationError),   # no "1 1"
    ("# label=a level=1 weight=12 kind=an bound=2\n1 2\n2 -24\n", ValidationError),
    ("# label=a level=1 weight=6 kind=ap bound=2\n2 99\n", ValidationError),      # Deligne
    ("# label=a level=1 weight=6 bound=2\n2 1\n", FormatError),                   # no kind
    ("# label=a level=1 weight=6 kind=ap bound=3\n3 1\n2 1\n", FormatError),       # order
    ("# label=a level=1 weight=6 kind=ap bound=3\n2 1\n", FormatError),            # gap at 3
    ("# label=a level=1 weight=6 kind=ap bound=4\n2 1\n3 1\n4 1\n", FormatError),  # non-prime
    ("# label=a level=1 weight=6 kind=ap bound=2\n2 x\n", FormatError),
    ("# label=a level=1 weight=5 kind=ap bound=2\n2 1\n", FormatError),            # odd weight
    ("# label=a level=1 weight=6 kind=zz bound=2\n2 1\n", FormatError),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_coefficient_file(text)


def test_roundtrip_bundled(bundled):
    for t in bundled.values():
        again = parse_coefficient_file(serialize_table(t), source=t.descriptor.source)
        assert again == t
        assert serialize_table(again) == serialize_table(t)


def test_roundtrip_full_table():
    t = generated_table(12, 300, kind="an")
    assert isinstance(t, FullCoefficientTable)
    assert parse_coefficient_file(serialize_table(t), source="generated") == t


def test_reference_listings(bundled):
    for name, (level, weight, head) in REFERENCE_FORMS.items():
        t = bundled[name]
        assert (t.level, t.weight) == (level, weight)
        assert tuple(coefficient_at(t, n) for n in range(1, 7)) == head
        check_reference_prefix(t, name)


def test_hecke_prime_power_examples():
    assert hecke_prime_power(-4, 2, 2, 6, 11) == -16
    assert hecke_prime_power(-5, 2, 2, 4, 13) == 17
    assert hecke_prime_power(-24, 2, 2, 12, 1) == -1472
    assert hecke_prime_power(1, 11, 3, 6, 11) == 1      # bad prime: a(p)^alpha
    assert hecke_prime_power(7, 3, 0, 6, 11) == 1


def test_coefficient_at_examples(bundled):
    assert coefficient_at(bundled["f1"], 6) == 60
    assert coefficient_at(bundled["f1"], 1) == 1
    delta = generated_table(12, 100)
    assert coefficient_at(delta, 6) == -6048 == -24 * 252
    with pytest.raises(InsufficientDataError):
        coefficient_at(delta, 2 * 101)


def test_generated_agrees_with_series(level1_series):
    series = level1_series[12]
    t = generated_table(12, 2000)
    assert coefficients_upto(t, 2000) == [0] + list(series.coeffs[1:2001])


@lru_cache(maxsize=1)
def _f3():
    return load_bundled("f3")


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 300), st.integers(1, 300))
def test_multiplicative(m, n):
    t = _f3()
    if math.gcd(m, n) == 1:
        assert coefficient_at(t, m * n) == coefficient_at(t, m) * coefficient_at(t, n)


def test_coefficients_upto_matches_pointwise(bundled):
    t = bundled["f2"]
    dense = coefficients_upto(t, 3000)
    assert all(dense[n] == coefficient_at(t, n) for n in range(1, 3001))


def test_validate_recursion_pass_f3(bundled):
    full = table_from_coefficients(bundled["f3"].descriptor, coefficients_upto(bundled["f3"], 500), 500, "an")
    rep = validate(full)
    assert rep.ok and full.entries[4] == 100 - 2 ** 7 == -28


def test_validate_deligne_failure():
    desc = FormDescriptor("bad", 1, 6)
    t = PrimeCoefficientTable(desc, 3, {2: 1, 3: 100})
    rep = validate(t)
    assert not rep.ok and "a(3)" in rep.failures[0]


def test_validate_ramified_warning():
    desc = FormDescriptor("w", 11, 6)
    entries = {p: 0 for p in (2, 3, 5, 7, 11)}
    entries[11] = 5
    rep = validate(PrimeCoefficientTable(desc, 11, entries))
    assert rep.ok and rep.warnings and "121" in rep.warnings[0]
    entries[11] = -121
    assert not validate(PrimeCoefficientTable(desc, 11, entries)).warnings


def test_validate_full_table_catches_broken_multiplicativity():
    t = generated_table(12, 50, kind="an")
    entries = dict(t.entries)
    entries[6] += 1
    rep = validate(FullCoefficientTable(t.descriptor, 50, entries))
    assert not rep.ok


def test_bundled_tables_validate(bundled):
    for t in bundled.values():
        assert t.bound == 100_000 and len(t.entries) == 9592
        assert validate(t).ok
