"""Resolve form specifications (``label:``, ``path:``, ``gen:``) to coefficient tables."""

from __future__ import annotations

from importlib import resources

from .coeffs import (FormDescriptor, PrimeCoefficientTable, coefficient_at, parse_coefficient_file,
                     table_from_coefficients)
from .errors import FormatError, InsufficientDataError, ValidationError
from .qseries import level1_eigenform
from .remote import fetch_remote

# level, weight and the expansion through q^6 of the three test forms
REFERENCE_FORMS = {
    "f1": (11, 6, (1, -4, -15, -16, -19, 60)),
    "f2": (13, 4, (1, -5, -7, 17, -7, 35)),
    "f3": (13, 8, (1, 10, -73, -28, -295, -730)),
}


def bundled_labels() -> list[str]:
    return sorted(p.name[:-3] for p in resources.files("eigencoprime.data").iterdir() if p.name.endswith(".ap"))


def load_bundled(label: str) -> PrimeCoefficientTable:
    data = resources.files("eigencoprime.data").joinpath(f"{label}.ap").read_bytes()
    return parse_coefficient_file(data, source="local")


def check_reference_prefix(table, name: str) -> None:
    """Compare a(1..6) with the listed expansion of a known test form."""
    level, weight, head = REFERENCE_FORMS[name]
    if (table.level, table.weight) != (level, weight):
        raise ValidationError(f"{name}: expected level {level} weight {weight}, "
                              f"got level {table.level} weight {table.weight}")
    got = tuple(coefficient_at(table, n) for n in range(1, 7))
    if got != head:
        raise ValidationError(f"{name}: a(1..6) = {got}, expected {head}")


def generated_table(weight: int, bound: int, kind: str = "ap"):
    form = level1_eigenform(weight, bound + 1)
    desc = FormDescriptor(f"gen:{weight}", 1, weight, "generated")
    return table_from_coefficients(desc, form.series.coeffs, bound, kind)


def resolve_form(spec: str, bound: int, *, api_base: str | None = None, cache_dir=None,
                 offline: bool = False) -> PrimeCoefficientTable:
    """Table of a(p) for p <= bound from a SPEC string."""
    kind, sep, value = spec.partition(":")
    if not sep:
        raise FormatError(f"form spec {spec!r} must look like label:<name>, path:<file> or gen:<weight>")
    if kind == "gen":
        try:
            weight = int(value)
        except ValueError:
            raise FormatError(f"gen: needs an integer weight, got {value!r}") from None
        return generated_table(weight, bound)
    if kind == "path":
        with open(value, "rb") as fh:
            table = parse_coefficient_file(fh.read(), source="local")
        if hasattr(table, "to_prime_table"):
            table = table.to_prime_table()
    elif kind == "label":
        if value in bundled_labels():
            table = load_bundled(value)
        else:
            table = fetch_remote(value, bound, api_base, cache_dir=cache_dir, offline=offline)
    else:
        raise FormatError(f"unknown form spec kind {kind!r}")
    if table.bound < bound:
        raise InsufficientDataError(f"{spec}: data reaches {table.bound}, need {bound}")
    if table.descriptor.label in REFERENCE_FORMS:
        check_reference_prefix(table, table.descriptor.label)
    return table.restrict(bound) if table.bound > bound else table
