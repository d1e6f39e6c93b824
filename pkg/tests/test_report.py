import csv
import io
import json
from fractions import Fraction

from eigencoprime.report import Report, render


def sample():
    rep = Report("t", ["pair", "R", "alpha", "count"], meta={"x": 10})
    rep.add(pair="(a,b)", R=Fraction(3910, 9592), alpha=Fraction(1, 3), count=3910)
    rep.add(pair="(a,c)", R=Fraction(1, 8), alpha=0.25, count=0)
    return rep


def test_empty_csv_is_header_only():
    assert render(Report("e", ["a", "b"]), "csv") == b"a,b\n"


def test_csv_json_agree():
    rep = sample()
    rows = list(csv.DictReader(io.StringIO(render(rep, "csv").decode())))
    doc = json.loads(render(rep, "json"))
    assert [r["R"] for r in rows] == [r["R"]["decimal"] for r in doc["rows"]]
    assert rows[0]["R"] == "0.40763"
    assert doc["rows"][0]["R"]["exact"] == "1955/4796"
    assert Fraction(doc["rows"][0]["R"]["exact"]) == Fraction(3910, 9592)
    assert doc["rows"][0]["count"] == 3910 and rows[0]["count"] == "3910"


def test_csv_quoting():
    rows = list(csv.reader(io.StringIO(render(sample(), "csv").decode())))
    assert rows[1][0] == "(a,b)"


def test_json_key_order_stable():
    a, b = render(sample(), "json"), render(sample(), "json")
    assert a == b
    assert list(json.loads(a)) == ["title", "columns", "rows", "meta"]
    assert list(json.loads(a)["rows"][0]) == ["pair", "R", "alpha", "count"]


def test_markdown_columns():
    md = render(sample(), "markdown").decode().splitlines()
    header = [l for l in md if l.startswith("| pair")][0]
    assert header == "| pair | R | alpha | count |"
    assert "| (a,b) | 0.40763 | 0.33333 | 3910 |" in md


def test_decimal_roundtrip():
    for q in (Fraction(1, 3), Fraction(-7, 9), Fraction(123456789, 1000)):
        rep = Report("r", ["q"])
        rep.add(q=q)
        text = list(csv.reader(io.StringIO(render(rep, "csv").decode())))[1][0]
        assert Fraction(text) == Fraction(round(q * 10 ** 5), 10 ** 5)
