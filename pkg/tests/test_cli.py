import csv
import io
import json

import pytest

from eigencoprime import cli
from eigencoprime.coeffs import parse_coefficient_file


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    for key in ("EIGENCOPRIME_API_BASE", "EIGENCOPRIME_CACHE", "EIGENCOPRIME_WORKERS",
                "EIGENCOPRIME_FORMAT", "EIGENCOPRIME_OFFLINE"):
        monkeypatch.delenv(key, raising=False)
    monkeypatch.chdir(tmp_path)


def test_oracle_json():
    code, out, _ = run("oracle", "--ell", "5", "--k1", "6", "--k2", "4")
    doc = json.loads(out)
    assert code == 0
    assert list(doc) == ["m", "k1", "k2", "d", "lambda", "A", "C", "delta_num", "delta_den", "source", "flags"]
    assert (doc["A"], doc["C"], doc["source"]) == (57600, 2600, "formula")


def test_oracle_mod():
    code, out, _ = run("oracle", "--ell", "5", "--k1", "6", "--k2", "4", "--mod", "15")
    doc = json.loads(out)
    assert code == 0 and doc["C"] == 468000 and doc["source"] == "enumeration"


@pytest.mark.parametrize("argv", [
    ["oracle", "--ell", "5", "--k1", "6", "--k2", "4", "--bogus"],
    ["nosuch"],
    [],
    ["oracle", "--ell", "five", "--k1", "6", "--k2", "4"],
    ["table1", "-x", "100", "-y", "200"],
    ["table1", "--form1", "label:f1"],
    ["erdos", "-x", "10", "--workers", "0"],
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 1


def test_help_exits_zero(capsys):
    assert cli.main(["--help"]) == 0


def test_table1_offline_empty_cache(tmp_path):
    code, _, err = run("table1", "--form1", "label:11.2.a.a", "--form2", "label:f1", "--offline",
                       "--cache-dir", str(tmp_path / "cache"), "-x", "1000", "-y", "1000", "-L", "10")
    assert code == 2 and "offline" in err


def test_network_error_exit_3(tmp_path):
    code, _, _ = run("fetch", "--label", "11.2.a.a", "--bound", "10", "--api-base", "http://127.0.0.1:9/x",
                     "--cache-dir", str(tmp_path))
    assert code == 3


def test_table1_generated_pair():
    code, out, _ = run("table1", "--form1", "gen:12", "--form2", "gen:16", "-x", "1000", "-y", "1000", "-L", "20")
    header, row = list(csv.reader(io.StringIO(out)))
    assert code == 0 and header == ["pair", "R", "alpha", "pi_x", "C_x", "flagged"]
    assert row[1] == "0.00000" and row[4] == "0" and row[5].split()[0] == "2"


def test_table1_bundled_markdown():
    code, out, _ = run("table1", "--format", "markdown")
    assert code == 0
    assert "| (f1,f2) | 0.40763 | 0.40757 |" in out
    assert "| (f2,f3) | 0.13178 |" in out


def test_level1_file(tmp_path):
    path = tmp_path / "d.an"
    code, _, _ = run("level1", "--weight", "12", "--prec", "50", "--out", str(path))
    t = parse_coefficient_file(path.read_bytes())
    assert code == 0 and t.entries[6] == -6048 and t.bound == 50


def test_validate(tmp_path):
    assert run("validate", "--form", "label:f3")[0] == 0
    bad = tmp_path / "bad.ap"
    bad.write_text("# label=bad level=1 weight=6 kind=ap bound=3\n2 1\n3 100\n")
    code, _, err = run("validate", "--form", f"path:{bad}", "--bound", "3")
    assert code == 2 and "Deligne" in err
    code, _, _ = run("validate", "--form", f"path:{tmp_path / 'missing.ap'}")
    assert code == 2


def test_delta_alpha_counts_omega_erdos():
    code, out, _ = run("delta", "--form1", "gen:12", "--form2", "gen:16", "--primes", "2..7", "-y", "1000")
    assert code == 0 and len(out.splitlines()) == 5
    assert run("alpha", "--mode", "exact", "-L", "7")[1].splitlines()[1].startswith("exact,7,,0.35030")
    assert "95/288" in run("alpha", "--mode", "prime", "-L", "6", "--format", "json")[1]
    code, out, _ = run("alpha", "--mode", "empirical", "--form1", "label:f1", "--form2", "label:f2")
    assert code == 0 and "0.40757" in out
    code, out, _ = run("counts", "--form1", "gen:12", "--form2", "gen:16", "-x", "100", "--x-grid", "30,100")
    assert code == 0 and len(out.splitlines()) == 3
    code, out, _ = run("omega", "-x", "1000", "-u", "5")
    assert code == 0 and out.startswith("x,u,primes,S1")
    assert run("erdos", "-x", "30")[1].splitlines()[1].startswith("30,12,")


def test_overrides_file(tmp_path):
    f = tmp_path / "ov.txt"
    f.write_text("2=1/2\n3 = 0\n")
    out = run("alpha", "--mode", "exact", "-L", "3", "--overrides", str(f), "--format", "json")[1]
    assert json.loads(out)["rows"][0]["value"]["exact"] == "1/2"
    f.write_text("2=3/2\n")
    assert run("alpha", "--mode", "exact", "-L", "3", "--overrides", str(f))[0] == 2


def test_config_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("workers=3\nformat=json\ncache-dir=/from/file\nx=500\n")
    parser = cli.build_parser()
    args = parser.parse_args(["erdos", "--config", str(conf)])
    cfg = cli.resolve_config(args, environ={})
    assert (cfg.workers, cfg.format, cfg.cache_dir, cfg.x) == (3, "json", "/from/file", 500)
    env = {"EIGENCOPRIME_WORKERS": "5", "EIGENCOPRIME_CACHE": "/from/env"}
    cfg = cli.resolve_config(args, environ=env)
    assert (cfg.workers, cfg.cache_dir, cfg.format) == (5, "/from/env", "json")
    args = parser.parse_args(["erdos", "--config", str(conf), "--workers", "7", "--cache-dir", "/flag", "-x", "9"])
    cfg = cli.resolve_config(args, environ=env)
    assert (cfg.workers, cfg.cache_dir, cfg.x) == (7, "/flag", 9)
    cfg = cli.resolve_config(parser.parse_args(["erdos"]), environ={})
    assert (cfg.workers, cfg.format, cfg.cache_dir, cfg.x) == (1, "csv", "./cache", 100_000)


def test_bad_config_key(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("colour=blue\n")
    assert run("erdos", "--config", str(conf))[0] == 1


def test_reports_byte_identical_across_workers(tmp_path):
    outs = []
    for w in ("1", "8", "1"):
        path = tmp_path / f"t{len(outs)}.json"
        assert run("table1", "--format", "json", "--workers", w, "--out", str(path))[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
