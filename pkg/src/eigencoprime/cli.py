"""Command-line entry point: ``eigencoprime <subcommand> ...``.

Settings are resolved as command-line flag, then environment variable, then
``--config`` file (``key=value`` lines, keys spelled like the long flags),
then built-in default.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import galois, stats
from .coeffs import FormDescriptor, serialize_table, table_from_coefficients, validate
from .errors import DataError, EigencoprimeError, FormatError
from .forms import resolve_form
from .primes import sieve_primes
from .qseries import level1_eigenform
from .remote import ENV_API_BASE, ENV_CACHE, DEFAULT_CACHE, fetch_remote
from .report import Report, render

log = logging.getLogger("eigencoprime")

SUBCOMMANDS = ("level1", "fetch", "validate", "oracle", "table1", "delta", "alpha", "counts", "omega", "erdos")
DEFAULT_PAIR_FORMS = ("label:f1", "label:f2", "label:f3")

# key -> (environment variable or None, default)
SETTINGS = {
    "api_base": (ENV_API_BASE, None),
    "cache_dir": (ENV_CACHE, DEFAULT_CACHE),
    "offline": ("EIGENCOPRIME_OFFLINE", False),
    "format": ("EIGENCOPRIME_FORMAT", "csv"),
    "workers": ("EIGENCOPRIME_WORKERS", 1),
    "x": (None, 100_000),
    "y": (None, 50_000),
    "L": (None, 100),
    "d": (None, 2),
    "u": (None, None),
    "include_ramified": (None, False),
}
FORMATS = ("csv", "json", "markdown")


class UsageError(EigencoprimeError):
    exit_code = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off", ""):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def _coerce(key: str, value):
    if value is None:
        return None
    if key in ("offline", "include_ramified"):
        return _bool(value)
    if key in ("workers", "x", "y", "L", "d", "u"):
        try:
            return int(value)
        except ValueError:
            raise UsageError(f"{key} must be an integer, got {value!r}") from None
    return value


def read_config_file(path: str) -> dict[str, str]:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    api_base: str | None
    cache_dir: str
    offline: bool
    format: str
    workers: int
    x: int
    y: int
    L: int
    d: int
    u: int | None
    include_ramified: bool

    def __post_init__(self):
        if self.workers < 1:
            raise UsageError("worker count must be >= 1")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}")
        if self.y > self.x:
            raise UsageError(f"y = {self.y} exceeds x = {self.x}")
        if self.L > self.y:
            raise UsageError(f"L = {self.L} exceeds y = {self.y}")

    def experiment(self, overrides=None) -> stats.ExperimentConfig:
        return stats.ExperimentConfig(self.x, self.y, self.L, self.d, self.u, overrides or {})


def resolve_config(args: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    file_values = read_config_file(args.config) if getattr(args, "config", None) else {}
    unknown = set(file_values) - set(SETTINGS)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    values = {}
    for key, (env, default) in SETTINGS.items():
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = _coerce(key, flag)
        elif env and environ.get(env):
            values[key] = _coerce(key, environ[env])
        elif key in file_values:
            values[key] = _coerce(key, file_values[key])
        else:
            values[key] = default
    # y and L default below x when only x is given
    if getattr(args, "y", None) is None and "y" not in file_values:
        values["y"] = min(values["y"], values["x"])
    if getattr(args, "L", None) is None and "L" not in file_values:
        values["L"] = min(values["L"], values["y"])
    return RunConfig(args.command, **values)


def parse_overrides(path: str | None) -> dict[int, Fraction]:
    """``ell=value`` lines, value an integer ratio or decimal, giving delta(ell)."""
    if not path:
        return {}
    out = {}
    for key, value in read_config_file(path).items():
        try:
            ell, dl = int(key), Fraction(value)
        except ValueError:
            raise FormatError(f"{path}: bad override {key}={value}") from None
        if not 0 <= dl <= 1:
            raise FormatError(f"{path}: delta({ell}) = {value} is outside [0, 1]")
        out[ell] = dl
    return out


def parse_prime_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    try:
        lo_i, hi_i = (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError:
        raise UsageError(f"--primes expects LO..HI, got {text!r}") from None
    return [p for p in sieve_primes(hi_i) if p >= lo_i]


def parse_grid(text: str | None, x: int) -> list[int]:
    if not text:
        return [x]
    try:
        return sorted({int(v) for v in text.split(",") if v.strip()})
    except ValueError:
        raise UsageError(f"--x-grid expects comma-separated integers, got {text!r}") from None


# --------------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--config", help="key=value settings file")
    g.add_argument("--format", choices=FORMATS)
    g.add_argument("--out", help="write the report here instead of stdout")
    g.add_argument("--workers", type=int)
    g.add_argument("--api-base", dest="api_base")
    g.add_argument("--cache-dir", dest="cache_dir")
    g.add_argument("--offline", action="store_const", const=True, default=None)
    g.add_argument("-v", "--verbose", action="store_true")

    pair = _Parser(add_help=False)
    pair.add_argument("--form1")
    pair.add_argument("--form2")
    pair.add_argument("--include-ramified", dest="include_ramified", action="store_const", const=True,
                      default=None, help="also count primes dividing l*N")

    p = _Parser(prog="eigencoprime", description="Coprimality statistics for pairs of eigenforms.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("level1", parents=[common], help="q-expansion of the level-1 eigenform of a weight")
    s.add_argument("--weight", type=int, required=True)
    s.add_argument("--prec", type=int, required=True, help="number of coefficients a(1..prec)")

    s = sub.add_parser("fetch", parents=[common], help="fetch and cache a(p) for a label")
    s.add_argument("--label", required=True)
    s.add_argument("--bound", type=int, required=True)

    s = sub.add_parser("validate", parents=[common], help="check a coefficient table")
    s.add_argument("--form", required=True)
    s.add_argument("--bound", type=int, default=None)

    s = sub.add_parser("oracle", parents=[common], help="image counts A, C for the maximal model (JSON)")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--k1", type=int, required=True)
    s.add_argument("--k2", type=int, required=True)
    s.add_argument("--mod", type=int, help="count by enumeration at this modulus")

    s = sub.add_parser("table1", parents=[common, pair], help="R(x) against alpha_{L,y} for form pairs")
    s.add_argument("--forms", help="comma-separated SPECs; every pair is reported")
    s.add_argument("-x", type=int)
    s.add_argument("-y", type=int)
    s.add_argument("-L", type=int)

    s = sub.add_parser("delta", parents=[common, pair], help="empirical against model delta(l)")
    s.add_argument("--primes", default="2..100")
    s.add_argument("-y", type=int)
    s.add_argument("--overrides")

    s = sub.add_parser("alpha", parents=[common, pair], help="alpha constants")
    s.add_argument("--mode", choices=("empirical", "exact", "prime"), default="exact")
    s.add_argument("--overrides")
    s.add_argument("-y", type=int)
    s.add_argument("-L", type=int, help="prime cut-off (exact, empirical) or n cut-off (prime)")

    s = sub.add_parser("counts", parents=[common, pair], help="gcd counts over n <= x")
    s.add_argument("-x", type=int)
    s.add_argument("--d", type=int)
    s.add_argument("--x-grid", dest="x_grid")

    s = sub.add_parser("omega", parents=[common, pair], help="sums of omega(g(p)) and its square")
    s.add_argument("-x", type=int)
    s.add_argument("-u", type=int)
    s.add_argument("--overrides")

    s = sub.add_parser("erdos", parents=[common], help="#{n <= x : gcd(n, phi(n)) = 1}")
    s.add_argument("-x", type=int)
    return p


# --------------------------------------------------------------------------- commands

def _load(spec: str, bound: int, cfg: RunConfig):
    return resolve_form(spec, bound, api_base=cfg.api_base, cache_dir=cfg.cache_dir, offline=cfg.offline)


def _pair(args, cfg: RunConfig, bound: int) -> stats.FormPairDataset:
    s1 = args.form1 or DEFAULT_PAIR_FORMS[0]
    s2 = args.form2 or DEFAULT_PAIR_FORMS[1]
    return stats.FormPairDataset(_load(s1, bound, cfg), _load(s2, bound, cfg), cfg.workers)


def run_level1(args, cfg: RunConfig):
    form = level1_eigenform(args.weight, args.prec + 1)
    desc = FormDescriptor(f"1.{args.weight}.a.a", 1, args.weight, "generated")
    table = table_from_coefficients(desc, form.series.coeffs, args.prec, kind="an")
    return serialize_table(table).encode("utf-8")


def run_fetch(args, cfg: RunConfig) -> Report:
    t = fetch_remote(args.label, args.bound, cfg.api_base, cache_dir=cfg.cache_dir, offline=cfg.offline)
    rep = Report("fetch", ["label", "level", "weight", "bound", "primes", "source"])
    rep.add(label=t.descriptor.label, level=t.level, weight=t.weight, bound=t.bound,
            primes=len(t.entries), source=t.descriptor.source)
    return rep


def run_validate(args, cfg: RunConfig) -> Report:
    bound = args.bound or cfg.x
    table = _load(args.form, bound, cfg)
    vr = validate(table)
    rep = Report("validate", ["label", "status", "message"], meta={"checked": vr.checked})
    for msg in vr.failures:
        rep.add(label=vr.label, status="failure", message=msg)
    for msg in vr.warnings:
        rep.add(label=vr.label, status="warning", message=msg)
    if vr.ok and not vr.warnings:
        rep.add(label=vr.label, status="ok", message="")
    if not vr.ok:
        raise _ReportedFailure(rep)
    return rep


def run_oracle(args, cfg: RunConfig):
    w = galois.WeightPair(args.k1, args.k2)
    if args.mod is not None:
        counts = galois.pair_counts_enumerated(args.mod, w, workers=cfg.workers)
    else:
        counts = galois.maximal_image_counts(args.ell, w)
    return (json.dumps(counts.as_dict()) + "\n").encode("utf-8")


def table1_rows(ds: stats.FormPairDataset, cfg: RunConfig) -> dict:
    C, R = stats.coprime_prime_count(ds, cfg.x)
    alpha = stats.alpha_empirical(ds, cfg.L, cfg.y, cfg.include_ramified)
    flagged = [ell for ell in sieve_primes(cfg.L)
               if stats.detect_exceptional(ds, ell, cfg.y, include_ramified=cfg.include_ramified).flagged]
    return {"pair": ds.label, "R": R.value, "alpha": alpha, "pi_x": ds.upto(cfg.x), "C_x": C,
            "flagged": " ".join(map(str, flagged))}


def run_table1(args, cfg: RunConfig) -> Report:
    if args.forms:
        specs = [s.strip() for s in args.forms.split(",") if s.strip()]
        pairs = list(combinations(specs, 2))
    elif args.form1 or args.form2:
        if not (args.form1 and args.form2):
            raise UsageError("table1 needs both --form1 and --form2")
        pairs = [(args.form1, args.form2)]
    else:
        pairs = list(combinations(DEFAULT_PAIR_FORMS, 2))
    tables = {s: _load(s, cfg.x, cfg) for s in dict.fromkeys(x for pr in pairs for x in pr)}
    rep = Report("table1", ["pair", "R", "alpha", "pi_x", "C_x", "flagged"],
                 meta={"x": cfg.x, "y": cfg.y, "L": cfg.L})
    for s1, s2 in pairs:
        rep.add(**table1_rows(stats.FormPairDataset(tables[s1], tables[s2], cfg.workers), cfg))
    return rep


def run_delta(args, cfg: RunConfig) -> Report:
    overrides = parse_overrides(args.overrides)
    ds = _pair(args, cfg, cfg.y)
    rep = Report("delta", ["ell", "observed", "model", "deviation", "threshold", "flagged"],
                 meta={"pair": ds.label, "y": cfg.y})
    for ell in parse_prime_range(args.primes):
        e = stats.detect_exceptional(ds, ell, cfg.y, overrides, cfg.include_ramified)
        rep.add(ell=ell, observed=e.observed, model=e.model, deviation=e.observed - e.model,
                threshold=e.threshold, flagged=e.flagged)
    return rep


def run_alpha(args, cfg: RunConfig) -> Report:
    overrides = parse_overrides(args.overrides)
    rep = Report("alpha", ["mode", "L", "y", "value", "lower", "upper"])
    if args.mode == "empirical":
        ds = _pair(args, cfg, cfg.y)
        rep.meta["pair"] = ds.label
        rep.add(mode="empirical", L=cfg.L, y=cfg.y, value=stats.alpha_empirical(ds, cfg.L, cfg.y, cfg.include_ramified))
    elif args.mode == "exact":
        rep.add(mode="exact", L=cfg.L, value=stats.alpha_exact_product(cfg.L, overrides))
    else:
        ms = stats.alpha_prime_truncated(cfg.L, overrides)
        rep.add(mode="prime", L=cfg.L, value=ms.value, lower=ms.lower, upper=ms.upper)
    return rep


def run_counts(args, cfg: RunConfig) -> Report:
    grid = parse_grid(args.x_grid, cfg.x)
    ds = _pair(args, cfg, max(grid))
    cols = ["x", "d", "count_a", "count_b", "count_cor", "count_single_1", "count_single_2", "env_a", "env_b"]
    rep = Report("counts", cols, meta={"pair": ds.label})
    for x in grid:
        rep.add(**stats.theorem1_counts(ds, x, cfg.d))
    return rep


def run_omega(args, cfg: RunConfig) -> Report:
    overrides = parse_overrides(args.overrides)
    ds = _pair(args, cfg, cfg.x)
    o = stats.omega_sums(ds, cfg.x, cfg.u, overrides)
    n = sum(1 for i in range(ds.upto(cfg.x)) if ds.a1[i] and ds.a2[i])
    rep = Report("omega", ["x", "u", "primes", "S1", "S2", "S1_u", "S2_u", "mean", "c1_model", "c2_model"],
                 meta={"pair": ds.label, "model_L": o.model_L})
    rep.add(x=o.x, u=o.u, primes=n, S1=o.S1, S2=o.S2, S1_u=o.S1_u, S2_u=o.S2_u,
            mean=Fraction(o.S1, n) if n else None, c1_model=o.c1_model, c2_model=o.c2_model)
    return rep


def run_erdos(args, cfg: RunConfig) -> Report:
    count, ratio = stats.erdos_phi_count(cfg.x)
    rep = Report("erdos", ["x", "count", "ratio"])
    rep.add(x=cfg.x, count=count, ratio=ratio)
    return rep


COMMANDS = {
    "level1": run_level1, "fetch": run_fetch, "validate": run_validate, "oracle": run_oracle,
    "table1": run_table1, "delta": run_delta, "alpha": run_alpha, "counts": run_counts,
    "omega": run_omega, "erdos": run_erdos,
}


class _ReportedFailure(DataError):
    def __init__(self, report: Report):
        super().__init__("validation failed")
        self.report = report


def _emit(payload, cfg: RunConfig | None, out: str | None, stdout) -> None:
    if isinstance(payload, Report):
        payload = render(payload, cfg.format)
    if out:
        with open(out, "wb") as fh:
            fh.write(payload)
    else:
        stdout.write(payload.decode("utf-8"))
        stdout.flush()


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = None
    try:
        cfg = resolve_config(args)
        _emit(COMMANDS[args.command](args, cfg), cfg, args.out, stdout)
        return 0
    except _ReportedFailure as exc:
        _emit(exc.report, cfg, args.out, stdout)
        print(f"error: {exc}", file=stderr)
        return exc.exit_code
    except EigencoprimeError as exc:
        print(f"error: {exc}", file=stderr)
        return exc.exit_code
    except (ValueError, MemoryError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
