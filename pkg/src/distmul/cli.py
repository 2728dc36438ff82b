"""Command-line front end.

    distmul COMMAND [flags]

Commands: ``constants``, ``sequence``, ``limit``, ``scan``, ``legacy``, ``suite``.
Flags may also come from a ``key=value`` file given with ``--config``; keys
are the flag names without the leading dashes, and flags on the command
line take precedence.  Exit codes: 0 success, 1 numerical failure (or a
failed acceptance criterion for ``suite``), 2 usage error.

Distribution grammar (``--S``, ``--T``)::

    expr  := term (('+' | '-') term)*
    term  := [number '*'] atom
    atom  := 'delta' ["'"... | '^' k | '^[' k1,...,kd ']'] ['@' x0 | '@[' x1,...,xd ']']
           | 'hat@[' a ',' b ']'

Test function grammar (``--psi``)::

    bump | bump[c1,...,cd,s] | pbump | pbump[c1,...,cd,s] | polybump[a0,a1,...] | vanish[p]

Every bump is scaled so that its value at the centre is 1.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import re
import sys
from dataclasses import dataclass

from . import constants
from .distrib import (
    Bump,
    DistributionExpr,
    PolyBump,
    ProductBump,
    VanishingAtOrigin,
    delta,
    hat,
)
from .errors import DistmulError, NumericalError, UsageError
from .limits import NGrid, ToleranceSet, estimate_limit, sample_grid, verdict_vs_prediction
from .mollifier import Kind, MollifierSpec
from .products import ProductKind, ProductQuery
from .scanner import predicted_limit, scan

__all__ = ["RunConfig", "main", "parse_args", "parse_expr", "parse_psi", "run"]

COMMANDS = ("constants", "sequence", "limit", "scan", "legacy", "suite")

# -- expression grammar ---------------------------------------------------------

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_LIST = rf"\[{_NUM}(?:,{_NUM})*\]"
_TERM = re.compile(
    rf"(?P<sign>[+-])?(?:(?P<coeff>{_NUM})\*)?"
    rf"(?:delta(?P<primes>'*)(?:\^(?P<order>\d+|\[\d+(?:,\d+)*\]))?(?:@(?P<at>{_NUM}|{_LIST}))?"
    rf"|hat@\[(?P<a>{_NUM}),(?P<b>{_NUM})\])"
)


def _nums(text):
    return [float(v) for v in text.strip("[]").split(",")]


def parse_expr(text: str, d: int = 1) -> DistributionExpr:
    """Parse the distribution grammar above into an expression of dimension ``d``."""
    src = re.sub(r"\s+", "", text)
    if not src:
        raise UsageError("empty distribution expression")
    pos, out = 0, None
    while pos < len(src):
        mt = _TERM.match(src, pos)
        if mt is None or mt.end() == pos or (pos > 0 and not mt.group("sign")):
            raise UsageError(f"cannot parse distribution {text!r} at {src[pos:]!r}")
        pos = mt.end()
        coeff = float(mt.group("coeff") or 1.0) * (-1.0 if mt.group("sign") == "-" else 1.0)
        if mt.group("a") is not None:
            if d != 1:
                raise UsageError("hat terms are one-dimensional")
            a, b = float(mt.group("a")), float(mt.group("b"))
            if not a < b:
                raise UsageError(f"hat@[{a},{b}] needs a < b")
            term = hat(a, b, coeff)
        else:
            primes, order = len(mt.group("primes")), mt.group("order")
            if primes and order:
                raise UsageError(f"use either primes or '^' in {mt.group(0)!r}")
            if order is None:
                k = primes
            elif order.startswith("["):
                k = tuple(int(v) for v in order.strip("[]").split(","))
                if len(k) != d:
                    raise UsageError(f"multi-index {order} does not have {d} entries")
            else:
                k = int(order)
            at = mt.group("at")
            if at is None:
                x0 = 0.0
            elif at.startswith("["):
                x0 = _nums(at)
                if len(x0) != d:
                    raise UsageError(f"point {at} does not have {d} coordinates")
            else:
                x0 = float(at)
            term = delta(k, x0, coeff, d)
        out = term if out is None else out + term
    return out


_PSI = re.compile(r"(?P<name>bump|pbump|polybump|vanish)(?:\[(?P<args>[^\]]*)\])?$")


def parse_psi(text: str, d: int = 1):
    """Parse the test-function grammar above."""
    mt = _PSI.match(re.sub(r"\s+", "", text))
    if mt is None:
        raise UsageError(f"unknown test function {text!r}")
    name = mt.group("name")
    args = _nums(mt.group("args")) if mt.group("args") else []
    zero = (0.0,) * d
    if name in ("bump", "pbump"):
        if args and len(args) != d + 1:
            raise UsageError(f"{name}[...] takes {d} centre coordinates and a half-width")
        center, s = (tuple(args[:d]), args[d]) if args else (zero, 1.0)
        if s <= 0:
            raise UsageError("half-width must be positive")
        if name == "bump":
            return Bump(center, s)
        return ProductBump(center, s, math.e ** d)
    if name == "polybump":
        return PolyBump(Bump(zero), tuple(args) if args else (0.0, 1.0))
    p = int(args[0]) if args else 1
    if len(args) > 1 or p < 1 or (args and p != args[0]):
        raise UsageError("vanish[p] takes one integer power p >= 1")
    return VanishingAtOrigin(Bump(zero), 0, p)


# -- configuration ----------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    command: str
    S: str = "delta"
    T: str = "delta"
    m: int = 2
    kind: str = "1d"
    d: int = 1
    product: str = "sym"
    alpha: float | None = None
    beta: float = 1.0
    psi: str = "bump"
    ngrid: tuple = (2, 2, 14)
    ratio: tuple | None = None
    tau_slope: float = 0.1
    tau_cauchy: float = 1e-4
    window: int = 5
    zero_tol: float = 1e-13
    rel_tol: float = 1e-10
    which: str | None = None
    k: int | None = None
    l: int | None = None
    j: int | None = None
    criteria: tuple | None = None
    format: str | None = None
    output: str | None = None
    workers: int = 1

    # -- derived objects

    @property
    def spec(self):
        return MollifierSpec(self.m, Kind(self.kind), self.d)

    @property
    def grid(self):
        return NGrid(*self.ngrid)

    @property
    def tolerances(self):
        return ToleranceSet(self.tau_slope, self.tau_cauchy, self.window, self.zero_tol)

    def query(self, kind=None):
        return ProductQuery(parse_expr(self.S, self.d), parse_expr(self.T, self.d), self.spec,
                            ProductKind(kind or self.product), self.alpha or 1.0, self.beta,
                            parse_psi(self.psi, self.d), self.rel_tol)

    @property
    def out_format(self):
        if self.format:
            return self.format
        return "csv" if self.command in ("sequence", "scan") else "json"

    # -- key=value serialisation

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if f.name == "criteria":
                text = ",".join(str(c) for c in v)
            elif isinstance(v, tuple):
                text = ":".join(_format_value(x) for x in v)
            else:
                text = _format_value(v)
            lines.append(f"{_flag(f.name)}={text}")
        return "\n".join(lines) + "\n"


def _flag(name):
    return name.replace("_", "-")


def _format_value(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _colon_triple(kind):
    def parse(text):
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"expected three ':'-separated values, got {text!r}")
        try:
            return tuple(kind(p) for p in parts)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad numbers in {text!r}") from None
    return parse


def _int_list(text):
    try:
        return tuple(int(v) for v in text.replace(":", ",").split(",") if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") \
            from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="distmul", description="Products of distributions by "
                                "regularised sequences: constants, sequences, limits, scans.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--config", metavar="FILE", help="key=value file mirroring these flags")
    p.add_argument("--S", help="left distribution (default delta)")
    p.add_argument("--T", help="right distribution (default delta)")
    p.add_argument("--m", type=int, help="mollifier order, even and >= 2")
    p.add_argument("--kind", choices=[k.value for k in Kind], help="mollifier kind")
    p.add_argument("--d", type=int, help="spatial dimension")
    p.add_argument("--product", choices=[k.value for k in ProductKind], help="product (sym)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--psi", help="test function (default bump)")
    p.add_argument("--ngrid", type=_colon_triple(int), metavar="N0:RHO:J")
    p.add_argument("--ratio", type=_colon_triple(float), metavar="LO:HI:STEP")
    p.add_argument("--tau-slope", type=float)
    p.add_argument("--tau-cauchy", type=float)
    p.add_argument("--window", type=int)
    p.add_argument("--zero-tol", type=float)
    p.add_argument("--rel-tol", type=float)
    p.add_argument("--which", help="single constant for the constants command "
                   f"({', '.join(sorted(constants._NAMED))})")
    p.add_argument("--k", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--criteria", type=_int_list, help="acceptance criteria to run, e.g. 1,4,9")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--output", help="output path (default standard output)")
    p.add_argument("--workers", type=int)
    return p


_CONVERTERS = {
    "command": str, "S": str, "T": str, "m": int, "kind": str, "d": int, "product": str,
    "alpha": float, "beta": float, "psi": str, "ngrid": _colon_triple(int),
    "ratio": _colon_triple(float), "tau_slope": float, "tau_cauchy": float, "window": int,
    "zero_tol": float, "rel_tol": float, "which": str, "k": int, "l": int, "j": int,
    "criteria": _int_list, "format": str, "output": str, "workers": int,
}


def read_config(path: str) -> dict:
    """Parse a ``key=value`` file (``#`` comments allowed)."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path}: {exc.strerror}") from None
    return config_from_text(text)


def config_from_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _CONVERTERS:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[key] = _CONVERTERS[key](val.strip())
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"config line {lineno}: bad value for {key}: {exc}") from None
    return values


def validate(cfg: RunConfig) -> RunConfig:
    """Check a configuration; raise :class:`UsageError` naming the offending flag."""
    if cfg.command not in COMMANDS:
        raise UsageError(f"command: expected one of {', '.join(COMMANDS)}")
    if cfg.m < 2 or cfg.m % 2:
        raise UsageError("--m: m must be even and ≥ 2")
    if cfg.d < 1 or cfg.d > 3:
        raise UsageError("--d: dimension must be 1, 2 or 3")
    try:
        Kind(cfg.kind)
        ProductKind(cfg.product)
    except ValueError as exc:
        raise UsageError(f"--kind/--product: {exc}") from None
    if (cfg.kind == "1d") != (cfg.d == 1):
        raise UsageError("--kind: '1d' goes with --d 1 and 'product'/'radial' with --d >= 2")
    for name in ("beta", "tau_slope", "tau_cauchy", "zero_tol", "rel_tol"):
        if not getattr(cfg, name) > 0:
            raise UsageError(f"--{_flag(name)}: must be positive")
    if cfg.alpha is not None and not cfg.alpha > 0:
        raise UsageError("--alpha: must be positive")
    if cfg.window < 3:
        raise UsageError("--window: needs at least 3 points")
    if cfg.workers < 1:
        raise UsageError("--workers: must be >= 1")
    try:
        grid = cfg.grid
    except ValueError as exc:
        raise UsageError(f"--ngrid: {exc}") from None
    if len(grid.n_values) < cfg.window:
        raise UsageError("--ngrid: fewer grid points than the tail window")
    if cfg.ratio is not None:
        lo, hi, step = cfg.ratio
        if not (0 < lo <= hi and step > 0):
            raise UsageError("--ratio: need 0 < lo <= hi and step > 0")
    if cfg.format not in (None, "json", "csv"):
        raise UsageError("--format: json or csv")
    if cfg.command in ("sequence", "limit") and cfg.alpha is None:
        raise UsageError("--alpha: required for " + cfg.command)
    if cfg.command in ("sequence", "limit", "scan") or (cfg.command == "legacy"
                                                         and cfg.alpha is not None):
        try:
            parse_expr(cfg.S, cfg.d)
        except DistmulError as exc:
            raise UsageError(f"--S: {exc}") from None
        try:
            parse_expr(cfg.T, cfg.d)
        except DistmulError as exc:
            raise UsageError(f"--T: {exc}") from None
        try:
            parse_psi(cfg.psi, cfg.d)
        except (DistmulError, ValueError) as exc:
            raise UsageError(f"--psi: {exc}") from None
        kind = "legacy" if cfg.command == "legacy" else None
        try:
            cfg.query(kind)
        except DistmulError as exc:
            raise UsageError(f"--S/--T/--psi: {exc}") from None
    if cfg.command == "constants" and cfg.which is not None \
            and cfg.which not in constants._NAMED:
        raise UsageError(f"--which: unknown constant {cfg.which!r}")
    return cfg


def parse_args(argv=None) -> RunConfig:
    """Command line (plus optional config file) to a validated :class:`RunConfig`.

    argparse itself exits with status 2 on unknown flags; semantic problems
    raise :class:`UsageError`.
    """
    ns = build_parser().parse_args(argv)
    values = read_config(ns.config) if ns.config else {}
    for key, val in vars(ns).items():
        if key != "config" and val is not None:
            values[key] = val
    if "command" not in values:
        raise UsageError("command: missing (give it first or as command= in the config)")
    return validate(RunConfig(**values))


# -- output -------------------------------------------------------------------------

def _num(x):
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def to_json(obj, indent=0) -> str:
    """JSON with every float at 17 significant digits and stable key order."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if hasattr(obj, "item"):
        obj = obj.item()
    return _num(obj)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else ("" if v is None else _num(v).strip('"'))
                    for v in row])
    return buf.getvalue()


def _emit(text, cfg: RunConfig, stdout):
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


# -- commands -------------------------------------------------------------------------

def _samples_rows(samples):
    return [(s.n, s.value, s.quad_error, s.rescale_exponent) for s in samples]


def _cmd_constants(cfg, stdout, stderr):
    if cfg.which:
        params = {k: getattr(cfg, k) for k in ("k", "l", "j") if getattr(cfg, k) is not None}
        v = constants.compute(cfg.m, cfg.d if cfg.d > 1 else 2, cfg.which, **params)
        out = {"m": cfg.m, "d": cfg.d, "which": cfg.which, **params,
               "value": v.value, "error": v.error}
        if cfg.out_format == "csv":
            _emit(to_csv(["name", "value", "error"], [(cfg.which, v.value, v.error)]), cfg, stdout)
        else:
            _emit(to_json(out) + "\n", cfg, stdout)
        return 0
    table = constants.constant_table(cfg.m, cfg.d if cfg.d > 1 else 2)
    if cfg.out_format == "csv":
        rows = [(k, v.value, v.error) for k, v in table.entries.items()]
        _emit(to_csv(["name", "value", "error"], rows), cfg, stdout)
    else:
        _emit(to_json(table.to_dict()) + "\n", cfg, stdout)
    return 0


def _cmd_sequence(cfg, stdout, stderr):
    samples = sample_grid(cfg.query(), cfg.grid, cfg.workers)
    if cfg.out_format == "csv":
        _emit(to_csv(["n", "value", "quad_error", "rescale_exponent"], _samples_rows(samples)),
              cfg, stdout)
    else:
        _emit(to_json([{"n": s.n, "value": s.value, "quad_error": s.quad_error,
                        "rescale_exponent": s.rescale_exponent} for s in samples]) + "\n",
              cfg, stdout)
    return 0


def _verdict_payload(q, cfg):
    v = estimate_limit(q, cfg.grid, cfg.tolerances, cfg.workers)
    out = v.to_dict()
    try:
        pred = predicted_limit(q)
    except DistmulError:
        pred = None
    if pred is not None:
        out["prediction"] = verdict_vs_prediction(v, pred)
    return v, out


def _cmd_limit(cfg, stdout, stderr, kind=None):
    q = cfg.query(kind)
    _, out = _verdict_payload(q, cfg)
    if cfg.out_format == "csv":
        _emit(to_csv(["n", "value", "quad_error", "rescale_exponent"],
                     [(s["n"], s["value"], s["quad_error"], s["rescale_exponent"])
                      for s in out["samples"]]), cfg, stdout)
    else:
        _emit(to_json(out) + "\n", cfg, stdout)
    return 0


# (S, T, m, alpha, expected constant) for the Cauchy-regularised product table
LEGACY_CASES = (
    ("delta", "delta", 2, 2.0, (0, 0)),
    ("delta", "delta'", 4, 3.0, (0, 1)),
    ("delta'", "delta'", 4, 4.0, (1, 1)),
    ("delta", "delta''", 4, 4.0, (0, 2)),
    ("delta''", "delta''", 6, 6.0, (2, 2)),
)


def _cmd_legacy(cfg, stdout, stderr):
    if cfg.alpha is not None:
        return _cmd_limit(cfg, stdout, stderr, kind="legacy")
    rows = []
    for S, T, m, alpha, (k, l) in LEGACY_CASES:
        c = dataclasses.replace(cfg, S=S, T=T, m=m, alpha=alpha, beta=1.0, kind="1d", d=1)
        q = c.query("legacy")
        v = estimate_limit(q, c.grid, c.tolerances, c.workers)
        target = constants.legacy_constant(k, l, m).value * float(q.psi(0.0))
        rows.append({"S": S, "T": T, "m": m, "alpha": alpha, "beta": 1.0,
                     "class": v.cls.value, "value": v.value, "slope": v.slope,
                     "predicted": target})
    if cfg.out_format == "csv":
        _emit(to_csv(list(rows[0]), [tuple(r.values()) for r in rows]), cfg, stdout)
    else:
        _emit(to_json(rows) + "\n", cfg, stdout)
    return 0


def _cmd_scan(cfg, stdout, stderr):
    rep = scan(cfg.query(), cfg.ratio or (1.1, 2.0, 0.05), cfg.grid, cfg.tolerances, cfg.workers)
    summary = rep.summary()
    if cfg.out_format == "json":
        _emit(to_json(rep.to_dict()) + "\n", cfg, stdout)
    else:
        rows = [(p["r"], p["class"], p["value"], p["slope"]) for p in
                (pt.to_dict() for pt in rep.points)]
        _emit(to_csv(["r", "class", "value", "slope"], rows), cfg, stdout)
        text = to_json(summary) + "\n"
        if cfg.output:
            with open(cfg.output + ".summary.json", "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            stderr.write(text)
    return 1 if summary["failed_points"] else 0


def _cmd_suite(cfg, stdout, stderr):
    from .acceptance import run_all

    results = run_all(cfg.criteria, echo=lambda line: stderr.write(line + "\n"))
    ok = all(r.passed for r in results)
    out = {"pass": ok, "criteria": [r.to_dict() for r in results]}
    if cfg.out_format == "csv":
        _emit(to_csv(["criterion", "title", "pass"],
                     [(r.number, r.title, str(r.passed).lower()) for r in results]), cfg, stdout)
    else:
        _emit(to_json(out) + "\n", cfg, stdout)
    return 0 if ok else 1


_COMMANDS = {"constants": _cmd_constants, "sequence": _cmd_sequence, "limit": _cmd_limit,
             "scan": _cmd_scan, "legacy": _cmd_legacy, "suite": _cmd_suite}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute a validated configuration; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        return _COMMANDS[cfg.command](cfg, stdout, stderr)
    except NumericalError as exc:
        err = {"error": {"type": "NumericalError", "message": str(exc),
                         "estimate": exc.estimate, "error_estimate": exc.error}}
        stdout.write(to_json(err) + "\n")
        return 1
    except UsageError as exc:
        stderr.write(f"distmul: error: {exc}\n")
        return 2


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"distmul: error: {exc}\n")
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
