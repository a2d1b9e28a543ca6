"""Command line front end: ``taulab verify|tau|scatter``.

Exit codes: 0 all identities pass, 2 some identity failed, 1 configuration or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from taulab import fund_reps, kos, tau_classical, whittaker
from taulab.polyalg import format_poly
from taulab.scalars import DomainError
from taulab.schur import TimeVector
from taulab.suites import SUITES, ConfigError, RunConfig, build_cases, run_case

SCHEMA = 1
EXIT_OK, EXIT_CONFIG, EXIT_FAILED = 0, 1, 2
TAU_KINDS = ("classical", "kos", "parA", "fund")
SCATTER_KINDS = ("wf", "cfun", "smatrix")


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; here that code means a failed identity."""

    def error(self, message):
        raise ConfigError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff-K", dest="cutoff_K", type=int, default=3, help="number of times per flavor")
    p.add_argument("--degree-D", dest="degree_D", type=int, default=3, help="total degree for truncated series")
    p.add_argument("--fock-M", dest="fock_M", type=int, default=4, help="modes per side of the Fock window")
    p.add_argument("--tol", type=float, default=None, help="override numeric tolerances")
    p.add_argument("--format", choices=("json", "csv", "text"), default=None)
    p.add_argument("--out", type=Path, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="taulab", description="Tau functions, bilinear identities and Whittaker numerics.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES + ("all",))
    v.add_argument("--no-timing", action="store_true", help="report ms = 0 for byte-stable output")
    _add_common(v)

    t = sub.add_parser("tau", help="print tau polynomials")
    t.add_argument("kind", choices=TAU_KINDS)
    t.add_argument("--kernel", type=Path, help="kernel / matrix JSON file")
    t.add_argument("--n", default="0:2", help="level or inclusive range a:b")
    _add_common(t)

    s = sub.add_parser("scatter", help="numeric grids and values")
    s.add_argument("what", choices=SCATTER_KINDS)
    s.add_argument("--j", default="0.5i", help="spin, e.g. 0.5i or -0.5+1i")
    s.add_argument("--grid", default="-2:4:0.1", help="a:b:step, inclusive")
    s.add_argument("--mu-L", dest="mu_L", type=float, default=1.0)
    s.add_argument("--mu-R", dest="mu_R", type=float, default=1.0)
    s.add_argument("--fit", type=Path, default=None, help="write the Harish-Chandra fit (lam = 2j + 1) as JSON")
    s.add_argument("--rank", type=int, default=3, help="matrix size p of SL(p)")
    s.add_argument("--weyl", default=None, help="permutation in one-line notation, e.g. 132")
    s.add_argument("--lam", default=None, help="comma separated spectral parameter (p - 1 entries)")
    s.add_argument("--p", default="0", help="momentum for the S-matrix")
    s.add_argument("--tau", type=float, default=1.0)
    _add_common(s)
    return parser


# -- parsing helpers ------------------------------------------------------------------

def parse_complex(text: str) -> complex:
    s = str(text).strip().replace(" ", "")
    if not s:
        raise ConfigError("empty number")
    if s.endswith("i"):
        s = s[:-1] + "j"
        if s in ("j", "+j", "-j"):
            s = s.replace("j", "1j")
    try:
        return complex(s)
    except ValueError:
        raise ConfigError(f"cannot parse number {text!r}") from None


def parse_range(text: str) -> list:
    try:
        if ":" in text:
            a, b = (int(x) for x in text.split(":"))
        else:
            a = b = int(text)
    except ValueError:
        raise ConfigError(f"cannot parse level range {text!r}") from None
    if a < 0 or b < a:
        raise ConfigError(f"bad level range {text!r}")
    return list(range(a, b + 1))


def parse_grid(text: str) -> np.ndarray:
    try:
        a, b, h = (float(x) for x in text.split(":"))
    except ValueError:
        raise ConfigError(f"grid must be a:b:step, got {text!r}") from None
    if not h > 0 or b < a:
        raise ConfigError(f"bad grid {text!r}")
    n = int(math.floor((b - a) / h + 1e-9))
    return a + h * np.arange(n + 1)


def _config(args) -> RunConfig:
    cfg = RunConfig(args.seed, args.cutoff_K, args.degree_D, args.fock_M, args.tol)
    cfg.validate()
    return cfg


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _round(x):
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return None
    return float(f"{x:.6g}")


# -- verify ---------------------------------------------------------------------------

def verify(suite: str, cfg: RunConfig, timing: bool = True) -> dict:
    cases = build_cases(suite, cfg)
    rows = []
    for case in cases:
        start = time.perf_counter()
        residual, status = run_case(case)
        ms = (time.perf_counter() - start) * 1e3 if timing else 0.0
        rows.append({"id": case.id, "eq_tag": case.eq_tag, "status": status, "residual": _round(residual), "ms": round(ms, 1)})
    rows.sort(key=lambda r: r["id"])
    return {"schema": SCHEMA, "command": f"verify {suite}", "seed": cfg.seed, "cases": rows}


def format_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["id", "eq_tag", "status", "residual", "ms"], lineterminator="\n")
        w.writeheader()
        w.writerows(report["cases"])
        return buf.getvalue()
    lines = [f"{r['status'].upper():5s} {r['id']}  [{r['eq_tag']}]  residual={r['residual']}  {r['ms']} ms" for r in report["cases"]]
    failed = sum(r["status"] != "pass" for r in report["cases"])
    lines.append(f"{len(report['cases']) - failed}/{len(report['cases'])} passed")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    cfg = _config(args)
    report = verify(args.suite, cfg, timing=not args.no_timing)
    _emit(format_report(report, args.format or "text"), args.out)
    return EXIT_OK if all(r["status"] == "pass" for r in report["cases"]) else EXIT_FAILED


# -- tau --------------------------------------------------------------------------------

def _load_kernel(path: Path | None) -> tau_classical.GrassmannianKernel:
    if path is None:
        raise ConfigError("--kernel is required")
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return tau_classical.GrassmannianKernel.from_json(text)
    except tau_classical.KernelFormatError as exc:
        raise ConfigError(str(exc)) from None


def tau_polys(kind: str, R: tau_classical.GrassmannianKernel, levels: list, K: int) -> list:
    """Canonical text of tau_n for each requested level."""
    out = []
    for n in levels:
        if kind == "classical":
            p = tau_classical.tau_det(n, R, TimeVector.symbolic("t", K), TimeVector.symbolic("tbar", K))
        elif kind == "kos":
            p = kos.kos_tau(n, R, TimeVector.symbolic("s", K), TimeVector.symbolic("sbar", K))
        elif kind == "parA":
            g = [list(row) for row in R.R]
            p = tau_classical.tau_parA(n, g, TimeVector.symbolic("xi", K), TimeVector.symbolic("xibar", K))
        elif kind == "fund":
            g = [list(row) for row in R.R]
            p = fund_reps.tau_fund(n, g, TimeVector.symbolic("t", K), TimeVector.symbolic("tbar", K))
        else:
            raise ConfigError(f"unknown tau kind {kind!r}")
        out.append({"n": n, "tau": format_poly(p)})
    return out


def cmd_tau(args) -> int:
    cfg = _config(args)
    R = _load_kernel(args.kernel)
    rows = tau_polys(args.kind, R, parse_range(args.n), cfg.cutoff_K)
    fmt = args.format or "text"
    if fmt == "json":
        text = json.dumps({"schema": SCHEMA, "command": f"tau {args.kind}", "seed": cfg.seed, "taus": rows}, indent=2) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["n", "tau"], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    else:
        text = "".join(f"tau_{r['n']} = {r['tau']}\n" for r in rows)
    _emit(text, args.out)
    return EXIT_OK


# -- scatter ---------------------------------------------------------------------------

def _cnum(z: complex) -> str:
    z = complex(z)
    return f"{_round(z.real) + 0.0:g}{'+' if z.imag >= 0 else '-'}{abs(_round(z.imag)):g}i"


def scatter_wf(args) -> tuple:
    j = parse_complex(args.j)
    rows = []
    for phi in parse_grid(args.grid):
        psi = whittaker.liouville_wf(j, args.mu_L, args.mu_R, float(phi))
        a, b, c = whittaker.schrodinger_terms(j, args.mu_L, args.mu_R, float(phi))
        scale = max(abs(a), abs(b), abs(c)) or 1.0
        rows.append({"phi": _round(float(phi)), "re": _round(psi.real), "im": _round(psi.imag), "residual": _round(abs(a - b - c) / scale)})
    fit = None
    if args.fit is not None:
        lam = 2 * j + 1
        f = whittaker.fit_harish_chandra(lam, args.mu_L, args.mu_R)
        fit = f.to_json()
        args.fit.write_text(json.dumps(fit, indent=2, sort_keys=True) + "\n")
    return rows, {"j": _cnum(j), "fit": fit}


def scatter_cfun(args) -> tuple:
    p = args.rank
    if p < 2:
        raise ConfigError("--rank must be at least 2")
    if args.lam is None:
        lam = tuple(complex(0, 0.5 + 0.3 * k) for k in range(p - 1))
    else:
        lam = tuple(parse_complex(x) for x in args.lam.split(","))
    weyls = [whittaker.parse_weyl(args.weyl, p)] if args.weyl else whittaker.RootSystem.of(p).weyl_group()
    rows = []
    for w in weyls:
        c = whittaker.harish_chandra_slp(p, lam, w)
        rows.append({"weyl": "".join(map(str, w)), "re": _round(c.real), "im": _round(c.imag), "value": _cnum(c)})
    return rows, {"rank": p, "lam": [_cnum(x) for x in lam]}


def scatter_smatrix(args) -> tuple:
    p = parse_complex(args.p)
    S = whittaker.smatrix_liouville_ft(p, args.tau)
    return [{"p": _cnum(p), "tau": args.tau, "re": _round(S.real), "im": _round(S.imag), "value": _cnum(S)}], {}


def cmd_scatter(args) -> int:
    _config(args)
    rows, meta = {"wf": scatter_wf, "cfun": scatter_cfun, "smatrix": scatter_smatrix}[args.what](args)
    fmt = args.format or ("csv" if args.what == "wf" else "text")
    if fmt == "json":
        text = json.dumps({"schema": SCHEMA, "command": f"scatter {args.what}", **meta, "rows": rows}, indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    elif args.what == "wf":
        text = "".join(f"{r['phi']} {r['re']} {r['im']} {r['residual']}\n" for r in rows)
    else:
        text = "".join(f"{r['value']}\n" for r in rows)
    _emit(text, args.out)
    return EXIT_OK


VALUE_OPTIONS = ("--grid", "--j", "--p", "--lam", "--n")


def _glue_values(argv: list) -> list:
    """Let values such as ``--grid -2:4:0.1`` through by rewriting to ``--grid=-2:4:0.1``."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_glue_values(argv))
        return {"verify": cmd_verify, "tau": cmd_tau, "scatter": cmd_scatter}[args.command](args)
    except ConfigError as exc:
        print(f"taulab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, whittaker.QuadratureError, ZeroDivisionError, OverflowError) as exc:
        print(f"taulab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
