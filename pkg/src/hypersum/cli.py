"""hypersum command line.

    hypersum <subcommand> [args] [--prec BITS] [--tol DEC] [--format plain|json|csv]

Exit status: 0 success, 1 verification failure, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, InvalidOperation, localcontext
from fractions import Fraction
from typing import Any, Callable

from . import __version__
from .combinatorics import bernoulli, hyperharmonic_recursive, stirling_first
from .errors import DomainError
from .numeric.quadrature import sigma_integral
from .numeric.series import DEFAULT_TERM_CAP, sigma_series_direct, sigma_series_hurwitz
from .numeric.zeta import GUARD_BITS, MIN_PRECISION, hurwitz_zeta, zeta_numeric
from .verify import SuiteConfig, run_suite
from .zeta_algebra import Basis, evaluate, mu_expression, render, sigma_closed_form, zeta_symbol

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

DEFAULT_PRECISION = 128
DEFAULT_TOL = "1e-10"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    precision_bits: int = DEFAULT_PRECISION
    tolerance: str = DEFAULT_TOL
    format: str = "plain"
    series_term_cap: int = DEFAULT_TERM_CAP

    def to_dict(self) -> dict[str, Any]:
        return dict(self.__dict__)


# ------------------------------------------------------------------ rendering


def display_digits(precision: int) -> int:
    return max(1, math.floor((precision - GUARD_BITS) * math.log10(2)))


def format_real(x, precision: int, digits: int | None = None) -> str:
    """``~`` + decimal rounded half-even to a digit count set by precision."""
    digits = digits or display_digits(precision)
    man, exp = x.man_exp
    q = Fraction(int(man)) * Fraction(2) ** int(exp)
    if q == 0:
        return "~0"
    with localcontext() as dctx:
        dctx.prec = digits
        dctx.rounding = ROUND_HALF_EVEN
        d = Decimal(q.numerator) / Decimal(q.denominator)
    text = format(d, "f") if -6 <= d.adjusted() < digits else format(d, "e")
    return "~" + text


def format_bound(x) -> str:
    return format_real(x, MIN_PRECISION, digits=3)


def format_fraction(q: Fraction | int) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _plain_rows(rows: list[dict[str, Any]]) -> str:
    blocks = []
    for row in rows:
        width = max(len(k) for k in row)
        blocks.append("\n".join(f"{k.ljust(width)}  {_cell(v)}" for k, v in row.items()))
    return "\n\n".join(blocks)


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _csv(rows: list[dict[str, Any]]) -> str:
    columns: list[str] = []
    for row in rows:
        for k in row:
            if k not in columns:
                columns.append(k)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) if c in row else "" for c in columns])
    return buf.getvalue()


def emit(command: str, config: CliConfig, rows: list[dict[str, Any]], *,
         plain: str | None = None, extra: dict[str, Any] | None = None,
         errors: list[str] | None = None, out=None) -> None:
    out = out or sys.stdout
    if config.format == "json":
        doc = {"command": command, "config": config.to_dict(), "results": rows, "errors": errors or []}
        doc.update(extra or {})
        out.write(json.dumps(doc, indent=2) + "\n")
    elif config.format == "csv":
        out.write(_csv(rows))
    else:
        text = plain if plain is not None else _plain_rows(rows)
        if text:
            out.write(text + "\n")


# ------------------------------------------------------------------- commands


def cmd_hh(args, config: CliConfig) -> int:
    value = hyperharmonic_recursive(args.n, args.r)
    row: dict[str, Any] = {"n": args.n, "r": args.r, "value": format_fraction(value)}
    plain = row["value"]
    if args.decimal:
        from .numeric.zeta import context

        ctx = context(config.precision_bits)
        row["decimal"] = format_real(ctx.mpf(value.numerator) / value.denominator, config.precision_bits)
        plain += "\n" + row["decimal"]
    emit("hh", config, [row], plain=plain)
    return EXIT_OK


def _closed_row(r: int, m: int, config: CliConfig) -> dict[str, Any]:
    expr = sigma_closed_form(r, m)
    value = evaluate(expr, config.precision_bits)
    return {
        "route": "closed_form",
        "symbolic_zeta": render(expr, Basis.zeta_display),
        "symbolic_pi": render(expr, Basis.pi_canonical),
        "value": format_real(value, config.precision_bits),
        "error_bound": format_bound(abs(value) * 2.0 ** (GUARD_BITS - config.precision_bits)),
        "_v": value,
        "_e": abs(value) * 2.0 ** (GUARD_BITS - config.precision_bits),
    }


def _series_rows(r: int, m: int, config: CliConfig) -> list[dict[str, Any]]:
    rows = []
    for name, fn in (("series_direct", sigma_series_direct), ("series_hurwitz", sigma_series_hurwitz)):
        res = fn(r, m, config.tolerance, precision=config.precision_bits, term_cap=config.series_term_cap)
        rows.append({
            "route": name,
            "value": format_real(res.value, config.precision_bits),
            "error_bound": format_bound(res.tail_bound),
            "terms_used": res.terms_used,
            "status": res.status,
            "_v": res.value,
            "_e": res.tail_bound,
        })
    return rows


def _integral_row(r: int, m: int, config: CliConfig) -> dict[str, Any]:
    res = sigma_integral(r, m, config.precision_bits)
    return {
        "route": "integral",
        "value": format_real(res.value, config.precision_bits),
        "error_bound": format_bound(res.error_estimate),
        "evaluations": res.evaluations,
        "_v": res.value,
        "_e": res.error_estimate,
    }


def cmd_sigma(args, config: CliConfig) -> int:
    r, m = args.r, args.m
    if m <= r:
        raise DomainError(f"sigma(r, m) requires m > r for convergence, got r={r}, m={m}")
    rows: list[dict[str, Any]] = []
    if args.form in ("closed", "all"):
        rows.append(_closed_row(r, m, config))
    if args.form in ("series", "all"):
        rows.extend(_series_rows(r, m, config))
    if args.form in ("integral", "all"):
        rows.append(_integral_row(r, m, config))
    extra: dict[str, Any] = {}
    if args.form == "all":
        worst = max(abs(a["_v"] - b["_v"]) for i, a in enumerate(rows) for b in rows[i + 1:])
        extra["max_pairwise_discrepancy"] = format_bound(worst)
    for row in rows:
        row.pop("_v")
        row.pop("_e")
        row["r"], row["m"] = r, m
    plain_lines = []
    for row in rows:
        if row["route"] == "closed_form":
            plain_lines += [row["symbolic_zeta"], f"pi basis: {row['symbolic_pi']}", row["value"]]
        else:
            detail = f"  (error <= {row['error_bound']}"
            if "status" in row:
                detail += f", {row['terms_used']} terms, {row['status']}"
            plain_lines.append(f"{row['route']}: {row['value']}{detail})")
    if extra:
        plain_lines.append(f"max pairwise discrepancy: {extra['max_pairwise_discrepancy']}")
        if config.format == "csv":
            for row in rows:
                row["max_pairwise_discrepancy"] = extra["max_pairwise_discrepancy"]
    emit("sigma", config, rows, plain="\n".join(plain_lines), extra=extra)
    return EXIT_OK


def cmd_stirling(args, config: CliConfig) -> int:
    value = stirling_first(args.r, args.k)
    emit("stirling", config, [{"r": args.r, "k": args.k, "value": str(value)}], plain=str(value))
    return EXIT_OK


def cmd_bernoulli(args, config: CliConfig) -> int:
    value = format_fraction(bernoulli(args.n))
    emit("bernoulli", config, [{"n": args.n, "value": value}], plain=value)
    return EXIT_OK


def cmd_zeta(args, config: CliConfig) -> int:
    expr = zeta_symbol(args.k)
    value = format_real(zeta_numeric(args.k, config.precision_bits), config.precision_bits)
    row = {"k": args.k, "symbolic_pi": render(expr), "value": value}
    emit("zeta", config, [row], plain=f"{row['symbolic_pi']}\n{value}")
    return EXIT_OK


def cmd_hurwitz(args, config: CliConfig) -> int:
    value = format_real(hurwitz_zeta(args.m, args.n, config.precision_bits), config.precision_bits)
    emit("hurwitz", config, [{"m": args.m, "n": args.n, "value": value}], plain=value)
    return EXIT_OK


def cmd_mu(args, config: CliConfig) -> int:
    expr = mu_expression(args.r, args.j)
    value = format_real(evaluate(expr, config.precision_bits), config.precision_bits)
    row = {
        "r": args.r,
        "j": args.j,
        "symbolic_zeta": render(expr, Basis.zeta_display),
        "symbolic_pi": render(expr, Basis.pi_canonical),
        "value": value,
    }
    emit("mu", config, [row], plain=f"{row['symbolic_zeta']}\n{value}")
    return EXIT_OK


def cmd_table(args, config: CliConfig) -> int:
    if args.r_max < 1 or args.m_max <= 1:
        raise UsageError(f"table needs --r-max >= 1 and --m-max > 1, got {args.r_max}, {args.m_max}")
    rows = []
    for r in range(1, args.r_max + 1):
        for m in range(r + 1, args.m_max + 1):
            expr = sigma_closed_form(r, m)
            rows.append({
                "r": r,
                "m": m,
                "symbolic_zeta": render(expr, Basis.zeta_display),
                "symbolic_pi": render(expr, Basis.pi_canonical),
                "numeric": format_real(evaluate(expr, config.precision_bits), config.precision_bits),
                "precision_bits": config.precision_bits,
            })
    plain = "\n".join(
        f"sigma({row['r']},{row['m']}) = {row['symbolic_zeta']}  {row['numeric']}" for row in rows
    )
    emit("table", config, rows, plain=plain)
    return EXIT_OK


def cmd_verify(args, config: CliConfig) -> int:
    r_max, m_off = args.grid
    if r_max < 0 or m_off < 0:
        raise UsageError(f"--grid values must be >= 0, got {r_max} {m_off}")
    suite = SuiteConfig(
        r_max=r_max,
        m_offset_max=m_off,
        precision=config.precision_bits,
        tol=config.tolerance,
        term_cap=config.series_term_cap,
        corollary_terms=args.corollary_terms,
    )
    report = run_suite(suite, workers=args.jobs)
    rows = [c.to_dict() for c in report.results]
    lines = [
        f"{'PASS' if c.passed else 'FAIL'}  {c.check_name}  "
        + " ".join(f"{k}={v}" for k, v in c.parameters.items())
        + f"  observed={d['observed_discrepancy']} allowed={d['allowed_discrepancy']}"
        for c, d in zip(report.results, rows)
    ]
    s = report.summary
    lines.append(f"{s['passed']}/{s['total']} checks passed, {s['failed']} failed")
    if config.format == "csv":
        rows = [
            {k: v for k, v in d.items() if k != "details"} | {"parameters": d["parameters"]}
            for d in rows
        ]
    emit("verify", config, rows, plain="\n".join(lines),
         extra={"summary": s, "grid": {"r_max": r_max, "m_offset_max": m_off}})
    return EXIT_OK if report.all_passed else EXIT_FAILED


# ---------------------------------------------------------------------- parser


def _positive_int(text: str) -> int:
    try:
        d = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if d != d.to_integral_value() or d < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(d)


def _decimal(text: str) -> str:
    try:
        d = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a decimal number: {text!r}")
    if not d.is_finite() or d <= 0:
        raise argparse.ArgumentTypeError(f"tolerance must be a positive decimal, got {text!r}")
    return text


def _precision(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"precision must be an integer number of bits, got {text!r}")
    if p < MIN_PRECISION:
        raise argparse.ArgumentTypeError(f"precision must be >= {MIN_PRECISION} bits, got {p}")
    return p


def _default_precision() -> int:
    env = os.environ.get("HYPERSUM_PREC")
    if env is None:
        return DEFAULT_PRECISION
    try:
        return _precision(env)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"HYPERSUM_PREC: {exc}")


def build_parser(default_precision: int = DEFAULT_PRECISION) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=_precision, default=default_precision, metavar="BITS",
                        help=f"working precision in bits (default {default_precision})")
    common.add_argument("--tol", type=_decimal, default=DEFAULT_TOL, metavar="DEC",
                        help=f"series tolerance and comparison slack (default {DEFAULT_TOL})")
    common.add_argument("--format", choices=("plain", "json", "csv"), default="plain")
    common.add_argument("--term-cap", type=_positive_int, default=DEFAULT_TERM_CAP, metavar="N",
                        help="maximum number of series terms (default 10^7)")

    parser = argparse.ArgumentParser(
        prog="hypersum",
        description="Euler sums of hyperharmonic numbers: exact, series and integral routes.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="<subcommand>")

    def add(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("hh", cmd_hh, "hyperharmonic number H_n^(r) as an exact fraction")
    p.add_argument("n", type=int)
    p.add_argument("r", type=int)
    p.add_argument("--decimal", action="store_true", help="also print a decimal approximation")

    p = add("sigma", cmd_sigma, "Euler sum sigma(r, m) = sum H_n^(r) / n^m")
    p.add_argument("r", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--form", choices=("closed", "series", "integral", "all"), default="closed")

    p = add("stirling", cmd_stirling, "unsigned Stirling number of the first kind")
    p.add_argument("r", type=int)
    p.add_argument("k", type=int)

    p = add("bernoulli", cmd_bernoulli, "Bernoulli number B_n (B_1 = -1/2)")
    p.add_argument("n", type=int)

    p = add("zeta", cmd_zeta, "Riemann zeta(k), k >= 2")
    p.add_argument("k", type=int)

    p = add("hurwitz", cmd_hurwitz, "Hurwitz zeta(m, n) = sum_{k>=0} (n+k)^-m")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)

    p = add("mu", cmd_mu, "mu(r, j) = sum 1/(n^r (n+j))")
    p.add_argument("r", type=int)
    p.add_argument("j", type=int)

    p = add("table", cmd_table, "closed forms of sigma(r, m) over a range")
    p.add_argument("--r-max", type=int, required=True)
    p.add_argument("--m-max", type=int, required=True)

    p = add("verify", cmd_verify, "run the cross-validation suite")
    p.add_argument("--grid", type=int, nargs=2, default=(4, 4), metavar=("R_MAX", "M_OFFSET"),
                   help="sigma cells 1 <= r <= R_MAX, r < m <= r + M_OFFSET (default 4 4)")
    p.add_argument("--corollary-terms", type=_positive_int, default=1000, metavar="N",
                   help="terms in each inner-integral series check (default 1000)")
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        default_precision = _default_precision()
    except UsageError as exc:
        print(f"hypersum: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    parser = build_parser(default_precision)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    config = CliConfig(
        precision_bits=args.prec,
        tolerance=args.tol,
        format=args.format,
        series_term_cap=args.term_cap,
    )
    try:
        return args.func(args, config)
    except (DomainError, UsageError) as exc:
        print(f"hypersum {args.command}: error: {exc}", file=sys.stderr)
        if config.format == "json":
            emit(args.command, config, [], errors=[str(exc)])
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
