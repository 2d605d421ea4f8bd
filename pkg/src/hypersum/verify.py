"""Cross-validation harness over the identities behind sigma(r, m).

Every check yields a :class:`CheckResult` whose ``passed`` flag is exactly
``observed_discrepancy <= allowed_discrepancy``.  Discrepancies are stored as
exact Fractions (binary floats convert exactly), which keeps reports
deterministic and lets checks run in worker processes.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import mpmath

from .combinatorics import (
    binomial,
    factorial,
    harmonic,
    hyperharmonic_conway_guy,
    hyperharmonic_table,
    stirling_row,
)
from .errors import DomainError
from .numeric.quadrature import corollary2_run, sigma_integral
from .numeric.series import DEFAULT_TERM_CAP, sigma_series_direct, sigma_series_hurwitz
from .numeric.zeta import GUARD_BITS, context
from .zeta_algebra import evaluate, mu_expression, sigma_closed_form

__all__ = [
    "CheckResult",
    "Report",
    "SuiteConfig",
    "check_hyperharmonic_identity",
    "check_stirling_row_sums",
    "check_generating_function",
    "generating_function_tail_bound",
    "check_mu_formula",
    "check_sigma_consistency",
    "check_corollary2",
    "sigma_routes",
    "run_suite",
]


def to_fraction(x) -> Fraction:
    """Exact value of an mpf (or int/Fraction)."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    man, exp = x.man_exp
    return Fraction(int(man)) * (Fraction(2) ** int(exp))


def fraction_to_str(q: Fraction, digits: int = 20) -> str:
    """Short deterministic scientific rendering used in reports."""
    if q == 0:
        return "0"
    ctx = context(max(53, int(digits * 3.33) + 8))
    return mpmath.nstr(ctx.mpf(q.numerator) / q.denominator, digits)


@dataclass(frozen=True)
class CheckResult:
    check_name: str
    parameters: dict[str, Any]
    observed_discrepancy: Fraction
    allowed_discrepancy: Fraction
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.observed_discrepancy <= self.allowed_discrepancy

    def to_dict(self) -> dict[str, Any]:
        return {
            "check_name": self.check_name,
            "parameters": {k: str(v) if isinstance(v, Fraction) else v for k, v in self.parameters.items()},
            "passed": self.passed,
            "observed_discrepancy": fraction_to_str(self.observed_discrepancy),
            "allowed_discrepancy": fraction_to_str(self.allowed_discrepancy),
            "details": self.details,
        }


@dataclass(frozen=True)
class SuiteConfig:
    r_max: int = 4
    m_offset_max: int = 4
    precision: int = 128
    tol: str = "1e-10"
    term_cap: int = DEFAULT_TERM_CAP
    corollary_terms: int = 1000
    hyperharmonic_grid: int = 50
    stirling_rows: int = 20

    def cells(self) -> list[tuple[int, int]]:
        return [
            (r, m)
            for r in range(1, self.r_max + 1)
            for m in range(r + 1, r + self.m_offset_max + 1)
        ]

    def to_dict(self) -> dict[str, Any]:
        return dict(self.__dict__)


@dataclass(frozen=True)
class Report:
    results: list[CheckResult]
    config: SuiteConfig

    @property
    def summary(self) -> dict[str, int]:
        passed = sum(1 for r in self.results if r.passed)
        return {"total": len(self.results), "passed": passed, "failed": len(self.results) - passed}

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)


# ---------------------------------------------------------------- exact checks


def check_hyperharmonic_identity(n_max: int, r_max: int) -> CheckResult:
    """Recursion table vs Conway-Guy identity on 1 <= n <= n_max, 1 <= r <= r_max."""
    table = hyperharmonic_table(n_max, r_max)
    worst = Fraction(0)
    mismatches = 0
    for r in range(1, r_max + 1):
        for n in range(1, n_max + 1):
            diff = abs(table[r][n - 1] - hyperharmonic_conway_guy(n, r))
            if diff:
                mismatches += 1
                worst = max(worst, diff)
    return CheckResult(
        "hyperharmonic_identity",
        {"n_max": n_max, "r_max": r_max},
        worst,
        Fraction(0),
        {"mismatches": mismatches, "cells": n_max * r_max},
    )


def check_stirling_row_sums(r_max: int) -> CheckResult:
    """sum_k s(r, k) = r! for 1 <= r <= r_max."""
    worst = 0
    for r in range(1, r_max + 1):
        worst = max(worst, abs(sum(stirling_row(r)[1:]) - factorial(r)))
    return CheckResult("stirling_row_sums", {"r_max": r_max}, Fraction(worst), Fraction(0))


# -------------------------------------------------------------- numeric checks


def generating_function_tail_bound(r: int, z: Fraction, N: int) -> Fraction:
    """Rigorous bound on sum_{n>N} H_n^(r) z**n.

    With b_n = C(n+r-1, r-1) H_{n+r-1} z**n >= H_n^(r) z**n, the ratio
    b_{n+1}/b_n <= z (1 + (r-1)/(n+1)) (1 + 1/((n+r) H_{n+r-1})) is
    nonincreasing, so the tail is at most b_{N+1} / (1 - rho_{N+1}).
    """
    n = N + 1
    h = harmonic(n + r - 1)
    first = binomial(n + r - 1, r - 1) * h * z**n
    rho = z * (1 + Fraction(r - 1, n + 1)) * (1 + 1 / ((n + r) * h))
    if rho >= 1:
        raise DomainError(f"N={N} too small for a geometric tail bound at z={z}")
    return first / (1 - rho)


def check_generating_function(r: int, z, N: int, precision: int = 128) -> CheckResult:
    """sum_{n<=N} H_n^(r) z**n against -ln(1-z) / (1-z)**r."""
    z = Fraction(z)
    if not 0 < z < 1:
        raise DomainError(f"z must lie in (0, 1), got {z}")
    row = hyperharmonic_table(N, r)[r]
    partial = sum((h * z ** (k + 1) for k, h in enumerate(row)), Fraction(0))
    ctx = context(precision + GUARD_BITS)
    zc = ctx.mpf(z.numerator) / z.denominator
    target = -ctx.log1p(-zc) / (1 - zc) ** r
    observed = abs(to_fraction(target) - partial)
    tail = generating_function_tail_bound(r, z, N)
    rounding = to_fraction(abs(target)) * Fraction(1, 2 ** (precision - GUARD_BITS))
    return CheckResult(
        "generating_function",
        {"r": r, "z": z, "N": N, "precision": precision},
        observed,
        tail + rounding,
        {"target": mpmath.nstr(target, 20), "partial": fraction_to_str(partial)},
    )


def check_mu_formula(r: int, j: int, N: int = 10**5, precision: int = 128) -> CheckResult:
    """Exact mu(r, j) expression vs brute-force sum_{n<=N} 1/(n**r (n+j)).

    The omitted tail lies in [0, 1/(r N**r)]; each float term is one correctly
    rounded division and fsum rounds once more.
    """
    brute = math.fsum(1.0 / (n**r * (n + j)) for n in range(1, N + 1))
    value = evaluate(mu_expression(r, j), precision)
    observed = abs(to_fraction(value) - Fraction(brute))
    tail = Fraction(1, r * N**r)
    rounding = Fraction(brute) * Fraction(6, 2**53) + to_fraction(abs(value)) * Fraction(1, 2 ** (precision - GUARD_BITS))
    return CheckResult(
        "mu_formula",
        {"r": r, "j": j, "N": N},
        observed,
        tail + rounding,
        {"closed_form": mpmath.nstr(value, 20), "brute_force": repr(brute)},
    )


def sigma_routes(r: int, m: int, precision: int = 128, tol="1e-10",
                 term_cap: int = DEFAULT_TERM_CAP) -> dict[str, tuple[Any, Any, dict]]:
    """route name -> (value, error bound, extra info) for the four sigma routes."""
    closed = evaluate(sigma_closed_form(r, m), precision)
    closed_err = abs(closed) * context(precision).ldexp(1, GUARD_BITS - precision)
    direct = sigma_series_direct(r, m, tol, precision=precision, term_cap=term_cap)
    hurwitz = sigma_series_hurwitz(r, m, tol, precision=precision, term_cap=term_cap)
    quad = sigma_integral(r, m, precision)
    return {
        "closed_form": (closed, closed_err, {}),
        "series_direct": (direct.value, direct.tail_bound,
                          {"terms_used": direct.terms_used, "status": direct.status}),
        "series_hurwitz": (hurwitz.value, hurwitz.tail_bound,
                           {"terms_used": hurwitz.terms_used, "status": hurwitz.status}),
        "integral": (quad.value, quad.error_estimate,
                     {"evaluations": quad.evaluations, "level": quad.level}),
    }


def check_sigma_consistency(r: int, m: int, precision: int = 128, tol="1e-10",
                            term_cap: int = DEFAULT_TERM_CAP) -> CheckResult:
    """Pairwise agreement of all four sigma routes.

    A pair (a, b) agrees when |a - b| <= err_a + err_b + tol.  The reported
    discrepancy is the pair with the largest ratio |a - b| / allowance.
    """
    routes = sigma_routes(r, m, precision, tol, term_cap)
    tol_q = Fraction(str(tol))
    pairs = []
    worst = None
    for (na, (va, ea, _)), (nb, (vb, eb, _)) in itertools.combinations(routes.items(), 2):
        diff = abs(to_fraction(va) - to_fraction(vb))
        allowed = to_fraction(ea) + to_fraction(eb) + tol_q
        pairs.append({"pair": f"{na}/{nb}", "difference": fraction_to_str(diff),
                      "allowed": fraction_to_str(allowed), "passed": diff <= allowed})
        if worst is None or diff * worst[1] > worst[0] * allowed:
            worst = (diff, allowed)
    details = {
        "routes": {
            name: {"value": mpmath.nstr(v, 30), "error_bound": mpmath.nstr(e, 6), **extra}
            for name, (v, e, extra) in routes.items()
        },
        "pairs": pairs,
    }
    return CheckResult(
        "sigma_consistency",
        {"r": r, "m": m, "precision": precision, "tol": str(tol)},
        worst[0],
        worst[1],
        details,
    )


def check_corollary2(r: int, m: int, N: int, precision: int = 128) -> CheckResult:
    """Partial sums of the inner-integral series: nondecreasing in N, and within
    their reported tail bound of the closed form."""
    result, partials = corollary2_run(r, m, N, precision)
    decreases = sum(1 for a, b in zip(partials, partials[1:]) if b < a)
    closed = evaluate(sigma_closed_form(r, m), precision)
    observed = abs(to_fraction(closed) - to_fraction(result.value))
    allowed = to_fraction(result.tail_bound) + to_fraction(abs(closed)) * Fraction(1, 2 ** (precision - GUARD_BITS))
    if decreases:
        # a decreasing partial sum contradicts positivity of every term
        observed = max(observed, allowed + 1)
    return CheckResult(
        "corollary2",
        {"r": r, "m": m, "N": N, "precision": precision},
        observed,
        allowed,
        {"partial_sum": mpmath.nstr(result.value, 20), "monotone": decreases == 0},
    )


# ----------------------------------------------------------------------- suite


def _plan(config: SuiteConfig) -> list[tuple]:
    cells = config.cells()
    if not cells:
        return []
    p = config.precision
    plan: list[tuple] = [
        (check_hyperharmonic_identity, (config.hyperharmonic_grid, config.hyperharmonic_grid)),
        (check_stirling_row_sums, (config.stirling_rows,)),
    ]
    for r in (1, 2, 3):
        for z in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
            plan.append((check_generating_function, (r, z, 80, p)))
    for r in range(2, 7):
        for j in range(1, 6):
            plan.append((check_mu_formula, (r, j, 10**5, p)))
    for r, m in cells:
        plan.append((check_sigma_consistency, (r, m, p, config.tol, config.term_cap)))
    for r, m in cells:
        plan.append((check_corollary2, (r, m, config.corollary_terms, p)))
    return plan


def _run(item: tuple) -> CheckResult:
    fn, args = item
    try:
        return fn(*args)
    except Exception as exc:  # collect-all: a crashing check is a failed check
        name = fn.__name__.removeprefix("check_")
        return CheckResult(name, {"args": [str(a) for a in args]}, Fraction(1), Fraction(0),
                           {"error": f"{type(exc).__name__}: {exc}"})


def run_suite(config: SuiteConfig | None = None, *, workers: int = 1) -> Report:
    """Run every check for the grid in ``config``; never stops at a failure.

    Results are ordered by the plan, independent of completion order.
    """
    config = config or SuiteConfig()
    plan = _plan(config)
    if workers > 1 and len(plan) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run, plan))
    else:
        results = [_run(item) for item in plan]
    return Report(results=results, config=config)
