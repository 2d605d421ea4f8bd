"""Acceptance criteria, one test each, at their stated tolerances.

Each test records a PASS/FAIL line that is repeated in the terminal summary.
"""

import itertools
import time
from fractions import Fraction

import mpmath

from hypersum.numeric.quadrature import corollary2_run, raw_integral, sigma_integral
from hypersum.numeric.zeta import zeta_numeric
from hypersum.verify import (
    check_generating_function,
    check_hyperharmonic_identity,
    check_mu_formula,
    check_stirling_row_sums,
    sigma_routes,
    to_fraction,
)
from hypersum.zeta_algebra import Basis, ZetaExpression, ZetaMonomial, evaluate, render, sigma_closed_form

PREC = 128


def test_criterion_1_first_example(criterion):
    start = time.perf_counter()
    expr = sigma_closed_form(1, 2)
    structural = expr == ZetaExpression({ZetaMonomial(odd_args=(3,)): Fraction(2)})
    quad = sigma_integral(1, 2, PREC)
    diff = abs(quad.value - evaluate(expr, PREC))
    elapsed = time.perf_counter() - start
    ok = structural and diff <= 1e-10 and elapsed < 5
    criterion(1, "sigma(1,2) = 2*zeta(3); quadrature within 1e-10", ok,
              f"diff={mpmath.nstr(diff, 3)}, {elapsed:.2f}s")
    assert structural
    assert diff <= 1e-10
    assert elapsed < 5


def test_criterion_2_second_example(criterion):
    start = time.perf_counter()
    shown = render(sigma_closed_form(2, 3), Basis.zeta_display)
    golden = shown == "2*zeta(3) + 5/4*zeta(4) - zeta(2)"
    raw = raw_integral(2, 3, PREC).value
    z = {k: zeta_numeric(k, PREC) for k in (2, 3, 4)}
    expected = 2 * z[2] - 4 * z[3] - 5 * z[4] / 2
    diff = abs(raw - expected)
    elapsed = time.perf_counter() - start
    ok = golden and diff <= 1e-10 and elapsed < 5
    criterion(2, "sigma(2,3) zeta_display golden; raw integral = 2z(2)-4z(3)-5z(4)/2 within 1e-10", ok,
              f"raw={mpmath.nstr(raw, 11)}, diff={mpmath.nstr(diff, 3)}, {elapsed:.2f}s")
    assert golden, shown
    assert diff <= 1e-10
    assert elapsed < 5


def test_criterion_3_exact_identities(criterion):
    start = time.perf_counter()
    hh = check_hyperharmonic_identity(50, 50)
    st = check_stirling_row_sums(20)
    elapsed = time.perf_counter() - start
    ok = hh.observed_discrepancy == 0 and st.observed_discrepancy == 0 and elapsed < 30
    criterion(3, "hyperharmonic identity n, r <= 50 and Stirling row sums r <= 20 exact", ok,
              f"{elapsed:.2f}s")
    assert hh.passed and hh.observed_discrepancy == 0
    assert st.passed and st.observed_discrepancy == 0
    assert elapsed < 30


def test_criterion_4_route_grid(criterion):
    start = time.perf_counter()
    slack = Fraction(1, 10**8)
    failures = []
    worst_ratio = Fraction(0)
    capped = []
    for r in range(1, 5):
        for m in range(r + 1, r + 5):
            routes = sigma_routes(r, m, PREC, "1e-10", term_cap=10**7)
            for name in ("series_direct", "series_hurwitz"):
                if routes[name][2]["status"] == "term_cap":
                    capped.append(f"{name}({r},{m})")
            for (na, (va, ea, _)), (nb, (vb, eb, _)) in itertools.combinations(routes.items(), 2):
                diff = abs(to_fraction(va) - to_fraction(vb))
                allowed = to_fraction(ea) + to_fraction(eb) + slack
                worst_ratio = max(worst_ratio, diff / allowed)
                if diff > allowed:
                    failures.append(f"({r},{m}) {na}/{nb}")
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 600
    criterion(4, "four sigma routes pairwise agree on 1 <= r <= 4, r < m <= r+4", ok,
              f"worst diff/allowed={float(worst_ratio):.3g}, term cap hit: {len(capped)}, {elapsed:.0f}s")
    assert not failures, failures
    assert elapsed < 600


def test_criterion_5_generating_function(criterion):
    results = [
        check_generating_function(r, z, 80, PREC)
        for r in (1, 2, 3)
        for z in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
    ]
    failed = [res.parameters for res in results if not res.passed]
    criterion(5, "generating function, r in {1,2,3}, z in {1/4,1/2,3/4}, N = 80", not failed,
              f"{len(results) - len(failed)}/{len(results)} within tail bound")
    assert not failed, failed


def test_criterion_6_mu_formula(criterion):
    results = [check_mu_formula(r, j, 10**5, PREC) for r in range(2, 7) for j in range(1, 6)]
    # agreement within the tail bound, and the bound itself within 1e-9
    bad = [
        res.parameters for res in results
        if not res.passed or res.observed_discrepancy > Fraction(1, 10**9)
    ]
    worst = max(res.observed_discrepancy for res in results)
    criterion(6, "mu(r, j) vs brute force N = 1e5, 2 <= r <= 6, 1 <= j <= 5, within 1e-9", not bad,
              f"worst={float(worst):.3g}")
    assert not bad, bad


def test_criterion_7_inner_integral_series(criterion):
    N = 10**4
    lines = []
    ok = True
    for r, m in [(1, 2), (2, 3), (2, 4)]:
        result, partials = corollary2_run(r, m, N, PREC)
        monotone = all(a <= b for a, b in zip(partials, partials[1:]))
        gap = abs(evaluate(sigma_closed_form(r, m), PREC) - result.value)
        within = gap <= result.tail_bound
        ok = ok and monotone and within
        lines.append(f"({r},{m}) gap={mpmath.nstr(gap, 3)} bound={mpmath.nstr(result.tail_bound, 3)}")
    criterion(7, "inner-integral partial sums monotone and within tail bound at N = 1e4", ok,
              "; ".join(lines))
    assert ok, lines
