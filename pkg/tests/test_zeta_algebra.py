import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypersum.errors import DomainError
from hypersum.numeric.series import sigma_series_direct
from hypersum.numeric.zeta import GUARD_BITS
from hypersum.zeta_algebra import (
    ONE,
    ZERO,
    Basis,
    ZetaExpression,
    ZetaMonomial,
    add,
    constant,
    evaluate,
    harmonic_zeta_expression,
    multiply,
    mu_expression,
    parse,
    render,
    scale,
    sigma_closed_form,
    zeta_symbol,
)

PI2 = ZetaMonomial(pi_power=2)
PI4 = ZetaMonomial(pi_power=4)
Z3 = ZetaMonomial(odd_args=(3,))
Z5 = ZetaMonomial(odd_args=(5,))

# Frozen regression value: computed once, then confirmed numerically below
SIGMA_3_4 = "-1/8*pi^2 + 1/48*pi^4 - 1/4*zeta(3) - 1/6*pi^2*zeta(3) + 3*zeta(5)"


def machin_pi(digits):
    # integer-arithmetic pi * 10**digits, independent of mpmath
    scale_ = 10 ** (digits + 10)

    def arctan_inv(x):
        total, term, k, sign = 0, scale_ // x, 1, 1
        while term:
            total += sign * (term // k)
            term //= x * x
            k += 2
            sign = -sign
        return total

    return (16 * arctan_inv(5) - 4 * arctan_inv(239)) // 10**10


# ------------------------------------------------------------ construction


def test_zeta_symbol_odd_is_canonical():
    assert zeta_symbol(3) == ZetaExpression({Z3: 1})


@pytest.mark.parametrize("k, coef, power", [(2, Fraction(1, 6), 2), (4, Fraction(1, 90), 4)])
def test_zeta_symbol_even(k, coef, power):
    assert zeta_symbol(k) == ZetaExpression({ZetaMonomial(pi_power=power): coef})


@pytest.mark.parametrize("k", [1, 0, -3])
def test_zeta_symbol_rejects_pole(k):
    with pytest.raises(DomainError):
        zeta_symbol(k)


def test_monomial_invariants():
    with pytest.raises(DomainError):
        ZetaMonomial(pi_power=3)
    with pytest.raises(DomainError):
        ZetaMonomial(odd_args=(4,))
    assert ZetaMonomial(odd_args=(5, 3)).odd_args == (3, 5)
    assert ZetaMonomial(pi_power=2, odd_args=(3, 5)).weight == 10


def test_zero_coefficients_dropped():
    assert ZetaExpression({Z3: 0, PI2: 1}) == ZetaExpression({PI2: 1})
    assert len(ZERO) == 0 and not ZERO


# ------------------------------------------------------------ arithmetic


def test_add_examples():
    two_z3 = scale(2, zeta_symbol(3))
    assert add(two_z3, scale(-2, zeta_symbol(3))) == ZERO
    assert add(zeta_symbol(3), zeta_symbol(2)) == ZetaExpression({Z3: 1, PI2: Fraction(1, 6)})
    expected = ZetaExpression({PI4: Fraction(1, 72), PI2: Fraction(-1, 6)})
    assert add(scale(Fraction(5, 4), zeta_symbol(4)), scale(-1, zeta_symbol(2))) == expected


def test_scale_examples():
    a = zeta_symbol(3) + 1
    assert scale(0, a) == ZERO
    assert scale(1, a) == a
    assert scale(-2, a) == ZetaExpression({Z3: -2, ZetaMonomial(): -2})


def test_multiply_examples():
    assert multiply(zeta_symbol(3), zeta_symbol(3)) == ZetaExpression({ZetaMonomial(odd_args=(3, 3)): 1})
    assert multiply(zeta_symbol(2), zeta_symbol(2)) == ZetaExpression({PI4: Fraction(1, 36)})
    mixed = ZetaMonomial(pi_power=2, odd_args=(3,))
    assert multiply(zeta_symbol(3), zeta_symbol(2)) == ZetaExpression({mixed: Fraction(1, 6)})


def test_operators_match_functions():
    a, b = zeta_symbol(3) + Fraction(1, 3), zeta_symbol(2) - zeta_symbol(5)
    assert a + b == add(a, b)
    assert a * b == multiply(a, b)
    assert 3 * a == scale(3, a)
    assert a - a == ZERO
    assert 1 - ONE == ZERO
    assert -a == scale(-1, a)
    assert constant(Fraction(2, 3)) == ONE * Fraction(2, 3)


def test_hash_consistent_with_equality():
    a = zeta_symbol(2) + zeta_symbol(3)
    b = zeta_symbol(3) + zeta_symbol(2)
    assert a == b and hash(a) == hash(b)
    assert len({a, b}) == 1


monomials = st.builds(
    ZetaMonomial,
    pi_power=st.sampled_from([0, 2, 4, 6]),
    odd_args=st.lists(st.sampled_from([3, 5, 7]), max_size=2).map(tuple),
)
rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)
expressions = st.dictionaries(monomials, rationals, max_size=6).map(ZetaExpression)


@given(expressions)
@settings(max_examples=100, deadline=None)
def test_negation_cancels(x):
    assert add(scale(-1, x), x) == ZERO


@given(expressions, st.sampled_from(list(Basis)))
@settings(max_examples=100, deadline=None)
def test_render_parse_round_trip(x, basis):
    assert parse(render(x, basis)) == x


@given(expressions, expressions, expressions)
@settings(max_examples=50, deadline=None)
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c


def test_parse_rejects_garbage():
    for text in ["zeta(2) +", "2**pi", "zeta(x)", "pi^3"]:
        with pytest.raises(DomainError):
            parse(text)


# ------------------------------------------------------------ rendering


def test_render_examples():
    assert render(scale(2, zeta_symbol(3))) == "2*zeta(3)"
    s = sigma_closed_form(2, 3)
    assert render(s, Basis.zeta_display) == "2*zeta(3) + 5/4*zeta(4) - zeta(2)"
    assert render(s, Basis.pi_canonical) == "-1/6*pi^2 + 1/72*pi^4 + 2*zeta(3)"
    assert render(ZERO) == "0"


def test_render_accepts_basis_names():
    s = sigma_closed_form(2, 3)
    assert render(s, "zeta_display") == render(s, Basis.zeta_display)


# ------------------------------------------------------------ mu and Euler sums


def brute_mu(r, j, N):
    return math.fsum(1.0 / (n**r * (n + j)) for n in range(1, N + 1))


@pytest.mark.parametrize(
    "r, j, expected",
    [
        (2, 1, zeta_symbol(2) - 1),
        (3, 1, zeta_symbol(3) - zeta_symbol(2) + 1),
        (2, 2, ZetaExpression({PI2: Fraction(1, 12), ZetaMonomial(): Fraction(-3, 8)})),
    ],
)
def test_mu_examples(r, j, expected):
    assert mu_expression(r, j) == expected
    # partial fractions: the tail of 1/(n**r (n+j)) is below 1/(r N**r)
    N = 10**6
    value = float(evaluate(mu_expression(r, j), 128))
    assert abs(value - brute_mu(r, j, N)) <= 1 / (r * N**r) + 1e-13


def test_mu_rejects_bad_arguments():
    with pytest.raises(DomainError):
        mu_expression(1, 1)
    with pytest.raises(DomainError):
        mu_expression(2, 0)


def test_harmonic_zeta_examples():
    assert harmonic_zeta_expression(2) == scale(2, zeta_symbol(3))
    assert harmonic_zeta_expression(3) == ZetaExpression({PI4: Fraction(1, 72)})
    expected = ZetaExpression({Z5: 3, ZetaMonomial(pi_power=2, odd_args=(3,)): Fraction(-1, 6)})
    assert harmonic_zeta_expression(4) == expected


@pytest.mark.parametrize("m", [1, 0])
def test_harmonic_zeta_rejects_divergent(m):
    with pytest.raises(DomainError):
        harmonic_zeta_expression(m)


def test_harmonic_zeta_three_against_brute_force():
    N = 10**6
    h, total = 0.0, []
    for n in range(1, N + 1):
        h += 1.0 / n
        total.append(h / n**3)
    brute = math.fsum(total)
    # tail of H_n/n**3 beyond N is below (1 + ln N)/N**2
    tail = (1 + math.log(N)) / N**2
    assert 0 <= float(evaluate(harmonic_zeta_expression(3), 128)) - brute <= tail + 1e-9


@pytest.mark.parametrize("m", range(2, 9))
def test_sigma_r1_degenerates_to_harmonic_zeta(m):
    assert sigma_closed_form(1, m) == harmonic_zeta_expression(m)


def test_sigma_examples():
    assert sigma_closed_form(1, 2) == ZetaExpression({Z3: 2})
    assert sigma_closed_form(2, 3) == ZetaExpression({Z3: 2, PI4: Fraction(1, 72), PI2: Fraction(-1, 6)})


@pytest.mark.parametrize("r, m", [(1, 1), (2, 2), (3, 2), (0, 3)])
def test_sigma_rejects_non_convergent(r, m):
    with pytest.raises(DomainError):
        sigma_closed_form(r, m)


def test_sigma_3_4_frozen_regression():
    s = sigma_closed_form(3, 4)
    assert render(s) == SIGMA_3_4
    value = evaluate(s, 192)
    # independent oracle: mpmath quadrature of the integral over u in (0, 1)
    with mpmath.workdps(50):
        f = lambda u: (-mpmath.log1p(-u)) ** 3 * mpmath.log(u) / (u**3 * (1 - u))
        q = -mpmath.quad(f, [0, 0.5, 1]) / 6
        assert abs(value - q) < mpmath.mpf(10) ** -30
    # and against the direct series within its reported bound
    series = sigma_series_direct(3, 4, 1e-5, term_cap=10**6)
    assert abs(value - series.value) <= series.tail_bound
    assert mpmath.nstr(value, 12) == "1.62862020242"


# ------------------------------------------------------------ evaluation


def test_evaluate_examples():
    assert evaluate(ZERO, 128) == 0
    two_z3 = evaluate(scale(2, zeta_symbol(3)), 128)
    with mpmath.workdps(50):
        assert abs(two_z3 - 2 * mpmath.zeta(3)) < mpmath.mpf(2) ** (GUARD_BITS - 128) * 3
    pi_sq = evaluate(zeta_symbol(2), 128)
    pi = Fraction(machin_pi(60), 10**60)
    man, exp = pi_sq.man_exp
    assert abs(man * Fraction(2) ** exp - pi * pi / 6) < Fraction(1, 2 ** (128 - GUARD_BITS))
    assert mpmath.nstr(pi_sq, 11) == "1.6449340668"


def test_evaluate_rejects_low_precision():
    with pytest.raises(DomainError):
        evaluate(ONE, 40)


@pytest.mark.parametrize("a", range(2, 9, 2))
@pytest.mark.parametrize("b", range(2, 9, 2))
def test_even_product_equivalence(a, b):
    prec = 128
    value = evaluate(multiply(zeta_symbol(a), zeta_symbol(b)), prec)
    with mpmath.workprec(prec + 64):
        expected = mpmath.zeta(a) * mpmath.zeta(b)
        assert abs(value - expected) <= abs(expected) * mpmath.mpf(2) ** (GUARD_BITS - prec)


@pytest.mark.parametrize("prec", [53, 128, 300])
def test_evaluate_cancellation_keeps_relative_accuracy(prec):
    # the two terms agree to 30 digits, so the result is all cancellation
    tiny = Fraction(1, 10**30)
    expr = zeta_symbol(3) - zeta_symbol(3) * (1 - tiny)
    value = evaluate(expr, prec)
    with mpmath.workprec(prec + 64):
        expected = mpmath.zeta(3) * mpmath.mpf(tiny.numerator) / tiny.denominator
        assert abs(value - expected) <= abs(expected) * mpmath.mpf(2) ** (GUARD_BITS - prec)
