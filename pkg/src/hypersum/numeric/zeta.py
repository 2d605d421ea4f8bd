"""Arbitrary-precision pi, zeta(k) and Hurwitz zeta at integer arguments.

Every public function here takes a ``precision`` in bits and returns an
``mpmath.mpf`` whose relative error is at most ``2**(GUARD_BITS - precision)``.
Each call works in its own :class:`mpmath.MPContext`, so nothing touches the
global ``mpmath.mp`` precision and calls are safe from multiple threads.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath

from ..combinatorics import bernoulli
from ..errors import DomainError

__all__ = [
    "GUARD_BITS",
    "MIN_PRECISION",
    "context",
    "check_precision",
    "pi_numeric",
    "zeta_numeric",
    "even_zeta_coefficient",
    "hurwitz_zeta",
]

#: Allowance g in the relative error contract 2**(g - precision).
GUARD_BITS = 8
MIN_PRECISION = 53

# log2(3 + sqrt(8)): bits gained per term of the Borwein eta series.
_BORWEIN_BITS_PER_TERM = math.log2(3 + math.sqrt(8))


def check_precision(precision: int) -> None:
    if isinstance(precision, bool) or not isinstance(precision, int):
        raise DomainError(f"precision must be an integer number of bits, got {precision!r}")
    if precision < MIN_PRECISION:
        raise DomainError(f"precision must be >= {MIN_PRECISION} bits, got {precision}")


def context(precision: int) -> mpmath.MPContext:
    """Fresh mpmath context at the given working precision."""
    ctx = mpmath.MPContext()
    ctx.prec = precision
    return ctx


def pi_numeric(precision: int) -> mpmath.mpf:
    check_precision(precision)
    ctx = context(precision)
    return +ctx.pi


def even_zeta_coefficient(k: int) -> Fraction:
    """Rational c with zeta(k) = c * pi**k for even k >= 2.

    zeta(2n) = (-1)**(n+1) * B_2n * (2*pi)**(2n) / (2 * (2n)!)
    """
    if k < 2 or k % 2:
        raise DomainError(f"even_zeta_coefficient needs an even k >= 2, got {k}")
    n = k // 2
    sign = 1 if n % 2 else -1
    return sign * bernoulli(k) * Fraction(2 ** (k - 1), math.factorial(k))


@lru_cache(maxsize=64)
def _borwein_d(n: int) -> tuple[int, ...]:
    # d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!), all integers
    out = []
    acc = Fraction(0)
    for i in range(n + 1):
        acc += Fraction(
            math.factorial(n + i - 1) * 4**i,
            math.factorial(n - i) * math.factorial(2 * i),
        )
        value = n * acc
        assert value.denominator == 1
        out.append(value.numerator)
    return tuple(out)


def _odd_zeta(s: int, precision: int) -> mpmath.mpf:
    """zeta(s) for integer s >= 2 by Borwein's accelerated eta series.

    The eta truncation error is below 3 / (3 + sqrt 8)**n; dividing by
    (1 - 2**(1-s)) >= 1/2 at most doubles it, and zeta(s) > 1, so choosing
    6 * (3 + sqrt 8)**(-n) <= 2**(-precision) bounds the relative error.
    """
    wp = precision + GUARD_BITS
    n = math.ceil((wp + 3) / _BORWEIN_BITS_PER_TERM) + 1
    d = _borwein_d(n)
    dn = d[n]
    shift = wp + 16 + n.bit_length()
    one = 1 << shift
    acc = 0
    for k in range(n):
        term = (d[k] - dn) * (one // (k + 1) ** s)
        acc += -term if k % 2 else term
    ctx = context(wp)
    eta = -ctx.mpf(acc) / dn / ctx.ldexp(1, shift)
    value = eta / (1 - ctx.ldexp(1, 1 - s))
    out = context(precision)
    return +out.mpf(value)


def zeta_numeric(k: int, precision: int) -> mpmath.mpf:
    """Riemann zeta(k) for integer k >= 2."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise DomainError(f"zeta(k) requires an integer k >= 2 (zeta(1) diverges), got {k!r}")
    check_precision(precision)
    if k % 2 == 0:
        coef = even_zeta_coefficient(k)
        ctx = context(precision + GUARD_BITS)
        value = ctx.mpf(coef.numerator) / coef.denominator * ctx.pi**k
        return +context(precision).mpf(value)
    return _odd_zeta(k, precision)


def hurwitz_zeta(m: int, n: int, precision: int) -> mpmath.mpf:
    """zeta(m, n) = sum_{k>=0} (n+k)**(-m) = zeta(m) - sum_{k<n} k**(-m)."""
    if isinstance(m, bool) or not isinstance(m, int) or m < 2:
        raise DomainError(f"hurwitz_zeta requires an integer m >= 2, got {m!r}")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DomainError(f"hurwitz_zeta requires an integer n >= 1, got {n!r}")
    check_precision(precision)
    if n == 1:
        return zeta_numeric(m, precision)
    # zeta(m, n) ~ n**(1-m) / (m-1); the subtraction cancels about that many bits
    lost = math.ceil((m - 1) * math.log2(n) + math.log2(m)) + 2
    wp = precision + GUARD_BITS + lost
    ctx = context(wp)
    head = ctx.fsum(ctx.mpf(k) ** (-m) for k in range(1, n))
    value = ctx.mpf(zeta_numeric(m, wp)) - head
    return +context(precision).mpf(value)
