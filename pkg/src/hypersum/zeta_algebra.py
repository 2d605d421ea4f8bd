"""Exact algebra on rational linear combinations of zeta-value monomials.

A monomial is ``pi**p * zeta(a1) * zeta(a2) * ...`` with ``p`` even and every
``a_i`` odd and >= 3.  Even zeta values are always rewritten as rational
multiples of powers of pi, so two expressions are equal exactly when their
canonical term maps are equal.

Text grammar (both :func:`render` and :func:`parse`)::

    expr     := term ((" + " | " - ") term)*      first term may carry "-"
    term     := coef | [coef "*"] factor ("*" factor)*
    coef     := INT | INT "/" INT
    factor   := "pi^" INT | "zeta(" INT ")"

``pi_canonical`` output only uses ``pi^2k`` and odd ``zeta(n)`` factors.
``zeta_display`` output writes ``c*pi^2k`` as a multiple of ``zeta(2k)``.
Terms are listed in ascending ``(odd_args, pi_power)`` order for
``pi_canonical`` and in descending order for ``zeta_display``.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import mpmath

from .combinatorics import factorial, harmonic, stirling_first
from .errors import DomainError
from .numeric.zeta import GUARD_BITS, check_precision, context, pi_numeric, zeta_numeric
from .numeric.zeta import even_zeta_coefficient

__all__ = [
    "ZetaMonomial",
    "ZetaExpression",
    "Basis",
    "ONE",
    "ZERO",
    "constant",
    "zeta_symbol",
    "add",
    "scale",
    "multiply",
    "mu_expression",
    "harmonic_zeta_expression",
    "sigma_closed_form",
    "evaluate",
    "render",
    "parse",
]

RationalLike = Fraction | int


@dataclass(frozen=True, order=True)
class ZetaMonomial:
    pi_power: int = 0
    odd_args: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.pi_power < 0 or self.pi_power % 2:
            raise DomainError(f"pi_power must be even and >= 0, got {self.pi_power}")
        if any(a < 3 or a % 2 == 0 for a in self.odd_args):
            raise DomainError(f"odd_args must be odd integers >= 3, got {self.odd_args}")
        if list(self.odd_args) != sorted(self.odd_args):
            object.__setattr__(self, "odd_args", tuple(sorted(self.odd_args)))

    def __mul__(self, other: ZetaMonomial) -> ZetaMonomial:
        return ZetaMonomial(self.pi_power + other.pi_power, self.odd_args + other.odd_args)

    @property
    def sort_key(self) -> tuple[tuple[int, ...], int]:
        return (self.odd_args, self.pi_power)

    @property
    def weight(self) -> int:
        return self.pi_power + sum(self.odd_args)


UNIT = ZetaMonomial()


class ZetaExpression:
    """Immutable finite map ZetaMonomial -> nonzero Fraction."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[ZetaMonomial, RationalLike] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[ZetaMonomial, Fraction] = {}
        for mono, coef in items:
            coef = Fraction(coef)
            if coef:
                clean[mono] = clean.get(mono, Fraction(0)) + coef
                if not clean[mono]:
                    del clean[mono]
        self._terms = dict(sorted(clean.items(), key=lambda kv: kv[0].sort_key))
        self._hash = None

    @property
    def terms(self) -> Mapping[ZetaMonomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, mono: ZetaMonomial) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = constant(other)
        if not isinstance(other, ZetaExpression):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other: ZetaExpression | RationalLike) -> ZetaExpression:
        other = _coerce(other)
        return ZetaExpression(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self) -> ZetaExpression:
        return ZetaExpression({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: ZetaExpression | RationalLike) -> ZetaExpression:
        return self + (-_coerce(other))

    def __rsub__(self, other: RationalLike) -> ZetaExpression:
        return _coerce(other) - self

    def __mul__(self, other: ZetaExpression | RationalLike) -> ZetaExpression:
        if isinstance(other, (int, Fraction)):
            return scale(other, self)
        if not isinstance(other, ZetaExpression):
            return NotImplemented
        return multiply(self, other)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"ZetaExpression({render(self)!r})"

    def __str__(self) -> str:
        return render(self)


ZERO = ZetaExpression()
ONE = ZetaExpression({UNIT: 1})


def constant(q: RationalLike) -> ZetaExpression:
    return ZetaExpression({UNIT: q})


def _coerce(x: ZetaExpression | RationalLike) -> ZetaExpression:
    if isinstance(x, ZetaExpression):
        return x
    if isinstance(x, (int, Fraction)):
        return constant(x)
    raise TypeError(f"cannot combine ZetaExpression with {type(x).__name__}")


def zeta_symbol(k: int) -> ZetaExpression:
    """Canonical form of zeta(k): a monomial for odd k, c*pi**k for even k."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise DomainError(f"zeta(k) requires an integer k >= 2 (zeta(1) diverges), got {k!r}")
    if k % 2:
        return ZetaExpression({ZetaMonomial(0, (k,)): 1})
    return ZetaExpression({ZetaMonomial(k, ()): even_zeta_coefficient(k)})


def add(a: ZetaExpression, b: ZetaExpression) -> ZetaExpression:
    return a + b


def scale(q: RationalLike, a: ZetaExpression) -> ZetaExpression:
    q = Fraction(q)
    return ZetaExpression({m: q * c for m, c in a.items()})


def multiply(a: ZetaExpression, b: ZetaExpression) -> ZetaExpression:
    out = []
    for ma, ca in a.items():
        for mb, cb in b.items():
            out.append((ma * mb, ca * cb))
    return ZetaExpression(out)


def mu_expression(r: int, j: int) -> ZetaExpression:
    """sum_{n>=1} 1 / (n**r (n+j)) by partial fractions.

    = sum_{k=1}^{r-1} (-1)**(k-1) / j**k * zeta(r+1-k) - (-1)**r * H_j / j**r
    """
    if isinstance(r, bool) or not isinstance(r, int) or r < 2:
        raise DomainError(f"mu(r, j) requires r >= 2 (mu(1, j) needs zeta(1)), got r={r!r}")
    if isinstance(j, bool) or not isinstance(j, int) or j < 1:
        raise DomainError(f"mu(r, j) requires j >= 1, got j={j!r}")
    out = ZERO
    for k in range(1, r):
        out = out + scale(Fraction((-1) ** (k - 1), j**k), zeta_symbol(r + 1 - k))
    return out - (-1) ** r * harmonic(j) / Fraction(j**r)


def harmonic_zeta_expression(m: int) -> ZetaExpression:
    """Linear Euler sum sum_{n>=1} H_n / n**m via Euler's reduction.

    (1 + m/2) zeta(m+1) - 1/2 sum_{k=1}^{m-2} zeta(k+1) zeta(m-k)
    """
    if isinstance(m, bool) or not isinstance(m, int) or m < 2:
        raise DomainError(f"sum H_n/n^m diverges unless m >= 2, got m={m!r}")
    out = scale(1 + Fraction(m, 2), zeta_symbol(m + 1))
    for k in range(1, m - 1):
        out = out - scale(Fraction(1, 2), zeta_symbol(k + 1) * zeta_symbol(m - k))
    return out


def sigma_closed_form(r: int, m: int) -> ZetaExpression:
    """Exact sigma(r, m) = sum_{n>=1} H_n^(r) / n**m for m > r >= 1."""
    if isinstance(r, bool) or not isinstance(r, int) or r < 1:
        raise DomainError(f"sigma(r, m) requires r >= 1, got r={r!r}")
    if isinstance(m, bool) or not isinstance(m, int) or m <= r:
        raise DomainError(f"sigma(r, m) converges only for m > r, got r={r}, m={m!r}")
    h = harmonic(r - 1)
    total = ZERO
    for k in range(1, r + 1):
        s = m - k + 1
        inner = harmonic_zeta_expression(s) - scale(h, zeta_symbol(s))
        for j in range(1, r):
            inner = inner + mu_expression(s, j)
        total = total + scale(stirling_first(r, k), inner)
    return scale(Fraction(1, factorial(r - 1)), total)


def evaluate(a: ZetaExpression, precision: int) -> mpmath.mpf:
    """Numeric value with relative error at most 2**(GUARD_BITS - precision).

    The sum is formed at raised working precision; if the terms cancel more
    bits than were reserved the evaluation is repeated with more headroom.
    """
    check_precision(precision)
    if not a:
        return context(precision).mpf(0)
    extra = 16
    for _ in range(12):
        wp = precision + GUARD_BITS + extra
        ctx = context(wp)
        pi = ctx.mpf(pi_numeric(wp))
        zetas: dict[int, mpmath.mpf] = {}
        parts = []
        for mono, coef in a.items():
            v = ctx.mpf(coef.numerator) / coef.denominator * pi**mono.pi_power
            for s in mono.odd_args:
                if s not in zetas:
                    zetas[s] = ctx.mpf(zeta_numeric(s, wp))
                v *= zetas[s]
            parts.append(v)
        total = ctx.fsum(parts)
        magnitude = ctx.fsum(abs(p) for p in parts)
        # bits lost to cancellation ~ log2(magnitude / |total|)
        if total != 0 and magnitude <= abs(total) * ctx.ldexp(1, extra - 4):
            return +context(precision).mpf(total)
        extra *= 2
    raise ArithmeticError("evaluation did not reach the requested relative accuracy")


class Basis(str, enum.Enum):
    pi_canonical = "pi_canonical"
    zeta_display = "zeta_display"


def _format_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _factors(mono: ZetaMonomial, basis: Basis) -> list[str]:
    out = []
    if mono.pi_power:
        if basis is Basis.zeta_display:
            out.append(f"zeta({mono.pi_power})")
        else:
            out.append(f"pi^{mono.pi_power}")
    out.extend(f"zeta({s})" for s in mono.odd_args)
    return out


def render(a: ZetaExpression, basis: Basis | str = Basis.pi_canonical) -> str:
    basis = Basis(basis)
    if not a:
        return "0"
    items = list(a.items())
    if basis is Basis.zeta_display:
        items.reverse()
    pieces = []
    for idx, (mono, coef) in enumerate(items):
        if basis is Basis.zeta_display and mono.pi_power:
            coef = coef / even_zeta_coefficient(mono.pi_power)
        factors = _factors(mono, basis)
        mag = abs(coef)
        if not factors:
            body = _format_coef(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coef(mag)] + factors)
        if idx == 0:
            pieces.append(("-" if coef < 0 else "") + body)
        else:
            pieces.append((" - " if coef < 0 else " + ") + body)
    return "".join(pieces)


_TERM_SPLIT = re.compile(r"\s+([+-])\s+")
_COEF = re.compile(r"^(\d+)(?:/(\d+))?$")
_PI = re.compile(r"^pi\^(\d+)$")
_ZETA = re.compile(r"^zeta\((\d+)\)$")


def parse(text: str) -> ZetaExpression:
    """Inverse of :func:`render` for either basis."""
    text = text.strip()
    if text == "0":
        return ZERO
    sign = 1
    if text.startswith("-"):
        sign, text = -1, text[1:]
    chunks = _TERM_SPLIT.split(text)
    signs = [sign] + [1 if s == "+" else -1 for s in chunks[1::2]]
    total = ZERO
    for sgn, term in zip(signs, chunks[0::2]):
        value = constant(sgn)
        for factor in term.split("*"):
            factor = factor.strip()
            if mc := _COEF.match(factor):
                value = scale(Fraction(int(mc[1]), int(mc[2] or 1)), value)
            elif mp := _PI.match(factor):
                k = int(mp[1])
                value = value * ZetaExpression({ZetaMonomial(k, ()): 1})
            elif mz := _ZETA.match(factor):
                value = value * zeta_symbol(int(mz[1]))
            else:
                raise DomainError(f"cannot parse factor {factor!r} in {text!r}")
        total = total + value
    return total
