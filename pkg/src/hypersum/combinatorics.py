"""Exact rational combinatorics: harmonic and hyperharmonic numbers,
binomials, factorials, Stirling numbers of the first kind, Bernoulli numbers.

Rationals are :class:`fractions.Fraction` (always reduced), naturals are ``int``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError

__all__ = [
    "harmonic",
    "harmonic_list",
    "hyperharmonic_recursive",
    "hyperharmonic_table",
    "hyperharmonic_conway_guy",
    "binomial",
    "factorial",
    "stirling_first",
    "stirling_row",
    "bernoulli",
]


def _check_int(name: str, value: int, minimum: int) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")


def harmonic(n: int) -> Fraction:
    """H_n = 1 + 1/2 + ... + 1/n, with H_0 = 0."""
    _check_int("n", n, 0)
    total = Fraction(0)
    for k in range(1, n + 1):
        total += Fraction(1, k)
    return total


def harmonic_list(n: int) -> list[Fraction]:
    """[H_0, H_1, ..., H_n]."""
    _check_int("n", n, 0)
    out = [Fraction(0)]
    for k in range(1, n + 1):
        out.append(out[-1] + Fraction(1, k))
    return out


def hyperharmonic_table(n_max: int, r_max: int) -> list[list[Fraction]]:
    """Rows ``table[r][n-1] = H_n^(r)`` for 0 <= r <= r_max, 1 <= n <= n_max.

    Built by repeated prefix sums starting from H_n^(0) = 1/n.
    """
    _check_int("n_max", n_max, 1)
    _check_int("r_max", r_max, 0)
    row = [Fraction(1, k) for k in range(1, n_max + 1)]
    table = [row]
    for _ in range(r_max):
        acc = Fraction(0)
        nxt = []
        for v in row:
            acc += v
            nxt.append(acc)
        table.append(nxt)
        row = nxt
    return table


def hyperharmonic_recursive(n: int, r: int) -> Fraction:
    """H_n^(r) from the defining recursion H_n^(r) = sum_{k<=n} H_k^(r-1)."""
    _check_int("n", n, 1)
    _check_int("r", r, 0)
    return hyperharmonic_table(n, r)[r][n - 1]


def hyperharmonic_conway_guy(n: int, r: int) -> Fraction:
    """H_n^(r) = C(n+r-1, r-1) * (H_{n+r-1} - H_{r-1}) for r >= 1."""
    _check_int("n", n, 1)
    _check_int("r", r, 1)
    tail = Fraction(0)
    for k in range(r, n + r):
        tail += Fraction(1, k)
    return math.comb(n + r - 1, r - 1) * tail


def binomial(n: int, k: int) -> int:
    """Binomial coefficient, 0 when k > n."""
    _check_int("n", n, 0)
    _check_int("k", k, 0)
    return math.comb(n, k)


def factorial(n: int) -> int:
    _check_int("n", n, 0)
    return math.factorial(n)


def stirling_row(r: int) -> list[int]:
    """Unsigned Stirling numbers [s(r,0), s(r,1), ..., s(r,r)]."""
    _check_int("r", r, 0)
    row = [1]
    for i in range(r):
        # s(i+1, k) = i*s(i, k) + s(i, k-1)
        nxt = [0] * (i + 2)
        for k, v in enumerate(row):
            nxt[k] += i * v
            nxt[k + 1] += v
        row = nxt
    return row


def stirling_first(r: int, k: int) -> int:
    """Unsigned Stirling number of the first kind: permutations of r with k cycles."""
    _check_int("r", r, 1)
    _check_int("k", k, 1)
    if k > r:
        raise DomainError(f"stirling_first requires 1 <= k <= r, got r={r}, k={k}")
    return stirling_row(r)[k]


@lru_cache(maxsize=None)
def _bernoulli_upto(n: int) -> tuple[Fraction, ...]:
    values = [Fraction(1)]
    for m in range(1, n + 1):
        s = sum((math.comb(m + 1, j) * values[j] for j in range(m)), Fraction(0))
        values.append(-s / (m + 1))
    return tuple(values)


def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n with B_1 = -1/2."""
    _check_int("n", n, 0)
    return _bernoulli_upto(n)[n]
