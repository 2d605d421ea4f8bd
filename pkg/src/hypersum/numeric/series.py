"""Truncated series for sigma(r, m) with rigorous tail bounds.

Two routes:

* direct:  sum_{n<=N} H_n^(r) / n**m
* Hurwitz: sum_{n<=N} H_n^(r-1) * zeta(m, n)

Partial sums are accumulated in binary fixed point on Python integers
(scale 2**P with P well above the requested precision).  Every rounding is a
floor, the accumulated rounding error is bounded explicitly and folded into
``tail_bound`` so the reported bound stays rigorous.

Tail bounds (n > N, s = m - r + 1 >= 2):

* C(n+r-1, r-1) <= n**(r-1) / (r-1)! * exp(r(r-1) / (2n))
* H_{n+r-1} - H_{r-1} <= H_n <= 1 + ln n
* (1 + ln x) / x**s is decreasing on x >= 1, so
  sum_{n>N} (1 + ln n) / n**s <= N**(1-s) / (s-1) * (1 + ln N + 1/(s-1))
* zeta(m, n) <= n**(1-m) * (1/(m-1) + 1/n)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from ..errors import DomainError
from .zeta import check_precision, context, zeta_numeric

__all__ = [
    "DEFAULT_TERM_CAP",
    "SeriesResult",
    "direct_tail_bound",
    "hurwitz_tail_bound",
    "terms_for_tolerance",
    "sigma_series_direct",
    "sigma_series_hurwitz",
]

DEFAULT_TERM_CAP = 10**7


@dataclass(frozen=True)
class SeriesResult:
    value: mpmath.mpf
    tail_bound: mpmath.mpf
    terms_used: int
    tol_met: bool
    precision: int

    @property
    def status(self) -> str:
        return "tol_met" if self.tol_met else "term_cap"


def check_sigma_args(r: int, m: int) -> None:
    if isinstance(r, bool) or not isinstance(r, int) or r < 1:
        raise DomainError(f"sigma(r, m) requires an integer r >= 1, got r={r!r}")
    if isinstance(m, bool) or not isinstance(m, int) or m <= r:
        raise DomainError(f"sigma(r, m) converges only for m > r, got r={r}, m={m!r}")


def _log_power_tail(N: int, s: int) -> float:
    # sum_{n>N} (1 + ln n) / n**s
    return N ** (1 - s) / (s - 1) * (1 + math.log(N) + 1 / (s - 1))


def _hyper_growth(N: int, order: int) -> float:
    # max over n > N of H_n^(order) / (n**(order-1) * (1 + ln n)), order >= 1
    return math.exp(order * (order - 1) / (2 * (N + 1))) / math.factorial(order - 1)


# Float bounds are inflated by this factor to cover their own rounding.
_SAFETY = 1 + 2.0**-40


def direct_tail_bound(r: int, m: int, N: int) -> float:
    """Upper bound on sum_{n>N} H_n^(r) / n**m."""
    s = m - r + 1
    return _SAFETY * _hyper_growth(N, r) * _log_power_tail(N, s)


def hurwitz_tail_bound(r: int, m: int, N: int) -> float:
    """Upper bound on sum_{n>N} H_n^(r-1) * zeta(m, n)."""
    c = 1 / (m - 1) + 1 / (N + 1)
    if r == 1:
        # H_n^(0) zeta(m, n) <= c * n**(-m)
        return _SAFETY * c * N ** (1 - m) / (m - 1)
    s = m - r + 1
    return _SAFETY * c * _hyper_growth(N, r - 1) * _log_power_tail(N, s)


def terms_for_tolerance(bound, tol: float, cap: int) -> tuple[int, bool]:
    """Smallest N <= cap with bound(N) <= tol, else (cap, False).

    ``bound`` must be nonincreasing in N, which holds for both tail bounds.
    """
    if bound(1) <= tol:
        return 1, True
    if bound(cap) > tol:
        return cap, False
    lo, hi = 1, 2
    while hi < cap and bound(hi) > tol:
        lo, hi = hi, hi * 2
    hi = min(hi, cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if bound(mid) <= tol:
            hi = mid
        else:
            lo = mid
    return hi, True


def _as_float(tol) -> float:
    t = float(tol)
    if not t > 0:
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    return t


def _finish(acc: int, scale_bits: int, tail: float, rounding_ulps: float,
            N: int, tol_met: bool, precision: int) -> SeriesResult:
    ctx = context(precision)
    value = ctx.ldexp(ctx.mpf(acc), -scale_bits)
    # conversion to `precision` bits costs at most one relative ulp
    err = ctx.mpf(tail) + ctx.ldexp(ctx.mpf(rounding_ulps), -scale_bits) + abs(value) * ctx.ldexp(1, 1 - precision)
    return SeriesResult(value=value, tail_bound=err, terms_used=N, tol_met=tol_met, precision=precision)


def sigma_series_direct(r: int, m: int, tol=1e-10, *, precision: int = 128,
                        term_cap: int = DEFAULT_TERM_CAP) -> SeriesResult:
    """sum_{n<=N} H_n^(r) / n**m with N chosen from the tail bound."""
    check_sigma_args(r, m)
    check_precision(precision)
    tol_f = _as_float(tol)
    N, met = terms_for_tolerance(lambda k: direct_tail_bound(r, m, k), tol_f, term_cap)

    P = precision + 32 + 2 * N.bit_length()
    one = 1 << P
    binom = r  # C(n+r-1, r-1) at n = 1
    tail_h = 0  # fixed point of H_{n+r-1} - H_{r-1}
    acc = 0
    for n in range(1, N + 1):
        tail_h += one // (n + r - 1)
        acc += binom * tail_h // n**m
        binom = binom * (n + r) // (n + 1)
    # per term: n ulps from tail_h times C/n**m <= r, plus one floor
    rounding = N * (r * N + 1)
    return _finish(acc, P, direct_tail_bound(r, m, N), rounding, N, met, precision)


def sigma_series_hurwitz(r: int, m: int, tol=1e-10, *, precision: int = 128,
                         term_cap: int = DEFAULT_TERM_CAP) -> SeriesResult:
    """sum_{n<=N} H_n^(r-1) * zeta(m, n), zeta(m, n) updated by subtraction."""
    check_sigma_args(r, m)
    check_precision(precision)
    tol_f = _as_float(tol)
    N, met = terms_for_tolerance(lambda k: hurwitz_tail_bound(r, m, k), tol_f, term_cap)

    # zeta(m, n) shrinks like n**(1-m) while H grows like n**(r-2) log n
    P = precision + 32 + (r + 2) * N.bit_length()
    one = 1 << P
    zctx = context(P + 16)
    zeta_m = zeta_numeric(m, P + 16)
    z = int(zctx.ldexp(zeta_m, P))  # truncation of a positive value is a floor
    q = r - 1
    acc = 0
    if q == 0:
        for n in range(1, N + 1):
            acc += (one // n) * z >> P
            z -= one // n**m
        h_max = 1.0
        binom_max = 1
    else:
        binom = q  # C(n+q-1, q-1) at n = 1
        tail_h = 0
        h = 0
        for n in range(1, N + 1):
            tail_h += one // (n + q - 1)
            h = binom * tail_h
            acc += h * z >> P
            z -= one // n**m
            binom = binom * (n + q) // (n + 1)
        h_max = float(h >> P) + 1.0
        binom_max = binom
    # per term: H * (n + 1) ulps from z, zeta(m) * C * n ulps from h, plus floors
    zeta_f = float(zeta_m)
    rounding = N * (h_max * (N + 1) + zeta_f * binom_max * N + 2)
    return _finish(acc, P, hurwitz_tail_bound(r, m, N), rounding, N, met, precision)
