"""Tanh-sinh quadrature on [0, 1] and the integral routes for sigma(r, m).

The substitution u = 1 - exp(-t) turns

    sigma(r, m) = -1/(m-1)! * int_0^inf t**(m-1) ln(1 - e**-t) / (1 - e**-t)**r dt

into -1/(m-1)! * int_0^1 (-ln(1-u))**(m-1) ln(u) / (u**r (1-u)) du, whose
endpoint singularities (u**(m-1-r) ln u at 0, logarithmic at 1) are the kind
double-exponential quadrature handles.

Nodes are generated with both u and 1 - u computed independently, so that
integrands never form 1 - u by subtraction near u = 1.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable

import mpmath

from ..combinatorics import factorial
from ..errors import DomainError
from .series import SeriesResult, check_sigma_args
from .zeta import GUARD_BITS, check_precision, context

__all__ = [
    "QuadratureResult",
    "SMALL_T",
    "tanh_sinh",
    "integrand",
    "u_integrand",
    "sigma_integral",
    "raw_integral",
    "corollary2_inner_integral",
    "corollary2_partial_sums",
    "sigma_corollary2_partial",
    "corollary2_run",
]

#: Below this t the integrand is evaluated in factored form.
SMALL_T = 2.0**-10
MAX_LEVEL = 12


@dataclass(frozen=True)
class QuadratureResult:
    value: mpmath.mpf
    error_estimate: mpmath.mpf
    evaluations: int
    level: int
    precision: int


# (working precision, level) -> nodes new at that level as (u, 1-u, weight/h)
_NODE_CACHE: dict[tuple[int, int], list[tuple[mpmath.mpf, mpmath.mpf, mpmath.mpf]]] = {}
_NODE_LOCK = threading.Lock()


def _t_max(wp: int) -> float:
    # beyond this the smaller of u, 1-u is below 2**(-2 wp - 64)
    return math.asinh((2 * wp + 64) * math.log(2) / math.pi)


def _level_nodes(wp: int, level: int):
    key = (wp, level)
    with _NODE_LOCK:
        nodes = _NODE_CACHE.get(key)
    if nodes is not None:
        return nodes
    ctx = context(wp)
    h = ctx.ldexp(1, -level)
    kmax = int(_t_max(wp) * 2**level) + 1
    if level == 0:
        ks = range(0, kmax + 1)
    else:
        ks = range(1, kmax + 1, 2)
    nodes = []
    halfpi = ctx.pi / 2
    for k in ks:
        t = k * h
        s = ctx.pi * ctx.sinh(t)
        # u = logistic(-s), 1 - u = logistic(s); both formed without subtraction
        lo = 1 / (1 + ctx.exp(s))
        hi = 1 / (1 + ctx.exp(-s))
        w = 2 * halfpi * ctx.cosh(t) * lo * hi
        nodes.append((lo, hi, w))
    with _NODE_LOCK:
        _NODE_CACHE.setdefault(key, nodes)
    return nodes


def _level_sum(f, ctx, wp: int, level: int) -> tuple[mpmath.mpf, mpmath.mpf, int]:
    total = ctx.mpf(0)
    magnitude = ctx.mpf(0)
    count = 0
    for lo, hi, w in _level_nodes(wp, level):
        if level == 0 and lo == hi:
            v = f(lo, hi) * w
            total += v
            magnitude += abs(v)
            count += 1
            continue
        a = f(lo, hi) * w
        b = f(hi, lo) * w
        total += a + b
        magnitude += abs(a) + abs(b)
        count += 2
    return total, magnitude, count


def tanh_sinh(f: Callable, precision: int, *, min_level: int = 3,
              max_level: int = MAX_LEVEL) -> QuadratureResult:
    """Integrate ``f(u, 1-u)`` over (0, 1).

    Levels halve the step; each level reuses all earlier nodes.  The error
    estimate is the change from the previous level plus a rounding floor
    proportional to the sum of absolute contributions.
    """
    check_precision(precision)
    wp = precision + GUARD_BITS + 16
    ctx = context(wp)
    running = ctx.mpf(0)
    mag = ctx.mpf(0)
    evals = 0
    prev = None
    target = ctx.ldexp(1, -(precision + 4))
    for level in range(0, max_level + 1):
        s, a, c = _level_sum(f, ctx, wp, level)
        running += s
        mag += a
        evals += c
        estimate = ctx.ldexp(running, -level)
        if prev is not None and level >= min_level:
            diff = abs(estimate - prev)
            if diff <= target * abs(estimate) or level == max_level:
                break
        prev = estimate
    floor = ctx.ldexp(mag, -level) * ctx.ldexp(evals, -wp)
    err = abs(estimate - prev) + floor
    out = context(precision)
    return QuadratureResult(
        value=+out.mpf(estimate),
        error_estimate=+out.mpf(err),
        evaluations=evals,
        level=level,
        precision=precision,
    )


def integrand(t, m: int, r: int, precision: int = 128) -> mpmath.mpf:
    """t**(m-1) ln(1 - e**-t) / (1 - e**-t)**r for t > 0.

    For t < SMALL_T it uses q = (1 - e**-t)/t:  t**(m-1-r) (ln t + ln q) / q**r.
    """
    check_precision(precision)
    ctx = context(precision + GUARD_BITS)
    t = ctx.mpf(t)
    if not t > 0:
        raise DomainError(f"integrand requires t > 0, got {t}")
    if t < SMALL_T:
        q = -ctx.expm1(-t) / t
        value = t ** (m - 1 - r) * (ctx.log(t) + ctx.log(q)) / q**r
    else:
        e = ctx.exp(-t)
        one_minus = -ctx.expm1(-t)
        # log1p keeps ln(1 - e**-t) ~ -e**-t accurate for large t
        log_term = ctx.log1p(-e) if t > 0.5 else ctx.log(one_minus)
        value = t ** (m - 1) * log_term / one_minus**r
    return +context(precision).mpf(value)


def _neg_log_complement(ctx, u, v):
    # -ln(1 - u) given v = 1 - u
    return -ctx.log1p(-u) if u < 0.5 else -ctx.log(v)


def _log_u(ctx, u, v):
    return ctx.log(u) if u < 0.5 else ctx.log1p(-v)


def u_integrand(ctx, m: int, r: int) -> Callable:
    """f(u, 1-u) = (-ln(1-u))**(m-1) ln(u) / (u**r (1-u))."""

    def f(u, v):
        return _neg_log_complement(ctx, u, v) ** (m - 1) * _log_u(ctx, u, v) / (u**r * v)

    return f


def raw_integral(r: int, m: int, precision: int = 128, **kwargs) -> QuadratureResult:
    """int_0^inf t**(m-1) ln(1 - e**-t) / (1 - e**-t)**r dt  (negative)."""
    check_sigma_args(r, m)
    check_precision(precision)
    ctx = context(precision + GUARD_BITS + 16)
    return tanh_sinh(u_integrand(ctx, m, r), precision, **kwargs)


def sigma_integral(r: int, m: int, precision: int = 128, **kwargs) -> QuadratureResult:
    """sigma(r, m) = -raw_integral(r, m) / (m-1)!."""
    raw = raw_integral(r, m, precision, **kwargs)
    ctx = context(precision)
    g = factorial(m - 1)
    return QuadratureResult(
        value=-raw.value / g,
        error_estimate=raw.error_estimate / g + abs(raw.value) / g * ctx.ldexp(1, 1 - precision),
        evaluations=raw.evaluations,
        level=raw.level,
        precision=precision,
    )


def _check_inner_args(n: int, m: int, r: int) -> None:
    for name, v, lo in (("n", n, 1), ("r", r, 1), ("m", m, 1)):
        if isinstance(v, bool) or not isinstance(v, int) or v < lo:
            raise DomainError(f"{name} must be an integer >= {lo}, got {v!r}")
    if m < r:
        # near t = 0 the integrand behaves like t**(m-r)
        raise DomainError(f"inner integral diverges at t = 0 unless m >= r, got m={m}, r={r}")


def _inner_f(ctx, n: int, m: int, r: int) -> Callable:
    def f(u, v):
        lv = ctx.log1p(-u) if u < 0.5 else ctx.log(v)
        return (-lv) ** (m - 1) * ctx.exp((n - 1) * lv) / u ** (r - 1)

    return f


def corollary2_inner_integral(n: int, m: int, r: int, precision: int = 128,
                              **kwargs) -> QuadratureResult:
    """int_0^inf t**(m-1) e**(-n t) / (1 - e**-t)**(r-1) dt by tanh-sinh in u."""
    _check_inner_args(n, m, r)
    check_precision(precision)
    ctx = context(precision + GUARD_BITS + 16)
    return tanh_sinh(_inner_f(ctx, n, m, r), precision, **kwargs)


def _corollary2_tail(r: int, m: int, N: int) -> float:
    # term_n = H_n * sum_j C(j+r-2, r-2) (n+j)**(-m) and C(j+r-2, r-2) <= (n+j)**(r-2)
    s = m - r + 1
    c = 1.0 if r == 1 else 1 / s + 1 / (N + 1)
    s = m if r == 1 else s
    return (1 + 2.0**-40) * c * N ** (1 - s) / (s - 1) * (1 + math.log(N) + 1 / (s - 1))


class _InnerSeriesSweep:
    """Running partial sums (1/(m-1)!) sum_{n<=k} H_n I_n for k = 1..N.

    One tanh-sinh node set serves every n: only the factor (1-u)**(n-1)
    changes with n, and it is updated in place by one multiplication.
    Level-(L-1) sums use every other node and give a per-n error estimate.
    All accumulation is binary fixed point at scale 2**P with floor rounding.
    """

    def __init__(self, r: int, m: int, N: int, precision: int):
        self.r, self.m, self.N, self.precision = r, m, N, precision
        wp = precision + GUARD_BITS + 16
        level = max(
            corollary2_inner_integral(1, m, r, precision).level,
            corollary2_inner_integral(N, m, r, precision).level,
            1,
        )
        ctx = context(wp)
        f = _inner_f(ctx, 1, m, r)  # n = 1: no (1-u) factor
        self.P = P = precision + 32 + 2 * N.bit_length()
        self.ctx = ctx
        self.inv_gamma = ctx.mpf(1) / factorial(m - 1)
        h = ctx.ldexp(1, -level)
        nodes = []  # [g*w*h fixed, (1-u) fixed, node is on level L-1 grid]
        g_max = ctx.mpf(0)
        for lev in range(level + 1):
            step = 1 << (level - lev)
            for idx, (lo, hi, w) in enumerate(_level_nodes(wp, lev)):
                k = idx if lev == 0 else 2 * idx + 1
                on_coarse = (k * step) % 2 == 0
                pairs = [(lo, hi)] if (lev == 0 and k == 0) else [(lo, hi), (hi, lo)]
                for u, v in pairs:
                    gw = f(u, v) * w * h
                    g_max = max(g_max, gw)
                    nodes.append((int(ctx.ldexp(gw, P)), int(ctx.ldexp(v, P)), on_coarse))
        self.nodes = nodes
        self.level = level
        self.g_max = float(g_max)

    def __iter__(self):
        """Yield (n, partial sum fixed, error-estimate sum fixed)."""
        P = self.P
        one = 1 << P
        nodes = list(self.nodes)
        p = [one] * len(nodes)
        h_fixed = 0
        acc = 0
        err_acc = 0
        self.first_inner = None
        for n in range(1, self.N + 1):
            h_fixed += one // n
            fine = 0
            coarse = 0
            keep = []
            for i, (g, v, on_coarse) in enumerate(nodes):
                c = g * p[i] >> P
                if c == 0:
                    # p only decreases, so this node stays below one ulp
                    continue
                fine += c
                if on_coarse:
                    coarse += c
                p[i] = p[i] * v >> P
                keep.append(i)
            if len(keep) != len(nodes):
                nodes = [nodes[i] for i in keep]
                p = [p[i] for i in keep]
            if self.first_inner is None:
                self.first_inner = fine
            acc += h_fixed * fine >> P
            err_acc += h_fixed * abs(fine - 2 * coarse) >> P
            yield n, acc, err_acc

    def rounding_bound(self) -> float:
        """Bound, in units of 2**-P, on the fixed-point error of the full sum.

        (1-u)**(n-1) carries <= 2n ulps, each node term <= 2n*g_max + 3 ulps
        (dropped nodes included), H_n carries <= n ulps.
        """
        N = self.N
        per_inner = len(self.nodes) * (2 * N * self.g_max + 3)
        inner_max = self.first_inner / 2.0**self.P + 1
        return N * ((1 + math.log(N)) * per_inner + N * inner_max + 1)

    def to_real(self, fixed: int) -> mpmath.mpf:
        ctx = context(self.precision)
        return +ctx.mpf(self.ctx.ldexp(fixed, -self.P) * self.inv_gamma)


def corollary2_partial_sums(r: int, m: int, N: int, precision: int = 128) -> list[mpmath.mpf]:
    """Every partial sum (1/(m-1)!) sum_{n<=k} H_n I_n for k = 1..N."""
    check_sigma_args(r, m)
    _check_n(N)
    check_precision(precision)
    sweep = _InnerSeriesSweep(r, m, N, precision)
    return [sweep.to_real(acc) for _, acc, _ in sweep]


def _check_n(N: int) -> None:
    if isinstance(N, bool) or not isinstance(N, int) or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")


def corollary2_run(r: int, m: int, N: int, precision: int = 128) -> tuple[SeriesResult, list[mpmath.mpf]]:
    """One sweep giving both the final SeriesResult and all N partial sums."""
    check_sigma_args(r, m)
    _check_n(N)
    check_precision(precision)
    sweep = _InnerSeriesSweep(r, m, N, precision)
    partials = []
    for _, acc, err_acc in sweep:
        partials.append(sweep.to_real(acc))
    ctx = context(precision)
    value = partials[-1]
    tail = (
        ctx.mpf(_corollary2_tail(r, m, N))
        + sweep.to_real(err_acc)
        + ctx.ldexp(ctx.mpf(sweep.rounding_bound()), -sweep.P) * sweep.inv_gamma
        + abs(value) * ctx.ldexp(1, 1 - precision)
    )
    result = SeriesResult(value=value, tail_bound=tail, terms_used=N, tol_met=True, precision=precision)
    return result, partials


def sigma_corollary2_partial(r: int, m: int, N: int, precision: int = 128) -> SeriesResult:
    """(1/(m-1)!) sum_{n=1}^N H_n I_n with I_n the inner integral.

    tail_bound = analytic tail over n > N + accumulated per-n quadrature
    error estimates + fixed-point rounding.
    """
    return corollary2_run(r, m, N, precision)[0]
