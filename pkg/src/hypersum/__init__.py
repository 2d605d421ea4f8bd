"""Euler sums of hyperharmonic numbers, sigma(r, m) = sum_{n>=1} H_n^(r) / n**m.

Computed three independent ways: an exact closed form over zeta values,
truncated series with rigorous tail bounds, and tanh-sinh quadrature of an
integral representation.
"""

from .combinatorics import (
    bernoulli,
    binomial,
    factorial,
    harmonic,
    hyperharmonic_conway_guy,
    hyperharmonic_recursive,
    stirling_first,
)
from .errors import DomainError
from .numeric.quadrature import (
    QuadratureResult,
    corollary2_inner_integral,
    integrand,
    sigma_corollary2_partial,
    sigma_integral,
)
from .numeric.series import SeriesResult, sigma_series_direct, sigma_series_hurwitz
from .numeric.zeta import hurwitz_zeta, pi_numeric, zeta_numeric
from .zeta_algebra import (
    ZetaExpression,
    evaluate,
    harmonic_zeta_expression,
    mu_expression,
    render,
    sigma_closed_form,
    zeta_symbol,
)

__version__ = "0.1.0"
