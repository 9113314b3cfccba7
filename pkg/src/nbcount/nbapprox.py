"""Closed-form approximation to negative-binomial quantiles.

The log-pmf is expanded to third order about its mode, giving a normal
density with a cubic skewness correction.  Sums over counts are replaced
by integrals with a half-count endpoint correction, which yields simple
expressions for discrete and smoothed quantiles.

Notation used in the code:

``n0``
    continuous mode, ``N (1 - s^2) - 1/2``
``sigma``
    ``sqrt(N + s^2 N^2)``
``skew``
    ``1 + 2 N s^2``; the third log-derivative at the mode is ``skew / sigma**4``
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .nbcore import CountModel
from .specfun import normal_cdf, normal_pdf, normal_quantile

__all__ = [
    "ApproxExpansion",
    "expansion",
    "approx_pdf",
    "approx_pdf_valid",
    "approx_cdf",
    "delta_correction",
    "quantile_discrete",
    "quantile_discrete_raw",
    "quantile_smooth",
    "normalized_quantile",
    "pivot_limit",
]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class ApproxExpansion:
    mode_n0: float
    sigma: float
    cubic_coeff: float
    mode_lowest: float  # N (1 - s^2), the mode before the half-count shift
    skew: float


def expansion(model: CountModel) -> ApproxExpansion:
    N, s = model.mean_count, model.trsd
    variance = N + (s * N) ** 2
    skew = 1.0 + 2.0 * N * s * s
    n00 = N * (1.0 - s * s)
    return ApproxExpansion(
        mode_n0=n00 - 0.5,
        sigma=math.sqrt(variance),
        cubic_coeff=skew / variance ** 2,
        mode_lowest=n00,
        skew=skew,
    )


def _check_level(b: float) -> None:
    if not 0.0 < b < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {b!r}")


def approx_pdf(n, model: CountModel, *, clamp: bool = True):
    """Skew-corrected normal approximation to the pmf at (real) ``n``.

    The density integrates to one exactly because the cubic term is odd
    about the mode.  Far in the lower tail the correction factor turns
    negative; with ``clamp=True`` those values are returned as 0 (see
    :func:`approx_pdf_valid`), with ``clamp=False`` the raw polynomial
    times Gaussian is returned.

    Accepts scalars or numpy arrays.
    """
    ex = expansion(model)
    d = np.asarray(n, dtype=float) - ex.mode_n0
    gauss = _INV_SQRT_2PI / ex.sigma * np.exp(-0.5 * (d / ex.sigma) ** 2)
    factor = 1.0 + ex.cubic_coeff * d ** 3 / 6.0
    if clamp:
        factor = np.maximum(factor, 0.0)
    out = gauss * factor
    return float(out) if out.ndim == 0 else out


def approx_pdf_valid(n, model: CountModel):
    """True where the cubic correction factor of :func:`approx_pdf` is nonnegative."""
    ex = expansion(model)
    d = np.asarray(n, dtype=float) - ex.mode_n0
    ok = 1.0 + ex.cubic_coeff * d ** 3 / 6.0 >= 0.0
    return bool(ok) if ok.ndim == 0 else ok


def approx_cdf(n: float, model: CountModel) -> float:
    """Integral of the unclamped :func:`approx_pdf` from -inf to ``n``, clipped to [0, 1]."""
    ex = expansion(model)
    z = (n - ex.mode_n0) / ex.sigma
    if math.isinf(z):
        return 1.0 if z > 0 else 0.0
    value = normal_cdf(z) - ex.skew / (6.0 * ex.sigma) * normal_pdf(z) * (2.0 + z * z)
    return min(max(value, 0.0), 1.0)


def delta_correction(b: float, model: CountModel) -> float:
    """Offset from ``n0 + z_b sigma`` to the quantile, even in ``z_b``."""
    _check_level(b)
    z = normal_quantile(b)
    return -0.5 + expansion(model).skew * (2.0 + z * z) / 6.0


def quantile_discrete_raw(b: float, model: CountModel) -> int:
    """Approximate integer quantile before the floor at zero (may be negative)."""
    _check_level(b)
    ex = expansion(model)
    z = normal_quantile(b)
    x = ex.mode_n0 + z * ex.sigma + delta_correction(b, model)
    return 1 + math.floor(x)


def quantile_discrete(b: float, model: CountModel) -> int:
    """Approximate smallest integer n with Pr[count <= n] >= b."""
    return max(quantile_discrete_raw(b, model), 0)


def quantile_smooth(b: float, model: CountModel) -> float:
    """Smoothed (averaging) quantile, N + z sigma + (z^2 - 1)(1 + 2 N s^2)/6.

    Not floored; a negative value in the far lower tail of a small mean is
    returned as is.
    """
    _check_level(b)
    N, s = model.mean_count, model.trsd
    z = normal_quantile(b)
    return N + z * model.sd + (z * z - 1.0) * (1.0 + 2.0 * N * s * s) / 6.0


def normalized_quantile(b: float, model: CountModel) -> float:
    """(smoothed quantile - N) / sigma, which tends to :func:`pivot_limit` for large N."""
    return (quantile_smooth(b, model) - model.mean_count) / model.sd


def pivot_limit(b: float, s: float) -> float:
    """Large-mean limit of the normalized quantile: z_b + (z_b^2 - 1) s / 3."""
    _check_level(b)
    z = normal_quantile(b)
    return z + (z * z - 1.0) * s / 3.0
