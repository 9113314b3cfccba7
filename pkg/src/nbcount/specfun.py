"""Special-function kernel: log-gamma, regularized incomplete gamma, normal
and chi-square distribution functions.

Everything here works on plain Python floats and has no dependencies
beyond the standard library.

The incomplete gamma function follows the usual split: a power series
below ``x = a + 1`` and a modified-Lentz continued fraction above it.
"""
from __future__ import annotations

import math
from statistics import NormalDist

from .errors import ConvergenceError, DomainError

__all__ = [
    "log_gamma",
    "reg_lower_gamma",
    "reg_upper_gamma",
    "normal_pdf",
    "normal_cdf",
    "normal_quantile",
    "chi_square_cdf",
    "chi_square_quantile",
]

_EPS = 1e-15
_TINY = 1e-300
_MAX_ITER = 10_000
_STD_NORMAL = NormalDist()
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"log_gamma requires 0 < x < inf, got {x!r}")
    return math.lgamma(x)


def _gamma_prefactor(a: float, x: float) -> float:
    # x^a e^-x / Gamma(a), evaluated in log space
    return math.exp(a * math.log(x) - x - math.lgamma(a))


def _lower_gamma_series(a: float, x: float) -> float:
    """P(a, x) by its power series; converges for any x but fast only for x < a + 1."""
    if x == 0.0:
        return 0.0
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * _gamma_prefactor(a, x)
    raise ConvergenceError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _upper_gamma_cfrac(a: float, x: float) -> float:
    """Q(a, x) by continued fraction (modified Lentz); use for x > a + 1."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < _EPS:
            return h * _gamma_prefactor(a, x)
    raise ConvergenceError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def _check_gamma_args(a: float, x: float) -> None:
    if not a > 0.0 or math.isinf(a):
        raise DomainError(f"incomplete gamma requires a > 0, got {a!r}")
    if not x >= 0.0:
        raise DomainError(f"incomplete gamma requires x >= 0, got {x!r}")


def reg_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    _check_gamma_args(a, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return min(_lower_gamma_series(a, x), 1.0)
    return max(1.0 - _upper_gamma_cfrac(a, x), 0.0)


def reg_upper_gamma(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    _check_gamma_args(a, x)
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return max(1.0 - _lower_gamma_series(a, x), 0.0)
    return min(_upper_gamma_cfrac(a, x), 1.0)


def normal_pdf(z: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z)


def normal_cdf(z: float) -> float:
    """Standard normal cdf, accurate in both tails."""
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def normal_quantile(b: float) -> float:
    """Inverse of :func:`normal_cdf` on the open interval (0, 1)."""
    if not 0.0 < b < 1.0:
        raise DomainError(f"normal_quantile requires 0 < b < 1, got {b!r}")
    return _STD_NORMAL.inv_cdf(b)


def chi_square_cdf(x: float, df: float) -> float:
    if not df > 0.0:
        raise DomainError(f"chi-square df must be positive, got {df!r}")
    if x <= 0.0:
        return 0.0
    return reg_lower_gamma(0.5 * df, 0.5 * x)


def chi_square_quantile(df: float, b: float, *, rtol: float = 1e-13, max_iter: int = 500) -> float:
    """Quantile of the chi-square distribution with ``df`` degrees of freedom.

    The root of ``P(df/2, x/2) = b`` is bracketed by doubling and then refined
    with Newton steps that fall back to bisection whenever a step would leave
    the bracket.
    """
    if not df > 0.0 or math.isinf(df):
        raise DomainError(f"chi-square df must be positive, got {df!r}")
    if not 0.0 < b < 1.0:
        raise DomainError(f"chi_square_quantile requires 0 < b < 1, got {b!r}")

    a = 0.5 * df
    # work in y = x/2 so that F(y) = P(a, y)
    lo, hi = 0.0, max(a, 1.0)
    for _ in range(2000):
        if reg_lower_gamma(a, hi) >= b:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise ConvergenceError(f"could not bracket chi-square quantile (df={df}, b={b})")

    log_norm = math.lgamma(a)
    y = 0.5 * (lo + hi)
    for _ in range(max_iter):
        f = reg_lower_gamma(a, y) - b
        if f == 0.0:
            return 2.0 * y
        if f < 0.0:
            lo = y
        else:
            hi = y
        dens = math.exp((a - 1.0) * math.log(y) - y - log_norm) if y > 0.0 else 0.0
        step_ok = False
        if dens > 0.0 and math.isfinite(dens):
            y_new = y - f / dens
            step_ok = lo < y_new < hi
        if not step_ok:
            y_new = 0.5 * (lo + hi)
        if abs(y_new - y) <= rtol * max(y_new, _TINY) or hi - lo <= rtol * max(hi, _TINY):
            return 2.0 * y_new
        y = y_new
    raise ConvergenceError(f"chi-square quantile did not converge (df={df}, b={b})")
