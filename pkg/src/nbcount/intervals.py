"""Confidence limits on a mean count N given a single observed count n.

Several constructions are provided:

* ``pivot``: invert the large-mean asymptote of the normalized quantile,
  a quadratic in N with a closed-form root.
* ``direct``: invert the smoothed quantile itself (also a quadratic in N).
* ``poisson_closed_form``: the ``s = 0`` case of ``direct``, which is a
  quadratic in sqrt(N).
* ``chi_square``: the classical Garwood interval for Poisson counts.
* ``ogden``: the pivot algebra with fixed empirical constants (2.0, 1.5).

Limits that depend only on ``n`` accept numpy arrays as well as scalars
wherever the algebra is closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError, RegimeError
from .nbapprox import pivot_limit
from .specfun import chi_square_quantile, normal_quantile

__all__ = [
    "Method",
    "IntervalResult",
    "EnvelopeBand",
    "SMALL_COUNT",
    "PIVOT_MIN_TRSD",
    "lcl_pivot",
    "ucl_pivot",
    "two_sided",
    "ci_direct",
    "poisson_mean_from_count",
    "poisson_closed_form_ci",
    "chi_square_ci",
    "ogden_ci",
    "scatter_envelope",
    "two_sided_envelope",
]

# counts below this only give suggestive limits
SMALL_COUNT = 5
# below this TRSD the pivot asymptote is not reached and `direct` is used instead
PIVOT_MIN_TRSD = 0.2


class Method(str, Enum):
    PIVOT = "pivot"
    DIRECT = "direct"
    POISSON_CLOSED_FORM = "poisson_closed_form"
    CHI_SQUARE = "chi_square"
    OGDEN = "ogden"


@dataclass(frozen=True)
class IntervalResult:
    lower: float
    upper: float
    level: float
    method: Method
    flags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper:
            raise ValueError(f"invalid interval ({self.lower}, {self.upper})")

    def rounded(self) -> tuple[int, int]:
        """Limits rounded half-up to whole counts, as in printed tables."""
        return _round_half_up(self.lower), _round_half_up(self.upper)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class EnvelopeBand:
    """Approximate bounds of the discreteness scatter of an achieved level."""

    center: float
    half_width: float

    @property
    def lower(self) -> float:
        return self.center - self.half_width

    @property
    def upper(self) -> float:
        return self.center + self.half_width

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def _quadratic_limit(n, l: float, s: float, sign: int):
    a = 1.0 - (l * s) ** 2
    if a <= 0.0:
        raise RegimeError(f"pivot constant {l:.4g} with s={s} gives l^2 s^2 >= 1")
    n = np.asarray(n, dtype=float)
    if np.any(n < 0):
        raise DomainError("counts must be nonnegative")
    l2 = l * l
    disc = (2.0 * n + l2) ** 2 - 4.0 * a * n * n
    # disc = 4 n l^2 (1 + n s^2) + l^4 >= 0
    assert np.all(disc >= 0.0)
    out = (2.0 * n + l2 + sign * np.sqrt(disc)) / (2.0 * a)
    if sign < 0:
        out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def _constant(b: float, s: float, limit: float | None, decimals: int | None) -> float:
    l = pivot_limit(b, s) if limit is None else limit
    if decimals is not None:
        l = round(l, decimals)
    return l


def lcl_pivot(n, s: float, b: float, *, limit: float | None = None, limit_decimals: int | None = None):
    """Lower confidence limit at one-sided confidence ``b``.

    ``limit`` overrides the pivot constant (default ``pivot_limit(b, s)``);
    ``limit_decimals`` rounds the constant first, which is how printed
    tables of these limits were produced.
    """
    if not 0.5 < b < 1.0:
        raise DomainError(f"one-sided confidence must lie in (0.5, 1), got {b!r}")
    return _quadratic_limit(n, _constant(b, s, limit, limit_decimals), s, -1)


def ucl_pivot(n, s: float, b: float, *, limit: float | None = None, limit_decimals: int | None = None):
    """Upper confidence limit at one-sided confidence ``b`` (constant from level 1 - b)."""
    if not 0.5 < b < 1.0:
        raise DomainError(f"one-sided confidence must lie in (0.5, 1), got {b!r}")
    return _quadratic_limit(n, _constant(1.0 - b, s, limit, limit_decimals), s, +1)


def _direct_root(n: float, s: float, b: float) -> float | None:
    # Solve N + z sigma(N) + c (1 + 2 N s^2) = n with c = (z^2 - 1)/6.
    # With k = 1 + 2 c s^2, m = n - c this is m - k N = z sigma(N); squaring
    # gives (k^2 - z^2 s^2) N^2 - (2 m k + z^2) N + m^2 = 0.  The branch with
    # sign(m - k N) == sign(z) is the one where the quantile increases with N.
    z = normal_quantile(b)
    c = (z * z - 1.0) / 6.0
    k = 1.0 + 2.0 * c * s * s
    m = n - c
    A = k * k - (z * s) ** 2
    B = 2.0 * m * k + z * z
    C = m * m
    if A <= 0.0:
        raise RegimeError(f"no increasing branch for z={z:.4g}, s={s}")
    if z == 0.0:
        return m / k if m >= 0.0 else None
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        if disc > -1e-12 * B * B:
            disc = 0.0
        else:
            return None
    root = math.sqrt(disc)
    if z > 0.0:
        if m < 0.0:
            return None
        return max((B - root) / (2.0 * A), 0.0)
    N = (B + root) / (2.0 * A)
    return N if N > 0.0 else None


def ci_direct(n: float, s: float, b: float) -> float:
    """Mean N at which the smoothed ``b``-quantile equals ``n``.

    ``b > 0.5`` gives a lower limit, ``b < 0.5`` an upper limit.  A lower
    limit with no admissible root (tiny ``n``) is returned as 0.
    """
    if not n >= 0:
        raise DomainError(f"count must be nonnegative, got {n!r}")
    if not 0.0 < b < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {b!r}")
    if not 0.0 <= s < 1.0:
        raise DomainError(f"trsd must lie in [0, 1), got {s!r}")
    N = _direct_root(float(n), s, b)
    if N is None:
        if b >= 0.5:
            return 0.0
        raise RegimeError(f"no upper limit for n={n}, s={s}, b={b}")
    return N


def poisson_mean_from_count(n, z: float):
    """Poisson mean whose smoothed quantile at normal deviate ``z`` equals ``n``."""
    n = np.asarray(n, dtype=float)
    if np.any(n < 0):
        raise DomainError("counts must be nonnegative")
    root = -0.5 * z + 0.5 * np.sqrt(z * z / 3.0 + 2.0 / 3.0 + 4.0 * n)
    out = np.maximum(root, 0.0) ** 2
    return float(out) if out.ndim == 0 else out


def _check_two_sided(level: float) -> float:
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {level!r}")
    return 0.5 * (1.0 + level)


def _count_flags(n: float) -> frozenset:
    return frozenset({"small_count"}) if n < SMALL_COUNT else frozenset()


def poisson_closed_form_ci(n: float, level: float) -> IntervalResult:
    b = _check_two_sided(level)
    z = normal_quantile(b)
    lo = poisson_mean_from_count(n, z)
    hi = poisson_mean_from_count(n, -z)
    flags = _count_flags(n)
    if lo == 0.0 and n > 0:
        flags = flags | {"lower_clamped"}
    return IntervalResult(lo, hi, 2.0 * b - 1.0, Method.POISSON_CLOSED_FORM, flags)


def chi_square_ci(n: int, level: float) -> IntervalResult:
    """Garwood interval: chi-square quantiles at the tail probabilities, halved."""
    if not n >= 0:
        raise DomainError(f"count must be nonnegative, got {n!r}")
    b = _check_two_sided(level)
    lo = 0.0 if n == 0 else 0.5 * chi_square_quantile(2.0 * n, 1.0 - b)
    hi = 0.5 * chi_square_quantile(2.0 * (n + 1), b)
    return IntervalResult(lo, hi, 2.0 * b - 1.0, Method.CHI_SQUARE, _count_flags(n))


def ogden_ci(n: float, s: float, c_lower: float = 2.0, c_upper: float = 1.5) -> IntervalResult:
    """Pivot-style interval with fixed empirical constants.

    The defaults reproduce the published NIOSH 7400 / ASTM D7201 formulas,
    2.0 in the lower limit and 1.5 in the upper limit.  The nominal level
    is 90% two-sided (95% each side).
    """
    lo = _quadratic_limit(n, c_lower, s, -1)
    hi = _quadratic_limit(n, c_upper, s, +1)
    return IntervalResult(lo, hi, 0.90, Method.OGDEN, _count_flags(n))


def default_method(s: float) -> Method:
    return Method.PIVOT if s >= PIVOT_MIN_TRSD else Method.DIRECT


def two_sided(
    n: float,
    s: float,
    level: float,
    method: Method | str | None = None,
    *,
    limit_decimals: int | None = None,
) -> IntervalResult:
    """Two-sided interval at ``level``; each one-sided limit uses b = (1 + level)/2.

    With ``method=None`` the pivot is used for ``s >= 0.2`` and direct
    inversion otherwise.
    """
    b = _check_two_sided(level)
    if not n >= 0:
        raise DomainError(f"count must be nonnegative, got {n!r}")
    method = default_method(s) if method is None else Method(method)
    flags = _count_flags(n)

    if method is Method.PIVOT:
        lo = lcl_pivot(n, s, b, limit_decimals=limit_decimals)
        hi = ucl_pivot(n, s, b, limit_decimals=limit_decimals)
        if s < PIVOT_MIN_TRSD:
            flags = flags | {"pivot_below_validated_trsd"}
    elif method is Method.DIRECT:
        lo_root = _direct_root(float(n), s, b)
        lo = 0.0 if lo_root is None else lo_root
        if lo_root is None and n > 0:
            flags = flags | {"lower_no_root"}
        hi = ci_direct(n, s, 1.0 - b)
    elif method is Method.POISSON_CLOSED_FORM:
        if s != 0.0:
            raise DomainError("poisson_closed_form requires s = 0")
        return poisson_closed_form_ci(n, level)
    elif method is Method.CHI_SQUARE:
        if s != 0.0:
            raise DomainError("chi_square requires s = 0")
        return chi_square_ci(int(n), level)
    else:
        return ogden_ci(n, s)
    return IntervalResult(lo, hi, 2.0 * b - 1.0, method, flags)


def scatter_envelope(N: float, s: float, b: float) -> EnvelopeBand:
    """Band of achieved one-sided levels around ``b`` caused by count discreteness.

    Its half-width is half the change in level needed to move the smoothed
    quantile by one count.
    """
    if not N > 0.0:
        raise DomainError(f"mean must be positive, got {N!r}")
    z = normal_quantile(b)
    gauss = math.sqrt(2.0 * math.pi) * math.exp(0.5 * z * z)
    if s > 0.0:
        sigma = math.sqrt(N + (s * N) ** 2)
        half = 0.5 / ((1.0 + z * s / 3.0) * gauss * sigma)
    else:
        half = 0.5 / ((math.sqrt(N) + z / 3.0) * gauss)
    return EnvelopeBand(center=b, half_width=half)


def two_sided_envelope(N: float, s: float, level: float) -> EnvelopeBand:
    """Two-sided band: the one-sided half-widths at b and 1 - b summed."""
    b = _check_two_sided(level)
    half = scatter_envelope(N, s, b).half_width + scatter_envelope(N, s, 1.0 - b).half_width
    return EnvelopeBand(center=level, half_width=half)
