"""Exact negative-binomial count law in the (mean, TRSD) parameterization.

A count with mean ``N`` and large-count relative standard deviation ``s``
has variance ``N + s**2 * N**2``.  For ``s > 0`` this is a negative binomial
with ``r = 1/s**2`` and ``p = N s**2 / (1 + N s**2)``; ``s = 0`` is the
Poisson law and is handled as its own branch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError
from .specfun import log_gamma

__all__ = [
    "CountModel",
    "NBParams",
    "to_nb_params",
    "from_nb_params",
    "variance",
    "rsd_of_count",
    "nb_logpmf",
    "nb_pmf",
    "nb_cdf",
    "nb_quantile_exact",
    "pivot",
]


@dataclass(frozen=True)
class CountModel:
    """Mean count ``mean_count`` (N) and true relative standard deviation ``trsd`` (s)."""

    mean_count: float
    trsd: float = 0.0

    def __post_init__(self):
        if not (self.mean_count > 0.0 and math.isfinite(self.mean_count)):
            raise DomainError(f"mean_count must be positive and finite, got {self.mean_count!r}")
        if not 0.0 <= self.trsd < 1.0:
            raise DomainError(f"trsd must lie in [0, 1), got {self.trsd!r}")

    @property
    def variance(self) -> float:
        return self.mean_count + (self.trsd * self.mean_count) ** 2

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    @property
    def is_poisson(self) -> bool:
        return self.trsd == 0.0


@dataclass(frozen=True)
class NBParams:
    """Classical parameters of P[n] = C(n+r-1, n) (1-p)^r p^n."""

    p: float
    r: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"p must lie in (0, 1), got {self.p!r}")
        if not self.r > 0.0:
            raise DomainError(f"r must be positive, got {self.r!r}")

    @property
    def mean(self) -> float:
        return self.p * self.r / (1.0 - self.p)

    @property
    def variance(self) -> float:
        return self.p * self.r / (1.0 - self.p) ** 2


def to_nb_params(model: CountModel) -> NBParams:
    if model.is_poisson:
        raise DomainError("s = 0 is the Poisson law; it has no finite (p, r)")
    ns2 = model.mean_count * model.trsd ** 2
    return NBParams(p=ns2 / (1.0 + ns2), r=1.0 / model.trsd ** 2)


def from_nb_params(params: NBParams) -> CountModel:
    return CountModel(mean_count=params.mean, trsd=1.0 / math.sqrt(params.r))


def variance(model: CountModel) -> float:
    return model.variance


def rsd_of_count(n: float, s: float) -> float:
    """Relative standard deviation of a count ``n``, in percent."""
    if not n >= 1:
        raise DomainError(f"rsd_of_count requires n >= 1, got {n!r}")
    return 100.0 * math.sqrt(n + (s * n) ** 2) / n


def nb_logpmf(n: int, model: CountModel) -> float:
    if n < 0:
        return -math.inf
    N = model.mean_count
    if model.is_poisson:
        return n * math.log(N) - N - math.lgamma(n + 1.0)
    prm = to_nb_params(model)
    r, p = prm.r, prm.p
    return (
        log_gamma(n + r)
        - log_gamma(r)
        - math.lgamma(n + 1.0)
        + r * math.log1p(-p)
        + (n * math.log(p) if n else 0.0)
    )


def nb_pmf(n: int, model: CountModel) -> float:
    return math.exp(nb_logpmf(n, model))


def nb_cdf(n: int, model: CountModel) -> float:
    """Pr[count <= n], by direct summation of the pmf."""
    if n < 0:
        return 0.0
    total = math.fsum(nb_pmf(k, model) for k in range(int(n) + 1))
    return min(total, 1.0)


def nb_quantile_exact(b: float, model: CountModel, *, max_terms: int | None = None) -> int:
    """Smallest integer n with Pr[count <= n] >= b."""
    if not 0.0 < b < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {b!r}")
    if max_terms is None:
        max_terms = int(model.mean_count + 40.0 * model.sd) + 100
    total = 0.0
    for n in range(max_terms + 1):
        total += nb_pmf(n, model)
        if total >= b:
            return n
    raise ConvergenceError(
        f"cdf did not reach {b} within {max_terms} terms "
        f"(N={model.mean_count}, s={model.trsd}); level too close to 1"
    )


def pivot(n: float, N: float, s: float) -> float:
    """Standardized deviation (n - N) / sqrt(N + s^2 N^2)."""
    if not N > 0.0:
        raise DomainError(f"pivot requires N > 0, got {N!r}")
    return (n - N) / math.sqrt(N + (s * N) ** 2)
