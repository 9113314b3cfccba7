"""Seeded Monte-Carlo coverage harness for the single-count intervals.

For every mean on a grid, ``reps`` counts are drawn and each requested
interval method is applied; the report records how often the true mean
falls below the lower limit, above the upper limit, or outside either,
together with the discreteness envelope expected for that mean.

Streams: the plan seed feeds a :class:`numpy.random.SeedSequence` which is
spawned once per grid point, so a point's draws do not depend on how many
points there are before it or on the number of workers.
"""
from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .intervals import (
    EnvelopeBand,
    Method,
    chi_square_ci,
    ci_direct,
    lcl_pivot,
    poisson_mean_from_count,
    scatter_envelope,
    ucl_pivot,
)
from .nbcore import CountModel
from .specfun import normal_quantile

__all__ = [
    "SimulationPlan",
    "CoveragePoint",
    "CoverageReport",
    "default_grid",
    "coarse_grid",
    "sample_nb",
    "run_coverage",
]

SIM_METHODS = (Method.PIVOT, Method.DIRECT, Method.POISSON_CLOSED_FORM, Method.CHI_SQUARE)


def default_grid() -> tuple[float, ...]:
    """Means 5.1, 5.2, ..., 30.0."""
    return tuple(round(5.1 + 0.1 * i, 10) for i in range(250))


def coarse_grid() -> tuple[float, ...]:
    """Means 5, 6, ..., 30."""
    return tuple(float(v) for v in range(5, 31))


@dataclass(frozen=True)
class SimulationPlan:
    grid: tuple[float, ...] = field(default_factory=default_grid)
    trsd: float = 0.2
    reps: int = 10_000
    level: float = 0.90  # two-sided; each side has miss probability (1 - level)/2
    methods: tuple[Method, ...] = (Method.PIVOT,)
    seed: int = 1

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        object.__setattr__(self, "methods", tuple(Method(m) for m in self.methods))
        if self.reps < 1:
            raise DomainError(f"reps must be >= 1, got {self.reps!r}")
        if not self.grid or min(self.grid) <= 0.0:
            raise DomainError("grid must be a nonempty list of positive means")
        if not 0.0 < self.level < 1.0:
            raise DomainError(f"level must lie in (0, 1), got {self.level!r}")
        if not 0.0 <= self.trsd < 1.0:
            raise DomainError(f"trsd must lie in [0, 1), got {self.trsd!r}")
        for m in self.methods:
            if m not in SIM_METHODS:
                raise DomainError(f"method {m.value!r} is not simulated")
            if m in (Method.POISSON_CLOSED_FORM, Method.CHI_SQUARE) and self.trsd != 0.0:
                raise DomainError(f"method {m.value!r} requires trsd = 0")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    @property
    def one_sided(self) -> float:
        return 0.5 * (1.0 + self.level)

    @property
    def nominal_miss(self) -> float:
        return 1.0 - self.one_sided


@dataclass(frozen=True)
class CoveragePoint:
    mean: float
    method: Method
    lower_miss: float
    upper_miss: float
    two_sided_miss: float
    lower_band: EnvelopeBand
    upper_band: EnvelopeBand
    two_sided_band: EnvelopeBand
    nominal: float  # nominal one-sided miss probability
    error: str | None = None

    @property
    def inside(self) -> tuple[bool, bool, bool]:
        """Whether each miss rate (lower, upper, two-sided) lies in its envelope."""
        return (
            self.lower_band.contains(self.lower_miss),
            self.upper_band.contains(self.upper_miss),
            self.two_sided_band.contains(self.two_sided_miss),
        )

    @property
    def conservative(self) -> tuple[bool, bool, bool]:
        """Whether each miss rate is at or below its nominal value."""
        return (
            self.lower_miss <= self.nominal,
            self.upper_miss <= self.nominal,
            self.two_sided_miss <= 2.0 * self.nominal,
        )

    @property
    def passed(self) -> bool:
        if self.error is not None:
            return False
        if self.method is Method.CHI_SQUARE:
            return all(self.conservative)
        return all(self.inside)


@dataclass(frozen=True)
class CoverageReport:
    plan: SimulationPlan
    points: tuple[CoveragePoint, ...]

    def for_method(self, method: Method | str) -> list[CoveragePoint]:
        method = Method(method)
        return [p for p in self.points if p.method is method and p.error is None]

    def mean_miss(self, method: Method | str) -> tuple[float, float]:
        """Grid-averaged (lower, upper) miss rates."""
        pts = self.for_method(method)
        return (
            float(np.mean([p.lower_miss for p in pts])),
            float(np.mean([p.upper_miss for p in pts])),
        )

    def inside_fraction(self, method: Method | str) -> float:
        """Fraction of plotted miss rates (lower, upper, two-sided per mean) inside their envelopes."""
        flags = [f for p in self.for_method(method) for f in p.inside]
        return float(np.mean(flags))

    def conservative_fraction(self, method: Method | str) -> float:
        flags = [f for p in self.for_method(method) for f in p.conservative]
        return float(np.mean(flags))

    def rows(self) -> list[tuple]:
        out = []
        for p in self.points:
            out.append((
                p.mean, p.method.value, p.lower_miss, p.upper_miss, p.two_sided_miss,
                p.lower_band.lower, p.lower_band.upper,
                p.upper_band.lower, p.upper_band.upper,
                p.two_sided_band.lower, p.two_sided_band.upper,
                int(p.passed), p.error or "",
            ))
        return out

    COLUMNS = (
        "mean", "method", "lower_miss", "upper_miss", "two_sided_miss",
        "lower_band_lo", "lower_band_hi", "upper_band_lo", "upper_band_hi",
        "two_sided_band_lo", "two_sided_band_hi", "pass", "error",
    )


def sample_nb(model: CountModel, rng: np.random.Generator, size=None):
    """Draw counts from the (N, s) negative binomial as a gamma-Poisson mixture.

    The Poisson rate is gamma distributed with shape 1/s^2 and mean N; for
    ``s = 0`` counts are Poisson(N) directly.
    """
    N, s = model.mean_count, model.trsd
    if s == 0.0:
        return rng.poisson(N, size=size)
    shape = 1.0 / (s * s)
    lam = rng.gamma(shape, N / shape, size=size)
    return rng.poisson(lam)


class _LimitTable:
    """Lower/upper limits for counts 0..n, grown on demand; limits depend only on n."""

    def __init__(self, method: Method, s: float, b: float):
        self.method, self.s, self.b = method, s, b
        self.lower = np.empty(0)
        self.upper = np.empty(0)
        self._lock = threading.Lock()

    def _compute(self, counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        m, s, b = self.method, self.s, self.b
        if m is Method.PIVOT:
            return np.atleast_1d(lcl_pivot(counts, s, b)), np.atleast_1d(ucl_pivot(counts, s, b))
        if m is Method.POISSON_CLOSED_FORM:
            z = normal_quantile(b)
            return (np.atleast_1d(poisson_mean_from_count(counts, z)),
                    np.atleast_1d(poisson_mean_from_count(counts, -z)))
        if m is Method.DIRECT:
            lo = np.array([ci_direct(float(n), s, b) for n in counts])
            hi = np.array([ci_direct(float(n), s, 1.0 - b) for n in counts])
            return lo, hi
        level = 2.0 * b - 1.0
        res = [chi_square_ci(int(n), level) for n in counts]
        return np.array([r.lower for r in res]), np.array([r.upper for r in res])

    def ensure(self, n_max: int) -> tuple[np.ndarray, np.ndarray]:
        with self._lock:
            have = self.lower.size
            if n_max >= have:
                new = np.arange(have, max(n_max + 1, 2 * have), dtype=float)
                lo, hi = self._compute(new)
                self.lower = np.concatenate([self.lower, lo])
                self.upper = np.concatenate([self.upper, hi])
            return self.lower, self.upper


def _envelopes(N: float, s: float, b: float) -> tuple[EnvelopeBand, EnvelopeBand, EnvelopeBand]:
    # a lower-limit miss is a count above the b-quantile; an upper-limit miss
    # is a count below the (1-b)-quantile
    lo = scatter_envelope(N, s, b)
    hi = scatter_envelope(N, s, 1.0 - b)
    miss = 1.0 - b
    return (
        EnvelopeBand(miss, lo.half_width),
        EnvelopeBand(miss, hi.half_width),
        EnvelopeBand(2.0 * miss, lo.half_width + hi.half_width),
    )


def _simulate_point(N: float, seed: np.random.SeedSequence, plan: SimulationPlan,
                    tables: dict[Method, _LimitTable]) -> list[CoveragePoint]:
    rng = np.random.default_rng(seed)
    counts = sample_nb(CountModel(N, plan.trsd), rng, size=plan.reps)
    bands = _envelopes(N, plan.trsd, plan.one_sided)
    nominal = plan.nominal_miss
    n_max = int(counts.max())
    out = []
    for method in plan.methods:
        try:
            lower, upper = tables[method].ensure(n_max)
        except (ValueError, ArithmeticError) as exc:
            nan = float("nan")
            out.append(CoveragePoint(N, method, nan, nan, nan, *bands, nominal, error=str(exc)))
            continue
        below = N < lower[counts]
        above = N > upper[counts]
        out.append(CoveragePoint(
            mean=N,
            method=method,
            lower_miss=float(below.mean()),
            upper_miss=float(above.mean()),
            two_sided_miss=float((below | above).mean()),
            lower_band=bands[0],
            upper_band=bands[1],
            two_sided_band=bands[2],
            nominal=nominal,
        ))
    return out


def run_coverage(plan: SimulationPlan, *, workers: int = 1) -> CoverageReport:
    """Run the coverage experiment; the report does not depend on ``workers``."""
    seeds = np.random.SeedSequence(plan.seed).spawn(len(plan.grid))

    tables = {m: _LimitTable(m, plan.trsd, plan.one_sided) for m in plan.methods}

    def task(args):
        N, ss = args
        return _simulate_point(N, ss, plan, tables)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, zip(plan.grid, seeds)))
    else:
        results = [task(a) for a in zip(plan.grid, seeds)]
    return CoverageReport(plan, tuple(p for pts in results for p in pts))
