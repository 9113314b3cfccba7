"""Decision limit (LOD) and detection limit (DL) for fiber counts on a
filter carrying background interference fibers.

Densities are in fibers per mm^2, areas in mm^2.  All limits are on the
bias-corrected scale, i.e. with the mean background density subtracted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError
from .nbcore import CountModel, nb_cdf, nb_quantile_exact
from .specfun import normal_cdf

__all__ = [
    "DetectionConfig",
    "NormalSignalModel",
    "background_sd",
    "background_count_quantile",
    "lod_nb",
    "lod_normal",
    "lod_uncorrected",
    "detection_probability",
    "detection_limit_dl",
    "background_cdf_curves",
]


@dataclass(frozen=True)
class DetectionConfig:
    area: float = 0.785  # 100 graticule fields
    background_density: float = 2.5
    trsd: float = 0.2
    alpha: float = 0.001
    beta_power: float = 0.8

    def __post_init__(self):
        if not self.area > 0.0:
            raise DomainError(f"area must be positive, got {self.area!r}")
        if not self.background_density >= 0.0:
            raise DomainError(f"background density must be >= 0, got {self.background_density!r}")
        if not 0.0 <= self.trsd < 1.0:
            raise DomainError(f"trsd must lie in [0, 1), got {self.trsd!r}")
        if not 0.0 < self.alpha < 0.5:
            raise DomainError(f"alpha must lie in (0, 0.5), got {self.alpha!r}")
        if not 0.5 < self.beta_power < 1.0:
            raise DomainError(f"beta_power must lie in (0.5, 1), got {self.beta_power!r}")

    @property
    def background_count(self) -> float:
        return self.background_density * self.area

    def count_model(self, analyte_density: float = 0.0) -> CountModel:
        return CountModel((analyte_density + self.background_density) * self.area, self.trsd)


@dataclass(frozen=True)
class NormalSignalModel:
    """Signal with variance sigma0^2 + M^2 s^2 about its mean M."""

    sigma0: float
    trsd: float = 0.2

    def __post_init__(self):
        if not self.sigma0 >= 0.0:
            raise DomainError(f"sigma0 must be >= 0, got {self.sigma0!r}")


def background_sd(cfg: DetectionConfig) -> float:
    """Standard deviation of the background density read from one filter."""
    Ni = cfg.background_density
    return math.sqrt(Ni / cfg.area + (cfg.trsd * Ni) ** 2)


def background_count_quantile(cfg: DetectionConfig) -> int:
    """Count exceeded with probability <= alpha when only background is present."""
    if cfg.background_density == 0.0:
        return 0
    return nb_quantile_exact(1.0 - cfg.alpha, cfg.count_model())


def lod_nb(cfg: DetectionConfig) -> float:
    """Bias-corrected decision limit from the negative-binomial count law."""
    return background_count_quantile(cfg) / cfg.area - cfg.background_density


def lod_normal(model: NormalSignalModel, multiplier: float = 3.0) -> float:
    """Decision limit under a normal signal model, 3 sigma0 by default."""
    return multiplier * model.sigma0


def lod_uncorrected(lod: float, cfg: DetectionConfig) -> float:
    """Add the mean background back, as the historical NIOSH 7400 figure does."""
    return lod + cfg.background_density


def detection_probability(analyte_density: float, cfg: DetectionConfig) -> float:
    """Pr[bias-corrected density > LOD] for a true analyte density.

    On integer counts this is Pr[count > q] with q the background quantile.
    """
    q = background_count_quantile(cfg)
    total = (analyte_density + cfg.background_density) * cfg.area
    if total <= 0.0:
        return 0.0
    return 1.0 - nb_cdf(q, CountModel(total, cfg.trsd))


def detection_limit_dl(cfg: DetectionConfig, *, upper: float = 100.0, tol: float = 1e-9,
                       max_iter: int = 200) -> float:
    """Smallest analyte density detected (signal > LOD) with probability beta_power."""
    if detection_probability(upper, cfg) < cfg.beta_power:
        raise ConvergenceError(f"detection power {cfg.beta_power} not reached below {upper} mm^-2")
    lo, hi = 0.0, upper
    if detection_probability(lo, cfg) >= cfg.beta_power:
        return 0.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if detection_probability(mid, cfg) >= cfg.beta_power:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol:
            return hi
    raise ConvergenceError("detection-limit bisection did not converge")


def background_cdf_curves(cfg: DetectionConfig, sigma: float | None = None,
                          max_count: int | None = None) -> list[tuple[float, float, float]]:
    """Cumulative distributions of the bias-corrected background density.

    Returns ``(density, nb_cdf, normal_cdf)`` rows at each integer count
    converted to density.  The normal curve has mean 0 and standard
    deviation ``sigma`` (default :func:`background_sd`).
    """
    if sigma is None:
        sigma = background_sd(cfg)
    model = cfg.count_model()
    if max_count is None:
        max_count = int(model.mean_count + 8.0 * model.sd) + 2
    rows = []
    for n in range(max_count + 1):
        density = n / cfg.area - cfg.background_density
        normal = normal_cdf(density / sigma) if sigma > 0 else float(density >= 0)
        rows.append((density, nb_cdf(n, model), normal))
    return rows

