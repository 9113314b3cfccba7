"""Negative-binomial count statistics for fiber counting.

Exact and approximate quantiles of counts whose variance is
``N + s**2 N**2``, confidence limits on the mean from a single count,
decision and detection limits, and a Monte-Carlo coverage harness.
"""
__version__ = "0.1.0"

from .errors import ConvergenceError, DomainError, RegimeError
from .nbcore import (
    CountModel,
    NBParams,
    from_nb_params,
    nb_cdf,
    nb_pmf,
    nb_quantile_exact,
    pivot,
    rsd_of_count,
    to_nb_params,
    variance,
)
from .nbapprox import (
    ApproxExpansion,
    approx_cdf,
    approx_pdf,
    delta_correction,
    expansion,
    pivot_limit,
    quantile_discrete,
    quantile_smooth,
)
from .intervals import (
    EnvelopeBand,
    IntervalResult,
    Method,
    chi_square_ci,
    ci_direct,
    lcl_pivot,
    ogden_ci,
    poisson_mean_from_count,
    scatter_envelope,
    two_sided,
    ucl_pivot,
)
from .detection import (
    DetectionConfig,
    NormalSignalModel,
    background_count_quantile,
    background_sd,
    detection_limit_dl,
    detection_probability,
    lod_nb,
    lod_normal,
    lod_uncorrected,
)
from .simulate import CoverageReport, SimulationPlan, run_coverage, sample_nb
