"""Command-line interface.

Every command writes one table (DSV with a ``#`` metadata header, or JSON
records with ``--format records``) to stdout or ``--out``.

Exit status: 0 on success, 2 for usage or domain errors, 3 when the
numerics fail (no admissible root, iteration cap reached).
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .detection import (
    DetectionConfig,
    NormalSignalModel,
    background_cdf_curves,
    background_count_quantile,
    background_sd,
    detection_limit_dl,
    detection_probability,
    lod_nb,
    lod_normal,
    lod_uncorrected,
)
from .errors import ConvergenceError, DomainError, RegimeError
from .intervals import Method, ogden_ci, two_sided
from .nbapprox import (
    approx_cdf,
    normalized_quantile,
    pivot_limit,
    quantile_discrete,
    quantile_discrete_raw,
    quantile_smooth,
)
from .nbcore import CountModel, nb_cdf, nb_quantile_exact, pivot, rsd_of_count
from .records import OutputRecord
from .simulate import CoverageReport, SimulationPlan, coarse_grid, run_coverage

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

TABLE_COUNTS = (1, 3, 5, 7, 10, 20, 50, 100, 200)
UNITS = "counts dimensionless; densities mm^-2; areas mm^2"


# -- argument types ---------------------------------------------------------

def _open_prob(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1, got {text}")
    return v


def _trsd(text: str) -> float:
    v = float(text)
    if not 0.0 <= v < 1.0:
        raise argparse.ArgumentTypeError(f"trsd must lie in [0, 1), got {text}")
    return v


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _nonneg(text: str) -> float:
    v = float(text)
    if not v >= 0.0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _count_list(text: str) -> list[int]:
    if not text.strip():
        return []
    out = [int(t) for t in text.split(",")]
    if any(c < 0 for c in out):
        raise argparse.ArgumentTypeError("counts must be nonnegative")
    return out


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _grid(text: str) -> tuple[float, ...]:
    """``start:step:stop`` (inclusive) or a comma list."""
    if ":" in text:
        start, step, stop = (float(t) for t in text.split(":"))
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError("grid needs step > 0 and stop >= start")
        n = int(round((stop - start) / step)) + 1
        return tuple(round(start + i * step, 10) for i in range(n))
    return tuple(_float_list(text))


def _decimals(text: str) -> int | None:
    return None if text.lower() == "none" else int(text)


# -- commands ---------------------------------------------------------------

def cmd_quantile(args) -> OutputRecord:
    model = CountModel(args.mean, args.trsd)
    exact = nb_quantile_exact(args.level, model)
    discrete = quantile_discrete(args.level, model)
    smooth = quantile_smooth(args.level, model)
    value = {"exact": exact, "discrete": discrete, "smooth": smooth}[args.kind]
    meta = {"mean": args.mean, "trsd": args.trsd, "level": args.level, "kind": args.kind}
    if quantile_discrete_raw(args.level, model) < 0:
        meta["flag"] = "discrete quantile floored at 0"
    return OutputRecord(
        "quantile",
        ["kind", "quantile", "exact", "discrete", "smooth"],
        [(args.kind, value, exact, discrete, smooth)],
        meta,
    )


def cmd_ci(args) -> OutputRecord:
    method = None if args.method == "auto" else Method(args.method)
    if method is Method.OGDEN:
        res = ogden_ci(args.count, args.trsd, args.ogden_lower, args.ogden_upper)
    else:
        res = two_sided(args.count, args.trsd, args.level, method, limit_decimals=args.limit_decimals)
    meta = {"count": args.count, "trsd": args.trsd, "level": res.level, "method": res.method.value}
    lo, hi = res.rounded()
    return OutputRecord(
        "ci",
        ["count", "lower", "upper", "lower_rounded", "upper_rounded", "method", "flags"],
        [(args.count, res.lower, res.upper, lo, hi, res.method.value, ";".join(sorted(res.flags)))],
        meta,
    )


def cmd_table(args) -> OutputRecord:
    rows = []
    for n in args.counts:
        res = two_sided(n, args.trsd, args.level, Method.PIVOT, limit_decimals=args.limit_decimals)
        lo, hi = res.rounded()
        rsd = rsd_of_count(n, args.trsd) if n >= 1 else float("nan")
        rows.append((n, rsd, int(np.floor(rsd + 0.5)) if n >= 1 else "", res.lower, res.upper, lo, hi,
                     ";".join(sorted(res.flags))))
    meta = {
        "trsd": args.trsd,
        "level": args.level,
        "method": "pivot",
        "pivot_constant_decimals": "none" if args.limit_decimals is None else args.limit_decimals,
        "lower_constant": pivot_limit(0.5 * (1 + args.level), args.trsd),
        "upper_constant": pivot_limit(0.5 * (1 - args.level), args.trsd),
    }
    return OutputRecord(
        "table",
        ["count", "rsd_pct", "rsd_pct_rounded", "lower", "upper", "lower_rounded", "upper_rounded", "flags"],
        rows,
        meta,
    )


def _detection_config(args, **extra) -> DetectionConfig:
    return DetectionConfig(area=args.area, background_density=args.background_density,
                           trsd=args.trsd, alpha=args.alpha, **extra)


def cmd_lod(args) -> OutputRecord:
    cfg = _detection_config(args)
    meta = {
        "area": cfg.area, "background_density": cfg.background_density,
        "trsd": cfg.trsd, "alpha": cfg.alpha, "sigma0": args.sigma0, "units": UNITS,
    }
    if args.curve:
        rows = background_cdf_curves(cfg)
        return OutputRecord("lod", ["density", "nb_cdf", "normal_cdf"], rows, meta)
    rows = []
    sd = background_sd(cfg)
    if args.method in ("nb", "both"):
        lod = lod_nb(cfg)
        rows.append(("nb", lod, background_count_quantile(cfg), sd, lod_uncorrected(lod, cfg)))
    if args.method in ("normal", "both"):
        lod = lod_normal(NormalSignalModel(args.sigma0, cfg.trsd))
        rows.append(("normal", lod, "", args.sigma0, lod_uncorrected(lod, cfg)))
    return OutputRecord("lod", ["method", "lod", "count_quantile", "background_sd", "lod_uncorrected"],
                        rows, meta)


def cmd_dl(args) -> OutputRecord:
    cfg = _detection_config(args, beta_power=args.power)
    dl = detection_limit_dl(cfg)
    meta = {
        "area": cfg.area, "background_density": cfg.background_density, "trsd": cfg.trsd,
        "alpha": cfg.alpha, "power": cfg.beta_power, "units": UNITS,
    }
    return OutputRecord(
        "dl",
        ["dl", "dl_count", "lod", "count_quantile", "power"],
        [(dl, dl * cfg.area, lod_nb(cfg), background_count_quantile(cfg), detection_probability(dl, cfg))],
        meta,
    )


def cmd_simulate(args) -> OutputRecord:
    grid = coarse_grid() if args.coarse else args.grid
    methods = tuple(args.method or (["pivot"] if args.trsd > 0 else ["poisson_closed_form"]))
    plan = SimulationPlan(grid=grid, trsd=args.trsd, reps=args.reps, level=args.level,
                          methods=methods, seed=args.seed)
    report = run_coverage(plan, workers=args.workers)
    meta = {
        "trsd": plan.trsd, "reps": plan.reps, "level": plan.level, "seed": plan.seed,
        "methods": " ".join(m.value for m in plan.methods), "grid_points": len(plan.grid),
        "rng": "numpy PCG64, one SeedSequence child per grid point",
        "envelope": "approximate; two-sided band is the sum of one-sided half-widths",
    }
    return OutputRecord("simulate", list(CoverageReport.COLUMNS), report.rows(), meta)


def _curve_pivot_quantile(args):
    grid = args.means or tuple(np.round(np.arange(1.0, 100.0 + 1e-9, 0.5), 10))
    limit = pivot_limit(args.level, args.trsd)
    rows = [(N, normalized_quantile(args.level, CountModel(N, args.trsd)), limit) for N in grid]
    return ["mean", "normalized_quantile", "asymptote"], rows


def _curve_normalized_quantiles(args):
    grid = args.means or tuple(float(n) for n in range(1, 101))
    rows = []
    for b in (args.level, 1.0 - args.level):
        for N in grid:
            m = CountModel(N, args.trsd)
            sd = m.sd
            rows.append((N, b, (nb_quantile_exact(b, m) - N) / sd, (quantile_discrete(b, m) - N) / sd,
                         (quantile_smooth(b, m) - N) / sd))
    return ["mean", "level", "exact", "discrete", "smooth"], rows


def _curve_relative_ci(args):
    counts = args.counts if args.counts is not None else list(range(1, 201))
    rows = []
    for n in counts:
        if n < 1:
            continue
        res = two_sided(n, args.trsd, args.level)
        rows.append((n, 100.0 * (res.lower - n) / n, 100.0 * (res.upper - n) / n, res.method.value))
    return ["count", "lower_pct", "upper_pct", "method"], rows


def _curve_pivot_cdf(args):
    means = args.means or (5.0, 15.0, 25.0)
    rows = []
    for N in means:
        m = CountModel(N, args.trsd)
        n_max = int(N + 6 * m.sd) + 1
        for n in range(n_max + 1):
            rows.append((f"exact_N={N:g}", N, pivot(n, N, args.trsd), nb_cdf(n, m)))
    # one approximate curve at the middle mean; the discrete cdf at n is the
    # continuous one at n + 1/2
    ref = sorted(means)[len(means) // 2]
    m = CountModel(ref, args.trsd)
    for t in np.linspace(-3.0, 5.0, 161):
        rows.append((f"approx_N={ref:g}", ref, float(t), approx_cdf(ref + t * m.sd + 0.5, m)))
    return ["series", "mean", "pivot", "cdf"], rows


_CURVES = {
    "pivot_quantile": _curve_pivot_quantile,
    "normalized_quantiles": _curve_normalized_quantiles,
    "relative_ci": _curve_relative_ci,
    "pivot_cdf": _curve_pivot_cdf,
}


def cmd_curves(args) -> OutputRecord:
    columns, rows = _CURVES[args.kind](args)
    meta = {"kind": args.kind, "trsd": args.trsd, "level": args.level}
    return OutputRecord("curves", columns, rows, meta)


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--out", help="write output to this path instead of stdout")
    shared.add_argument("--format", choices=("dsv", "records"), default="dsv")

    parser = argparse.ArgumentParser(prog="nbcount", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quantile", parents=[shared], help="count quantile of the (N, s) law")
    p.add_argument("--mean", type=_positive, required=True)
    p.add_argument("--trsd", type=_trsd, default=0.2)
    p.add_argument("--level", type=_open_prob, default=0.95)
    p.add_argument("--kind", choices=("exact", "discrete", "smooth"), default="exact")
    p.set_defaults(func=cmd_quantile)

    p = sub.add_parser("ci", parents=[shared], help="confidence interval for one count")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--trsd", type=_trsd, default=0.2)
    p.add_argument("--level", type=_open_prob, default=0.95, help="two-sided confidence level")
    p.add_argument("--method", default="auto", choices=["auto"] + [m.value for m in Method])
    p.add_argument("--limit-decimals", type=_decimals, default=None,
                   help="round the pivot constants to this many decimals")
    p.add_argument("--ogden-lower", type=float, default=2.0)
    p.add_argument("--ogden-upper", type=float, default=1.5)
    p.set_defaults(func=cmd_ci)

    p = sub.add_parser("table", parents=[shared], help="table of two-sided limits by count")
    p.add_argument("--trsd", type=_trsd, default=0.2)
    p.add_argument("--level", type=_open_prob, default=0.95)
    p.add_argument("--counts", type=_count_list, default=list(TABLE_COUNTS))
    p.add_argument("--limit-decimals", type=_decimals, default=1,
                   help="round the pivot constants (default 1, as in the published table; 'none' to keep)")
    p.set_defaults(func=cmd_table)

    for name, helptext in (("lod", "decision limit (LOD)"), ("dl", "detection limit (DL)")):
        p = sub.add_parser(name, parents=[shared], help=helptext)
        p.add_argument("--area", type=_positive, default=0.785)
        p.add_argument("--background-density", type=_nonneg, default=2.5)
        p.add_argument("--trsd", type=_trsd, default=0.2)
        p.add_argument("--alpha", type=_open_prob, default=0.001)
        if name == "lod":
            p.add_argument("--sigma0", type=_nonneg, default=1.5,
                           help="baseline sd for the normal-model comparison")
            p.add_argument("--method", choices=("nb", "normal", "both"), default="both")
            p.add_argument("--curve", action="store_true",
                           help="emit cumulative background distributions instead")
            p.set_defaults(func=cmd_lod)
        else:
            p.add_argument("--power", type=_open_prob, default=0.8)
            p.set_defaults(func=cmd_dl)

    p = sub.add_parser("simulate", parents=[shared], help="Monte-Carlo coverage of the intervals")
    p.add_argument("--trsd", type=_trsd, default=0.2)
    p.add_argument("--level", type=_open_prob, default=0.90, help="two-sided nominal level")
    p.add_argument("--reps", type=_positive_int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--method", action="append",
                   choices=("pivot", "direct", "poisson_closed_form", "chi_square"))
    p.add_argument("--grid", type=_grid, default=_grid("5.1:0.1:30"), help="start:step:stop or a,b,c")
    p.add_argument("--coarse", action="store_true", help="use the 26-point grid 5, 6, ..., 30")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("curves", parents=[shared], help="curve data for plotting")
    p.add_argument("--kind", choices=tuple(_CURVES), required=True)
    p.add_argument("--trsd", type=_trsd, default=0.2)
    p.add_argument("--level", type=_open_prob, default=0.95)
    p.add_argument("--means", type=_float_list, default=None)
    p.add_argument("--counts", type=_count_list, default=None)
    p.set_defaults(func=cmd_curves)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        record = args.func(args)
    except DomainError as exc:
        parser.exit(EXIT_USAGE, f"{parser.prog} {args.command}: error: {exc}\n")
    except (RegimeError, ConvergenceError) as exc:
        print(f"{parser.prog} {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    record.meta["version"] = __version__
    text = record.render(args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
