import json

import numpy as np
import pytest

from nbcount.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from nbcount.records import OutputRecord

TABLE_ROWS = [
    (1, 102, 0, 6),
    (3, 61, 1, 10),
    (5, 49, 2, 13),
    (7, 43, 3, 16),
    (10, 37, 5, 21),
    (20, 30, 11, 37),
    (50, 24, 32, 85),
    (100, 22, 67, 163),
    (200, 21, 137, 319),
]


def run(capsys, *argv) -> OutputRecord:
    code = main(list(argv))
    out = capsys.readouterr().out
    assert code == EXIT_OK
    if "--format" in argv and argv[argv.index("--format") + 1] == "records":
        return OutputRecord.from_records(out)
    return OutputRecord.from_dsv(out)


def usage_error(*argv) -> int:
    with pytest.raises(SystemExit) as exc:
        main(list(argv))
    return exc.value.code


def column(rec: OutputRecord, name: str) -> list:
    i = rec.columns.index(name)
    return [r[i] for r in rec.rows]


# -- quantile ---------------------------------------------------------------

def test_quantile_exact_background(capsys):
    rec = run(capsys, "quantile", "--mean", "1.9625", "--trsd", "0.2", "--level", "0.999", "--kind", "exact")
    assert rec.rows[0][1] == 8


def test_quantile_discrete_poisson(capsys):
    rec = run(capsys, "quantile", "--mean", "4", "--trsd", "0", "--level", "0.95", "--kind", "discrete")
    assert rec.rows[0][1] == 8
    assert rec.columns == ["kind", "quantile", "exact", "discrete", "smooth"]
    assert rec.rows[0][2] == 8  # exact Poisson 95% quantile at mean 4


@pytest.mark.parametrize("level", ["1.0", "0", "-0.1", "1.5"])
def test_quantile_level_out_of_range(level, capsys):
    assert usage_error("quantile", "--mean", "4", "--level", level) == EXIT_USAGE


def test_quantile_bad_trsd(capsys):
    assert usage_error("quantile", "--mean", "4", "--trsd", "1.0") == EXIT_USAGE
    assert usage_error("quantile", "--mean", "0") == EXIT_USAGE


def test_quantile_floor_flag(capsys):
    rec = run(capsys, "quantile", "--mean", "1", "--trsd", "0", "--level", "0.0013498980316301", "--kind", "discrete")
    assert rec.rows[0][1] == 0
    assert "flag" in rec.meta


# -- table ------------------------------------------------------------------

def test_table_defaults_reproduce_published_values(capsys):
    rec = run(capsys, "table")
    got = list(zip(column(rec, "count"), column(rec, "rsd_pct_rounded"),
                   column(rec, "lower_rounded"), column(rec, "upper_rounded")))
    assert got == TABLE_ROWS
    assert rec.meta["trsd"] == 0.2 and rec.meta["level"] == 0.95


def test_table_single_count(capsys):
    rec = run(capsys, "table", "--counts", "10")
    assert len(rec.rows) == 1
    row = dict(zip(rec.columns, rec.rows[0]))
    assert (row["count"], row["rsd_pct_rounded"], row["lower_rounded"], row["upper_rounded"]) == (10, 37, 5, 21)


def test_table_empty_counts_is_header_only(capsys):
    rec = run(capsys, "table", "--counts", "")
    assert rec.rows == []
    assert rec.columns[0] == "count"


def test_table_negative_count_rejected(capsys):
    assert usage_error("table", "--counts", "3,-1") == EXIT_USAGE


def test_table_small_counts_flagged(capsys):
    rec = run(capsys, "table")
    flags = dict(zip(column(rec, "count"), column(rec, "flags")))
    assert flags[1] == "small_count" and flags[3] == "small_count"
    assert flags[10] in ("", None)


def test_table_unrounded_constants_differ_at_large_counts(capsys):
    rec = run(capsys, "table", "--counts", "100,200", "--limit-decimals", "none")
    assert column(rec, "lower_rounded")[0] == 66
    assert column(rec, "upper_rounded")[1] == 316


# -- ci ---------------------------------------------------------------------

def test_ci_default_is_pivot(capsys):
    rec = run(capsys, "ci", "--count", "10", "--trsd", "0.2")
    row = dict(zip(rec.columns, rec.rows[0]))
    assert row["method"] == "pivot"
    assert row["lower"] == pytest.approx(4.8362, abs=1e-3)
    assert row["upper"] == pytest.approx(21.0, abs=0.05)


def test_ci_chi_square(capsys):
    rec = run(capsys, "ci", "--count", "10", "--trsd", "0", "--level", "0.95", "--method", "chi_square")
    row = dict(zip(rec.columns, rec.rows[0]))
    assert row["lower"] == pytest.approx(4.795, abs=0.01)
    assert row["upper"] == pytest.approx(18.39, abs=0.01)


def test_ci_method_domain_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["ci", "--count", "10", "--trsd", "0.2", "--method", "chi_square"])
    assert exc.value.code == EXIT_USAGE


def test_ci_numeric_failure_exit_code(capsys):
    # the upper constant squared times s^2 reaches 1: no admissible pivot limit
    code = main(["ci", "--count", "10", "--trsd", "0.45", "--level", "0.999", "--method", "pivot"])
    assert code == EXIT_NUMERIC
    assert "numeric failure" in capsys.readouterr().err


# -- lod / dl ---------------------------------------------------------------

def test_lod_defaults(capsys):
    rec = run(capsys, "lod")
    rows = {r[0]: dict(zip(rec.columns, r)) for r in rec.rows}
    assert rows["nb"]["lod"] == pytest.approx(7.7, abs=0.05)
    assert rows["nb"]["count_quantile"] == 8
    assert rows["nb"]["background_sd"] == pytest.approx(1.85, abs=0.005)
    assert rows["normal"]["lod"] == 4.5
    assert rows["normal"]["lod_uncorrected"] == 7.0
    assert "mm^-2" in rec.meta["units"]


def test_lod_alpha_zero(capsys):
    assert usage_error("lod", "--alpha", "0") == EXIT_USAGE


def test_lod_curve(capsys):
    rec = run(capsys, "lod", "--curve")
    assert rec.columns == ["density", "nb_cdf", "normal_cdf"]
    nb = column(rec, "nb_cdf")
    assert all(a <= b for a, b in zip(nb, nb[1:]))
    assert nb[-1] == pytest.approx(1.0, abs=1e-5)


def test_dl_defaults(capsys):
    rec = run(capsys, "dl")
    row = dict(zip(rec.columns, rec.rows[0]))
    assert 11.0 <= row["dl"] <= 13.0
    assert row["dl_count"] == pytest.approx(10.0, abs=0.5)
    assert row["power"] >= 0.8


def test_dl_unreachable_power(capsys):
    code = main(["dl", "--background-density", "0", "--area", "0.0001", "--power", "0.99"])
    assert code == EXIT_NUMERIC


# -- simulate ---------------------------------------------------------------

def test_simulate_deterministic(capsys):
    argv = ["simulate", "--trsd", "0.2", "--reps", "500", "--seed", "3", "--grid", "5:5:30"]
    a = run(capsys, *argv)
    b = run(capsys, *argv, "--workers", "3")
    assert a.rows == b.rows
    assert a.meta["seed"] == 3
    assert len(a.rows) == 6


def test_simulate_chi_square(capsys):
    rec = run(capsys, "simulate", "--trsd", "0", "--method", "chi_square", "--reps", "2000", "--coarse")
    assert len(rec.rows) == 26
    assert set(column(rec, "method")) == {"chi_square"}
    # Garwood limits are conservative: average miss rates sit below 5%
    assert np.mean(column(rec, "lower_miss")) < 0.05
    assert np.mean(column(rec, "upper_miss")) < 0.05


def test_simulate_reps_zero(capsys):
    assert usage_error("simulate", "--reps", "0") == EXIT_USAGE


def test_simulate_poisson_method_needs_zero_trsd(capsys):
    assert usage_error("simulate", "--trsd", "0.2", "--method", "chi_square", "--reps", "10") == EXIT_USAGE


# -- curves -----------------------------------------------------------------

def test_curves_pivot_quantile_approaches_asymptote(capsys):
    rec = run(capsys, "curves", "--kind", "pivot_quantile", "--trsd", "0.2", "--level", "0.95",
              "--means", "100,1000,10000")
    q = column(rec, "normalized_quantile")
    assert column(rec, "asymptote")[0] == pytest.approx(1.76, abs=0.01)
    assert abs(q[-1] - 1.76) < abs(q[0] - 1.76) + 0.02
    assert q[-1] == pytest.approx(1.76, abs=0.02)


def test_curves_relative_ci(capsys):
    rec = run(capsys, "curves", "--kind", "relative_ci", "--trsd", "0.2", "--counts", "10")
    row = dict(zip(rec.columns, rec.rows[0]))
    assert row["lower_pct"] == pytest.approx(-51.6, abs=0.1)
    assert row["upper_pct"] == pytest.approx(110.0, abs=0.5)


def test_curves_normalized_quantiles(capsys):
    rec = run(capsys, "curves", "--kind", "normalized_quantiles", "--means", "10,50")
    assert len(rec.rows) == 4


def test_curves_pivot_cdf_series(capsys):
    rec = run(capsys, "curves", "--kind", "pivot_cdf", "--trsd", "0.2")
    series = column(rec, "series")
    names = list(dict.fromkeys(series))
    assert [n for n in names if n.startswith("exact")] == ["exact_N=5", "exact_N=15", "exact_N=25"]
    assert [n for n in names if n.startswith("approx")] == ["approx_N=15"]


def _step_cdf(rec, name):
    pts = [(r[2], r[3]) for r in rec.rows if r[0] == name]
    xs, ys = zip(*pts)
    return np.array(xs), np.array(ys)


def test_curves_pivot_cdf_near_coincidence(capsys):
    # the exact pivot cdfs at N=15 and N=25 nearly coincide; an oracle run
    # gave sup-distance 0.0608 (and 0.0947 between N=5 and N=25)
    rec = run(capsys, "curves", "--kind", "pivot_cdf", "--trsd", "0.2")
    x15, y15 = _step_cdf(rec, "exact_N=15")
    x25, y25 = _step_cdf(rec, "exact_N=25")
    grid = np.union1d(x15, x25)
    grid = grid[(grid >= max(x15[0], x25[0])) & (grid <= min(x15[-1], x25[-1]))]

    def step(xs, ys, t):
        i = np.searchsorted(xs, t, side="right") - 1
        return ys[i]

    dist = max(abs(step(x15, y15, t) - step(x25, y25, t)) for t in grid)
    assert dist < 0.065


# -- output formats ---------------------------------------------------------

def test_records_format_matches_dsv(capsys):
    dsv = run(capsys, "table", "--counts", "1,10,200")
    rec = run(capsys, "table", "--counts", "1,10,200", "--format", "records")
    assert rec.columns == dsv.columns
    for a, b in zip(rec.rows, dsv.rows):
        for x, y in zip(a, b):
            if isinstance(x, float):
                assert y == pytest.approx(x, rel=1e-5)
            else:
                assert (x if x != "" else None) == (y if y != "" else None)


def test_out_file_round_trip(tmp_path, capsys):
    path = tmp_path / "t.dsv"
    assert main(["table", "--out", str(path)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    text = path.read_text()
    assert text.startswith("# command: table")
    rec = OutputRecord.from_dsv(text)
    again = OutputRecord.from_dsv(rec.to_dsv())
    assert again.rows == rec.rows and again.meta == rec.meta


def test_records_json_is_valid(capsys):
    main(["lod", "--format", "records"])
    payload = json.loads(capsys.readouterr().out)
    assert payload["command"] == "lod"
    assert "version" in payload["meta"]
