import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nbcount import (
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
from nbcount.errors import ConvergenceError, DomainError

from conftest import scipy_law


def test_count_model_validation():
    with pytest.raises(DomainError):
        CountModel(0.0, 0.2)
    with pytest.raises(DomainError):
        CountModel(5.0, 1.0)
    with pytest.raises(DomainError):
        CountModel(5.0, -0.1)


@pytest.mark.parametrize(
    "N, s, p, r",
    [(5.0, 0.2, 1 / 6, 25.0), (10.0, 0.2, 2 / 7, 25.0)],
)
def test_to_nb_params(N, s, p, r):
    prm = to_nb_params(CountModel(N, s))
    assert prm.p == pytest.approx(p, rel=1e-14)
    assert prm.r == pytest.approx(r, rel=1e-14)
    assert prm.mean == pytest.approx(N, rel=1e-12)
    assert prm.variance == pytest.approx(N + s * s * N * N, rel=1e-12)


def test_to_nb_params_rejects_poisson():
    with pytest.raises(DomainError):
        to_nb_params(CountModel(5.0, 0.0))


def test_small_s_approaches_poisson():
    prm = to_nb_params(CountModel(7.0, 1e-4))
    assert prm.p < 1e-6
    assert prm.mean == pytest.approx(7.0, rel=1e-12)


@given(st.floats(0.01, 1e4), st.floats(0.01, 0.99))
def test_params_round_trip(N, s):
    m = from_nb_params(to_nb_params(CountModel(N, s)))
    assert m.mean_count == pytest.approx(N, rel=1e-12)
    assert m.trsd == pytest.approx(s, rel=1e-12)


def test_nb_params_validation():
    with pytest.raises(DomainError):
        NBParams(1.0, 2.0)
    with pytest.raises(DomainError):
        NBParams(0.5, 0.0)


def test_variance():
    assert variance(CountModel(3.0, 0.0)) == 3.0
    assert variance(CountModel(10.0, 0.2)) == pytest.approx(14.0)
    assert variance(CountModel(5.0, 0.2)) == pytest.approx(6.0)


@pytest.mark.parametrize("n, expected", [(1, 102), (3, 61), (5, 49), (7, 43), (10, 37),
                                         (20, 30), (50, 24), (100, 22), (200, 21)])
def test_rsd_of_count_table_values(n, expected):
    assert round(rsd_of_count(n, 0.2)) == expected


def test_rsd_large_count_limit():
    assert rsd_of_count(1e9, 0.2) == pytest.approx(20.0, abs=1e-3)
    with pytest.raises(DomainError):
        rsd_of_count(0, 0.2)


def test_pmf_at_zero_closed_form():
    assert nb_pmf(0, CountModel(5.0, 0.2)) == pytest.approx((5 / 6) ** 25, rel=1e-12)
    assert nb_pmf(0, CountModel(5.0, 0.2)) == pytest.approx(0.01048, abs=1e-5)


@pytest.mark.parametrize("s", [0.0, 0.2, 0.4])
@pytest.mark.parametrize("N", [1, 2, 5, 13, 40, 100])
def test_pmf_moments(N, s):
    m = CountModel(float(N), s)
    total = mean = second = 0.0
    n = 0
    while True:
        p = nb_pmf(n, m)
        total += p
        mean += n * p
        second += n * n * p
        if 1.0 - total < 1e-12 and n > N:
            break
        n += 1
    assert total == pytest.approx(1.0, abs=1e-9)
    assert mean == pytest.approx(N, rel=1e-6)
    assert second - mean ** 2 == pytest.approx(N + s * s * N * N, rel=1e-6)


@pytest.mark.parametrize("N", [1, 5, 15, 25])
@pytest.mark.parametrize("s", [0.0, 0.2, 0.4, 0.7])
def test_pmf_and_cdf_match_scipy(N, s):
    ref = scipy_law(N, s)
    m = CountModel(float(N), s)
    for n in range(0, int(N + 6 * m.sd) + 2):
        assert nb_pmf(n, m) == pytest.approx(ref.pmf(n), rel=1e-10, abs=1e-300)
        assert nb_cdf(n, m) == pytest.approx(ref.cdf(n), rel=1e-10, abs=1e-14)


def test_poisson_branch_matches_poisson_formula():
    for N in (0.5, 3.0, 17.0, 50.0):
        m = CountModel(N, 0.0)
        for n in range(0, 201):
            direct = math.exp(-N + n * math.log(N) - math.lgamma(n + 1))
            assert nb_pmf(n, m) == pytest.approx(direct, rel=1e-12, abs=1e-300)


def test_non_integer_r():
    m = CountModel(4.0, 0.3)  # r = 11.11...
    ref = scipy_law(4.0, 0.3)
    assert nb_pmf(3, m) == pytest.approx(ref.pmf(3), rel=1e-10)


def test_cdf_basics():
    m = CountModel(5.0, 0.2)
    assert nb_cdf(0, m) == nb_pmf(0, m)
    assert nb_cdf(-1, m) == 0.0
    vals = [nb_cdf(n, m) for n in range(60)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(1.0, abs=1e-12)


def test_background_quantile_from_the_detection_example():
    m = CountModel(1.9625, 0.2)
    assert nb_cdf(7, m) < 0.999 <= nb_cdf(8, m)
    assert nb_quantile_exact(0.999, m) == 8


def test_poisson_quantile_by_summation():
    m = CountModel(4.0, 0.0)
    assert nb_cdf(7, m) == pytest.approx(0.94886638, abs=1e-7)
    assert nb_quantile_exact(0.95, m) == 8


def test_quantile_tiny_level_is_zero():
    assert nb_quantile_exact(1e-9, CountModel(5.0, 0.2)) == 0


@pytest.mark.parametrize("b", [0.0, 1.0])
def test_quantile_domain(b):
    with pytest.raises(DomainError):
        nb_quantile_exact(b, CountModel(5.0, 0.2))


def test_quantile_iteration_cap():
    with pytest.raises(ConvergenceError):
        nb_quantile_exact(0.999, CountModel(50.0, 0.2), max_terms=20)


@pytest.mark.parametrize("s", [0.0, 0.2, 0.4])
def test_quantile_matches_scipy_and_is_monotone(s):
    levels = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 0.9999]
    prev_by_level = None
    for N in [0.5, 1, 2, 3.3, 7, 12, 30, 60, 100]:
        qs = [nb_quantile_exact(b, CountModel(float(N), s)) for b in levels]
        ref = scipy_law(N, s)
        assert qs == [int(ref.ppf(b)) for b in levels]
        assert qs == sorted(qs)
        if prev_by_level is not None:
            assert all(q >= p for q, p in zip(qs, prev_by_level))
        prev_by_level = qs


def test_pivot():
    assert pivot(7.0, 7.0, 0.2) == 0.0
    assert pivot(20, 10, 0.2) == pytest.approx(10 / math.sqrt(14))
    assert pivot(10 + math.sqrt(10), 10, 0.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        pivot(1, 0, 0.2)
