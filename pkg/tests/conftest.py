import pytest
from scipy import stats

from nbcount import CountModel


def scipy_law(N, s):
    """Independent reference distribution from scipy for the (N, s) law."""
    if s == 0:
        return stats.poisson(N)
    r = 1.0 / s ** 2
    p = N * s * s / (1.0 + N * s * s)
    # scipy's nbinom counts failures with success probability 1 - p
    return stats.nbinom(r, 1.0 - p)


@pytest.fixture
def reference_model():
    return CountModel(10.0, 0.2)


# One summary line per acceptance criterion, filled in by test_acceptance.py.
ACCEPTANCE: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k)):
        terminalreporter.write_line(ACCEPTANCE[key])
