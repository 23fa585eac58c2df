import numpy as np
import pytest

from lpa_lab.core_model import PortfolioScenario, ProjectParams


def make_scenario(R=3.0, I=1.0, c=0.1, lam=(0.5, 0.5), p=(0.2, 0.2), rho=1.0):
    return PortfolioScenario(
        R=R, I=I, c=c,
        projects=(ProjectParams(lam[0], p[0]), ProjectParams(lam[1], p[1])),
        rho=rho,
    )


@pytest.fixture
def s0():
    """Symmetric projects, perfectly correlated."""
    return make_scenario()


@pytest.fixture
def s1():
    """Asymmetric projects at moderate correlation, above the regime threshold."""
    return make_scenario(c=0.05, lam=(0.4, 0.6), p=(0.3, 0.1), rho=0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def record():
    """Log one PASS/FAIL line for an acceptance criterion, then assert it."""

    def _record(number: int, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        assert ok, line

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
