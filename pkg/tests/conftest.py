import numpy as np
import pytest

from swapgrid.core import DemandProfile, SystemParams, baseline_params, baseline_profile
from swapgrid.regulation import RegulationMarket


@pytest.fixture(scope="session")
def params() -> SystemParams:
    return baseline_params()


@pytest.fixture(scope="session")
def profile() -> DemandProfile:
    return baseline_profile()


@pytest.fixture(scope="session")
def market(params) -> RegulationMarket:
    return RegulationMarket.bundled(params.theta)


def flat_profile(rho_s: float, mu_st: float, sigma2_st: float) -> DemandProfile:
    """Single-scenario profile with the same per-station rate all day."""
    mu = np.full((24, 1), rho_s * mu_st)
    sig2 = np.full(24, rho_s * sigma2_st)
    kappa = np.ones((24, 1))
    return DemandProfile(kappa=kappa, mu_bar=mu, sigma2_bar=sig2)


@pytest.fixture(scope="session")
def zero_profile() -> DemandProfile:
    return flat_profile(0.04, 0.0, 0.0)


# Acceptance tests register one line per criterion here; the summary hook
# prints them after the run so every invocation shows the scorecard.
ACCEPTANCE_LINES = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = (passed, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        passed, detail = ACCEPTANCE_LINES[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status} - {detail}")
