import numpy as np
import pytest

from lptime.simulate import arch1, iid_normal

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def iid_series():
    return iid_normal(4000, 7)


@pytest.fixture(scope="session")
def arch_series():
    return arch1(6000, 11)
