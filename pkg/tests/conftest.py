import numpy as np
import pytest
from hypothesis import settings

from gaussfit import GaussianParams, Scenario, synthesize

settings.register_profile("default", deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def noiseless_200():
    return synthesize(Scenario(GaussianParams(1.0, 10.0, 2.0), 200, 12.0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
