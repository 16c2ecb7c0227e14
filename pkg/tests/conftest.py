import numpy as np
import pytest
from hypothesis import settings

from support import Oscillator, Pendulum

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def oscillator():
    return Oscillator()


@pytest.fixture
def pendulum():
    return Pendulum()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import VERDICTS

    if VERDICTS:
        terminalreporter.section("acceptance")
        for line in VERDICTS:
            terminalreporter.write_line(line)
