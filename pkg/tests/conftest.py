import numpy as np
import pytest

from uav_delivery import geo


@pytest.fixture
def heathrow():
    return geo.heathrow_fixture()


@pytest.fixture
def small_instance():
    return geo.generate_instance(25, geo.HEATHROW, 8_000.0, seed=11)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import VERDICTS

    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[number])
