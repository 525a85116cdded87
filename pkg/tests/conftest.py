import pytest

from pweak.power_arcs import Interval
from pweak.weights import ConstructionParams, build


@pytest.fixture(scope="session")
def seq200():
    return build(ConstructionParams(alpha=1.0, window=Interval(0, 1), max_stages=200))


@pytest.fixture(scope="session")
def seq100():
    return build(ConstructionParams(alpha=1.0, window=Interval(0, 1), max_stages=100))


@pytest.fixture(scope="session")
def seq50():
    return build(ConstructionParams(alpha=1.0, window=Interval(0, 1), max_stages=50))


ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
