import numpy as np
import pytest
from hypothesis import settings

from parentham.operators import SystemShape

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def q2():
    return SystemShape.qubits(2)


@pytest.fixture
def q3():
    return SystemShape.qubits(3)


@pytest.fixture
def q4():
    return SystemShape.qubits(4)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_line():
    """Record one summary line; all lines are echoed after the run."""
    def add(line: str) -> None:
        print(line)
        ACCEPTANCE_LINES.append(line)
    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
