import numpy as np
import pytest

CRITERIA = {}


def record(number, passed, detail=""):
    """Remember the outcome of an acceptance criterion and print it."""
    line = f"CRITERION {number:2d} {'PASS' if passed else 'FAIL'} {detail}".rstrip()
    CRITERIA[number] = line
    print(line)
    return passed


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[k])
