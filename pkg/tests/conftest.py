import numpy as np
import pytest

from slspec.potential import Potential


def pot(f, M=1024):
    return Potential.from_function(f, M)


@pytest.fixture(scope="session")
def cos_pi():
    return pot(lambda x: np.cos(np.pi * x))


@pytest.fixture(scope="session")
def bumpy():
    """A potential without symmetry, used as the generic nontrivial case."""
    return pot(lambda x: 1.0 + np.sin(3 * np.pi * x) + x**2)


# acceptance criteria report one line each at the end of the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
