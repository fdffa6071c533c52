import numpy as np
import pytest

from jointmaxwell.solutions import catalog_plane_waves, polynomial_solutions


@pytest.fixture(scope="session")
def deg0():
    return polynomial_solutions(0)


@pytest.fixture(scope="session")
def deg1():
    return polynomial_solutions(1)


@pytest.fixture(scope="session")
def deg2():
    return polynomial_solutions(2)


@pytest.fixture(scope="session")
def waves():
    return catalog_plane_waves()


@pytest.fixture(scope="session")
def points():
    return np.random.default_rng(20240611).uniform(-2.0, 2.0, size=(100, 4))


@pytest.fixture(scope="session")
def few_points():
    return np.random.default_rng(7).uniform(-2.0, 2.0, size=(20, 4))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.REPORT):
        terminalreporter.write_line(mod.REPORT[key])
