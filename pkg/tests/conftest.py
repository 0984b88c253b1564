import sys

import pytest

from dreadlock import EntireMap


@pytest.fixture(scope="session")
def exp2():
    return EntireMap.exponential(-2)


@pytest.fixture(scope="session")
def exp1():
    return EntireMap.exponential(-1)


@pytest.fixture(scope="session")
def sinh2():
    # 2 sinh z: critical values +-2i, repelling fixed point 0
    return EntireMap.cosine(1, -1)


@pytest.fixture(scope="session")
def cosh2():
    return EntireMap.cosine(1, 1)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
