import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from treesampler.fixtures import g1, g2, g3, skewed

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def G1():
    return g1()


@pytest.fixture
def G2():
    return g2()


@pytest.fixture
def G3():
    return g3()


@pytest.fixture
def SKEWED():
    return skewed()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
