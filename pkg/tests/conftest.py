import random
import sys

import pytest
from hypothesis import HealthCheck, settings

from tempograph.core import Edge, TemporalGraph

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def p3():
    return TemporalGraph(3, (Edge(0, 1, 1), Edge(1, 2, 2)), 2)


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
