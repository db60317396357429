import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from optdesign import CandidateSet, FeatureMap

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# filled by tests/test_acceptance.py and echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def linear_line():
    """``f(x) = (1, x)`` on ``{-1, 0, 1}``."""
    return CandidateSet.from_points([[-1.0], [0.0], [1.0]], FeatureMap.custom([(0,), (1,)]))


@pytest.fixture
def linear_pair():
    """``f(x) = (1, x)`` on ``{-1, 1}``."""
    return CandidateSet.from_points([[-1.0], [1.0]], FeatureMap.custom([(0,), (1,)]))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
