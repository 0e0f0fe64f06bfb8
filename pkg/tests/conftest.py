import pytest
from hypothesis import HealthCheck, settings

from cuttree.randomness import make_rng

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return make_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
