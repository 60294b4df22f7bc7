from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from towers import cubic, two_row

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def cubic_tower():
    return cubic()


@pytest.fixture
def two_row_tower():
    return two_row()


ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, named by the test's ``label`` marker."""
    label = request.node.get_closest_marker("criterion").args[0]
    state = {"ok": False}
    yield state
    line = f"{label} {'PASS' if state['ok'] else 'FAIL'}"
    ACCEPTANCE_LINES[label] = line
    print(line)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion covered by the test")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for label in sorted(ACCEPTANCE_LINES, key=lambda s: int(s[2:])):
            terminalreporter.write_line(ACCEPTANCE_LINES[label])
