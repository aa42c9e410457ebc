"""Shared test fixtures: a collector that prints acceptance results."""

from __future__ import annotations

import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    """Callable that records one pass/fail line for the terminal summary."""
    return _ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
