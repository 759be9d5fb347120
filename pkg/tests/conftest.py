"""Collects the one-line acceptance verdicts and prints them after the run."""
import pytest

_LINES = {}


@pytest.fixture
def report():
    def add(criterion, ok, detail):
        _LINES[criterion] = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    return add


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_LINES):
        terminalreporter.write_line(_LINES[key])
