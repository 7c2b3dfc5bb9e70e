import numpy as np
import pytest


def pytest_configure(config):
    config.acceptance_lines = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.acceptance_lines
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(lines):
        terminalreporter.write_line(lines[key])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance(request):
    """Record one verdict line per criterion, shown in the terminal summary."""

    def record(number: int, passed: bool, detail: str, seconds: float):
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail} ({seconds:.2f}s)"
        request.config.acceptance_lines[number] = line
        print(line)
        assert passed, line

    return record
