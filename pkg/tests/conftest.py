import time

import pytest

from helictl.harness.config import nominal_config
from helictl.harness.simulate import run_scenario

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def report(request):
    """Record one acceptance line; it is printed immediately and repeated in
    the terminal summary."""
    lines = request.config.stash[_LINES]

    def record(number: int, passed: bool, text: str) -> None:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {text}"
        lines.append((number, line))
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)


def _timed_run(variant):
    start = time.perf_counter()
    series = run_scenario(nominal_config().with_variant(variant))
    return series, time.perf_counter() - start


@pytest.fixture(scope="session")
def nominal_proposed():
    return _timed_run("proposed")


@pytest.fixture(scope="session")
def nominal_baseline():
    return _timed_run("baseline")
