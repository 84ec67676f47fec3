import numpy as np
import pytest

ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def accept(request):
    """Record one pass/fail line for an acceptance criterion."""

    def record(number, title, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}  {title}"
        if detail:
            line += f"  ({detail})"
        request.config.stash[ACCEPTANCE].append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
