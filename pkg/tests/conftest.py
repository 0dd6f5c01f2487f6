import functools

import numpy as np
import pytest

from bicoset.group import enumerate_group
from bicoset.subgroups import search


@functools.lru_cache(maxsize=None)
def cert_for(p, d, mode="scan"):
    """Search result shared across tests; treat as read-only."""
    return search(p, d, mode=mode)[0]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def index5():
    return enumerate_group(5)


@pytest.fixture(scope="session")
def index11():
    return enumerate_group(11)


ACCEPTANCE_LINES = []


def record(n, ok, detail):
    """Log one acceptance criterion outcome; printed in the terminal summary."""
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
