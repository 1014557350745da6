import sys

import numpy as np
import pytest

from stable_stats.field import field_make


@pytest.fixture(scope="session")
def F2():
    return field_make(2)


@pytest.fixture(scope="session")
def F3():
    return field_make(3)


@pytest.fixture(scope="session")
def F4():
    return field_make(2, 2)


def all_matrices(n, q):
    """Every n x n array over Z/q as int8, in code order (oracle helper)."""
    codes = np.arange(q ** (n * n))
    digits = (codes[:, None] // q ** np.arange(n * n - 1, -1, -1)) % q
    return digits.reshape(-1, n, n).astype(np.int8)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
