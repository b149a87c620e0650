import math

import numpy as np
import pytest

from anglemono import PlaneGraph


@pytest.fixture
def square():
    """Unit square with the diagonal (0,0)-(1,1); vertex ids 0..3 counterclockwise from the origin."""
    return PlaneGraph([[0, 0], [1, 0], [1, 1], [0, 1]], [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)])


@pytest.fixture
def triangle():
    """Equilateral triangle (0,0), (1,0), (1/2, sqrt(3)/2)."""
    return PlaneGraph([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]], [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ---------------------------------------------------------------------------
# acceptance summary: one PASS/FAIL line per criterion, printed at the end of the run
# ---------------------------------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}")
