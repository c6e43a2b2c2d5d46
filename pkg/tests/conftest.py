import functools

import pytest

from shapelab.geometry import make_disk_mesh

# (criterion number, PASS/FAIL, detail) recorded by test_acceptance.py
ACCEPTANCE_LINES = []


def record(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@functools.lru_cache(maxsize=None)
def disk_mesh(n_boundary: int = 256, n_rings: int = 40, radius: float = 1.0):
    return make_disk_mesh(radius, n_boundary, n_rings)


@pytest.fixture(scope="session")
def fine_disk():
    """Unit disk with h_max below 0.05."""
    return disk_mesh()


@pytest.fixture(scope="session")
def coarse_disk():
    return disk_mesh(48, 8)
