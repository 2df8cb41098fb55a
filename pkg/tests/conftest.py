import math

import pytest

from p2e.series import EllipseParams, QueryPoint, default_series

WGS84_E2 = 0.0066943799901413165
GRID_PSI_DEG = tuple(range(5, 90, 10))
GRID_VARRHO = (0.3, 0.6, 0.9)
GRID_E2 = (0.001, WGS84_E2, 0.05)


def grid_points():
    """``(e2, varrho, psi_deg, point)`` over the acceptance grid with ``a = 1``."""
    for e2 in GRID_E2:
        for vr in GRID_VARRHO:
            for d in GRID_PSI_DEG:
                yield e2, vr, d, QueryPoint.from_polar(math.radians(d), 1.0 / vr)


@pytest.fixture(scope="session")
def series():
    return default_series()


@pytest.fixture(scope="session")
def wgs84():
    return EllipseParams(6378137.0, WGS84_E2)


@pytest.fixture
def unit_ellipse():
    return EllipseParams(1.0, 0.1)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Record one pass/fail line for the acceptance summary."""

    def _record(criterion: str, ok: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
