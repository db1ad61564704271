from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from impedance_mtd.fabric import ConstraintLimits, build_state, new_fabric

settings.register_profile("repo", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def geometry():
    return new_fabric(16, 16)


@pytest.fixture
def column_limits():
    return ConstraintLimits(0, 0, 0, 15, frozenset(range(4)), frozenset(range(4)))


@pytest.fixture
def byte_state(geometry, column_limits):
    """One 8-bit register in CLB column 0, default placement."""
    return build_state(geometry, [(0, column_limits, 8)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
