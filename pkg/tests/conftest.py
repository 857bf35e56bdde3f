from __future__ import annotations

import pytest

from pairhop.model import SystemParams

_ACCEPTANCE: list[str] = []


def record_acceptance(criterion: int, passed: bool, detail: str) -> str:
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'} | {detail}"
    _ACCEPTANCE.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture
def fig3_params() -> SystemParams:
    return SystemParams(4 / 3, 1.0, 4 / 3, 0.06, 1e-4, 1e-4, 1e-4)


@pytest.fixture
def closed_params() -> SystemParams:
    return SystemParams(4 / 3, 1.0, 4 / 3, 0.06)


@pytest.fixture
def small_params() -> SystemParams:
    return SystemParams(4 / 3, 1.0, 4 / 3, 0.06, 1e-4, 1e-4, 1e-4, cutoffs=(3, 2, 3))
