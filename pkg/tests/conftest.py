from __future__ import annotations

import numpy as np
import pytest

from momdil.ensemble import gen_coisometry_ensemble, gen_row_contraction_ensemble

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Store one acceptance line; call as ``record(number, passed, detail)``."""

    def _record(number: int, passed: bool, detail: str) -> bool:
        ACCEPTANCE[number] = (bool(passed), detail)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240601))


def dominated_ensembles(count: int, slack: float = 0.1):
    """Row-contraction ensembles cycling through small d, n and scenario counts."""
    out = []
    for j in range(count):
        d, n, k = 1 + j % 3, 1 + (j // 3) % 3, 1 + j % 5
        out.append(gen_row_contraction_ensemble(d, n, k, seed=100 + j, slack=slack))
    return out


def coisometry_ensembles(count: int):
    return [gen_coisometry_ensemble(1 + j % 3, 1 + (j // 3) % 3, 1 + j % 4, seed=200 + j)
            for j in range(count)]
