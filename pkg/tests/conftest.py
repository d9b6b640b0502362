from __future__ import annotations

import numpy as np
import pytest

from wdist.field import make_field, validate_params


@pytest.fixture(scope="session")
def setup():
    """setup(p, n, k) -> (CodeParams, FieldCtx), built once per session."""
    cache = {}

    def get(p, n, k):
        if (p, n, k) not in cache:
            cache[(p, n, k)] = (validate_params(p, n, k), make_field(p, n))
        return cache[(p, n, k)]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion():
    """criterion(number, name, ok, detail) records and prints one PASS/FAIL line."""

    def record(number: int, name: str, ok: bool, detail: str = "") -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {name}" + (f" ({detail})" if detail else "")
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
