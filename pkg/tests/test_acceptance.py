"""Acceptance criteria, one test each; every test prints its PASS/FAIL line.

The detuning spectrum (801 points) and rotation sweep (201 points) are shared
across criteria through a module-scoped context, so the first test pays for them.
"""

import pytest

from spincav.acceptance import CRITERIA, AcceptanceContext, run_criterion


@pytest.fixture(scope="module")
def ctx():
    return AcceptanceContext()


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, len(CRITERIA) + 1)])
def test_criterion(ctx, criterion, capsys):
    result = run_criterion(criterion, ctx)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
