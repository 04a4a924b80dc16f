"""The twelve acceptance criteria, each at its stated time limit.

Every run prints its one-line verdict (visible with ``pytest -s`` or in the
captured output of a failure).
"""
import pytest

from steinhaus.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"C{c[0]}-{c[1]}" for c in CRITERIA])
def test_criterion(number):
    result = run_criterion(number, seed=0)
    print(result.line())
    assert result.passed, result.line()
