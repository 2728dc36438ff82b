"""Runs each numbered acceptance criterion; conftest prints one line per criterion."""

import pytest

from distmul.acceptance import CRITERIA, run_criterion

RESULTS = {}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    result = run_criterion(number)
    RESULTS[number] = result
    print(result.line())
    failed = [c.to_dict() for c in result.checks if not c.passed]
    assert result.passed, failed
