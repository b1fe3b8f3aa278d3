"""The fourteen acceptance criteria, one test each; every run prints its verdict line."""

import pytest

from dworkmod.verify import CRITERIA, run_criterion

LINES = []          # shown again in the terminal summary


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    r = run_criterion(number)
    print(r.line())
    LINES.append(r.line())
    for d in r.details:
        print("   ", d)
    assert r.passed, r.details


def test_summary_lines(capsys):
    from dworkmod.verify import CriterionResult
    r = CriterionResult(3, "splitting round trip and contraction", True)
    assert r.line() == "[PASS] criterion  3: splitting round trip and contraction"
