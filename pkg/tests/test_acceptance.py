"""Full-scale reproduction experiments, one test per named criterion.

Each test prints a single PASS/FAIL line followed by the individual checks.
These run at their stated scale; with the compiled kernels the whole set takes about a minute.
"""
import pytest

from paramctl.harness.acceptance import CRITERIA, run_criterion


@pytest.mark.acceptance
@pytest.mark.parametrize("name", list(CRITERIA), ids=[f"{num:02d}-{fn.__name__}" for num, fn in CRITERIA.values()])
def test_criterion(name, capsys):
    res = run_criterion(name)
    with capsys.disabled():
        print()
        print(res.report())
    assert res.passed, res.report()
