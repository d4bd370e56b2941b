"""The twelve acceptance criteria, each at its stated tolerance.

Every test prints one ``[PASS]`` or ``[FAIL]`` line with the measured values,
so the report is visible in ``pytest -v`` output even when capture is on.
"""

import pytest

from qforge.acceptance import CRITERIA


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = CRITERIA[number]()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
