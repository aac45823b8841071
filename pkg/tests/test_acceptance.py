"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import pytest

from mps_orf.acceptance import CRITERIA, format_line, run_criterion


@pytest.mark.parametrize("number", [k for k, _, _ in CRITERIA],
                         ids=[f"c{k:02d}-{name.replace(' ', '-')}" for k, name, _ in CRITERIA])
def test_criterion(number, capsys):
    result = run_criterion(number)
    with capsys.disabled():
        print("\n" + format_line(result))
    assert result.passed, result.detail
