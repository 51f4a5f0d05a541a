"""One test per acceptance criterion; each prints its pass/fail line."""

import pytest

from otl import acceptance


@pytest.mark.parametrize("number", range(1, 11), ids=[f"criterion_{i}" for i in range(1, 11)])
def test_criterion(number, seed, capsys):
    outcome = acceptance.CRITERIA[number - 1](seed)
    with capsys.disabled():
        print("\n" + outcome.line())
    assert outcome.number == number
    assert outcome.passed, outcome.line()
