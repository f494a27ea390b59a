"""Every acceptance criterion at its stated tolerance, one line per criterion."""

from __future__ import annotations

import pytest

from heun_spectra import acceptance


@pytest.mark.parametrize(
    "number", [n for n, _, _ in acceptance.CRITERIA],
    ids=[f"criterion_{n:02d}" for n, _, _ in acceptance.CRITERIA],
)
def test_criterion(number, capsys):
    result = acceptance.run_criterion(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
