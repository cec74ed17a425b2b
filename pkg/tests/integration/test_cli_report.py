from __future__ import annotations

import json
from typing import TYPE_CHECKING

from typer.testing import CliRunner

from torpedo import acceptance
from torpedo.__main__ import app


if TYPE_CHECKING:
    from pathlib import Path

    import pytest


runner = CliRunner()


def _fast_criteria(*, fail: bool):
    def criteria(*_args: object, **_kwargs: object) -> dict[str, tuple[str, object]]:
        return {
            '1': ('Exhaustive classical values', acceptance._classical_values),
            '2': ('Forced outcome', lambda: (not fail, 'forced')),
        }

    return criteria


def test_report_passes_and_writes_ratios(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    # Arrange
    monkeypatch.setattr(acceptance, '_criteria', _fast_criteria(fail=False))
    ratios = tmp_path / 'ratios.csv'

    # Act
    res = runner.invoke(app, ['report', '--csv', str(ratios)])

    # Assert
    assert res.exit_code == 0, res.output
    result = json.loads(res.stdout)['result']
    assert result['passed']
    assert [c['id'] for c in result['criteria']] == ['1', '2']
    lines = ratios.read_text(encoding='utf-8').splitlines()
    assert lines[0] == 'game,d,quantum,classical,ratio'
    assert len(lines) == 5


def test_report_exits_one_when_a_criterion_fails(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(acceptance, '_criteria', _fast_criteria(fail=True))

    res = runner.invoke(app, ['report'])

    assert res.exit_code == 1
    assert not json.loads(res.stdout)['result']['passed']
