"""The demo scripts must keep running against the public API."""

from __future__ import annotations

import runpy
from pathlib import Path

import pytest

DEMOS = sorted((Path(__file__).parent.parent / "demos").glob("*.py"))


@pytest.mark.parametrize("script", DEMOS, ids=lambda p: p.stem)
def test_demo_runs(script, capsys):
    runpy.run_path(str(script), run_name="__main__")
    out = capsys.readouterr().out
    assert out.strip()


def test_blowup_demo_reports_closed_ledger(capsys):
    runpy.run_path(str(DEMOS[0]), run_name="__main__")
    out = capsys.readouterr().out
    assert "term = 9" in out and "term = -1" in out and "term = -8" in out
    assert "ledger closes: True" in out
