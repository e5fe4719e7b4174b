"""Machine reports for the built-in reproductions are frozen byte-for-byte."""

from __future__ import annotations

import pathlib

import pytest

from vgw.cli import main

GOLDEN = pathlib.Path(__file__).parent / "golden"

CASES = [
    ("projspace", "projspace.txt"),
    ("blowup-p1cubed", "blowup-p1cubed.txt"),
    ("blowup-c4", "blowup-c4.txt"),
    ("crepant-res(3)", "crepant-res-3.txt"),
    ("delpezzo", "delpezzo.txt"),
    ("threepoint(2)", "threepoint-2.txt"),
    ("c1-blowup", "c1-blowup.txt"),
    ("flop", "flop.txt"),
    ("nodal", "nodal.txt"),
]


@pytest.mark.parametrize("rid,fname", CASES, ids=[c[0] for c in CASES])
def test_machine_report_matches_golden(rid, fname, capsys):
    assert main(["repro", rid, "--format", "machine"]) == 0
    out = capsys.readouterr().out
    assert out == (GOLDEN / fname).read_text()
