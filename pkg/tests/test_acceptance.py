"""Acceptance criteria 1-10, each reported as one pass/fail line."""

import filecmp
import os

import pytest

from oswave import acceptance, cli

SEED = 0


def report(capsys, result):
    with capsys.disabled():
        print("\n" + result.line())
    return result


@pytest.mark.parametrize("number", sorted(acceptance.CHECKS))
def test_criterion(number, capsys):
    r = report(capsys, acceptance.run_check(number, quick=False, seed=SEED))
    assert r.passed, r.line()


def test_criterion_10_determinism(tmp_path, capsys):
    dirs = [tmp_path / "first", tmp_path / "second"]
    for d in dirs:
        with capsys.disabled():
            cli.run(["selftest", "--quick", "--seed", "3", "--out", str(d)])
    names = sorted(os.listdir(dirs[0]))
    assert names == sorted(os.listdir(dirs[1])) and "summary.csv" in names
    match, mismatch, errors = filecmp.cmpfiles(dirs[0], dirs[1], names, shallow=False)
    same = not mismatch and not errors
    r = acceptance.CriterionResult(10, "determinism", same,
                                   f"{len(match)} artifacts from two selftest runs, byte-identical: {same}")
    report(capsys, r)
    assert same, r.line()
