import csv
import io
import math

import numpy as np
import pytest

from oswave import cli


def run_out(capsys, argv):
    code = cli.run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    lines = [ln for ln in text.splitlines() if ln and "=" not in ln]
    return list(csv.reader(io.StringIO("\n".join(lines))))


def test_number_format():
    assert cli.fmt(True) == "1" and cli.fmt(np.int64(3)) == "3"
    assert cli.fmt(0.1) == "1.0000000000000001e-01"
    text = cli.csv_text(("a", "b"), [(1, 2.5)], (("x", math.pi),))
    assert text == "a,b\n1,2.5000000000000000e+00\nx=3.1415926535897931e+00\n"


def test_specfun_table(capsys):
    code, out, _ = run_out(capsys, ["specfun-table", "--points", "3", "--radius", "1"])
    rows = rows_of(out)
    assert code == 0
    assert rows[0] == ["k", "re_z", "im_z", "re_ai", "im_ai"]
    assert len(rows) == 1 + 4 * 9
    origin = [r for r in rows[1:] if r[0] == "0" and float(r[1]) == 0 and float(r[2]) == 0][0]
    assert float(origin[3]) == pytest.approx(0.355028053887817)


def test_tietjens_table(capsys):
    code, out, _ = run_out(capsys, ["specfun-table", "--tietjens", "--points", "5", "--s-min", "1",
                                    "--s-max", "5"])
    rows = rows_of(out)
    assert rows[0] == ["s", "re_ti", "im_ti"] and len(rows) == 6


def test_dispersion(capsys):
    code, out, _ = run_out(capsys, ["dispersion", "--n", "60"])
    assert code == 0
    rows = rows_of(out)
    assert rows[0] == ["alpha0", "re_c0", "im_c0", "sigma", "residual"]
    assert len(rows) == 61
    footer = dict(ln.split("=") for ln in out.splitlines() if "=" in ln)
    assert 0.5 < float(footer["alpha_c"]) < float(footer["alpha_M"]) < 6


def test_config_merge(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nn = 50\nalpha0-max = 5\n")
    code, out, _ = run_out(capsys, ["dispersion", "--config", str(cfg), "--n", "55"])
    rows = rows_of(out)
    assert code == 0 and len(rows) == 56
    assert float(rows[-1][0]) == pytest.approx(5.0)


def test_config_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("wibble = 1\n")
    assert cli.run(["dispersion", "--config", str(cfg)]) == 2
    assert cli.run(["dispersion", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_usage_errors(capsys):
    assert cli.run(["dispersion", "--bogus"]) == 2
    assert cli.run(["nonsense"]) == 2
    assert cli.run(["eigenmode", "--nu", "0.5"]) == 2
    assert cli.run([]) == 2


def test_domain_error_exit_code(capsys):
    code, _, err = run_out(capsys, ["oracle", "--n", "10"])
    assert code == 1
    assert err.startswith("oswave: ParameterError")


def test_output_file(tmp_path, capsys):
    target = tmp_path / "mode.csv"
    code, out, _ = run_out(capsys, ["eigenmode", "--points", "11", "--out", str(target)])
    assert code == 0 and out == ""
    text = target.read_text()
    assert rows_of(text)[0][:3] == ["z", "re_psi", "im_psi"]
    assert "wall_residual=" in text


def test_repeatable(capsys):
    argv = ["eigenmode", "--points", "21", "--seed", "4"]
    _, first, _ = run_out(capsys, argv)
    _, second, _ = run_out(capsys, argv)
    assert first == second


def test_oracle_subcommand(capsys):
    code, out, _ = run_out(capsys, ["oracle", "--n", "64", "--nu", "1e-4"])
    rows = rows_of(out)
    assert code == 0 and rows[0] == ["re_c", "im_c", "retained"]
    im = [float(r[1]) for r in rows[1:]]
    assert im == sorted(im, reverse=True)
    assert {r[2] for r in rows[1:]} <= {"0", "1"}
