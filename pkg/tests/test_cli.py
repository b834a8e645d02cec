import csv
import math
import subprocess
import sys

import numpy as np
import pytest

from focalrenorm import focal
from focalrenorm.cli import run
from focalrenorm.export import grid_rows, pgm_text, read_pgm


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_focal_row_count(tmp_path):
    out = tmp_path / "g.csv"
    argv = ["focal", "--mode", "asymptotic", "--ell", "-1", "--t-max", "9.42",
            "--t-steps", "512", "--x-steps", "256", "--out", str(out)]
    assert run(argv) == 0
    data = rows(out)
    assert data[0] == ["t", "x", "index", "flag"]
    assert len(data) - 1 == 512 * 256


def test_reproducible_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(["renorm", "--potential", "pendulum", "--n", "100,1000", "--eps", "0.2",
                    "--t-samples", "4", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.cells.csv").read_bytes() == (tmp_path / "b.cells.csv").read_bytes()


def test_renorm_outputs(tmp_path):
    out, cells = tmp_path / "r.csv", tmp_path / "cells.csv"
    assert run(["renorm", "--potential", "quartic:+1", "--n", "100", "--eps", "0.1",
                "--v-grid", "-1:1:5", "--t-samples", "3", "--out", str(out), "--cells", str(cells)]) == 0
    table = rows(out)
    assert table[0] == ["n", "sup_error", "window"] and table[1][0] == "100"
    per_cell = rows(cells)
    assert per_cell[0] == ["n", "v", "t", "x_n", "X", "abs_err"]
    assert len(per_cell) == 1 + 5 * 3


@pytest.mark.parametrize("argv", [
    ["renorm", "--potential", "pendulum", "--n", "100", "--eps", "0.5", "--out", "-"],
    ["renorm", "--potential", "pendulum", "--n", "1000,100", "--eps", "0.2", "--out", "-"],
    ["elliptic", "--u", "1", "--m", "1.0"],
    ["elliptic", "--u", "nan", "--m", "0.2"],
    ["period", "--potential", "cosine", "--v", "0.1", "--out", "-"],
    ["focal", "--mode", "numeric", "--out", "-"],
    ["bogus"],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == 2


def test_band_violation_exit_code(capsys):
    assert run(["period", "--potential", "quartic:-1", "--v", "0.9", "--out", "-"]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and "band" in err[0]


def test_window_violation_exit_code(capsys):
    argv = ["focal", "--mode", "renormalized", "--potential", "quartic:-1", "--n", "10",
            "--t-max", "5", "--t-steps", "4", "--x-steps", "3", "--out", "-"]
    assert run(argv) == 1
    assert "window" in capsys.readouterr().err


def test_elliptic_output(capsys):
    assert run(["elliptic", "--u", "0", "--m", "0.3"]) == 0
    header, line = capsys.readouterr().out.splitlines()
    assert header == "u,m,sn,cn,dn,sd,K"
    vals = [float(v) for v in line.split(",")]
    assert vals[2:6] == [0.0, 1.0, 1.0, 0.0]


def test_trajectory_csv(tmp_path):
    out = tmp_path / "traj.csv"
    assert run(["trajectory", "--potential", "quartic:+1", "--v", "0.3", "--t-max", "20",
                "--tol", "1e-12", "--samples", "101", "--out", str(out)]) == 0
    data = rows(out)
    assert data[0] == ["t", "x", "xdot", "energy"] and len(data) == 102
    assert float(data[1][2]) == 0.3
    assert all(len(r[1]) <= 24 for r in data[1:])
    assert run(["trajectory", "--potential", "pendulum", "--v", "0.2", "--t-max", "0",
                "--out", str(out)]) == 0
    assert rows(out)[1] == ["0", "0", "0.20000000000000001", "0.020000000000000004"]


def test_period_fit_line(tmp_path, capsys):
    out = tmp_path / "T.csv"
    assert run(["period", "--potential", "pendulum", "--v-grid", "0.01:0.1:10", "--fit",
                "--out", str(out)]) == 0
    line = capsys.readouterr().out.strip()
    assert line.startswith("# fit v2_coefficient=")
    fields = dict(kv.split("=") for kv in line[2:].split()[1:])
    assert float(fields["v2_coefficient"]) == pytest.approx(0.75 * math.pi, rel=1e-2)
    data = rows(out)
    assert data[0] == ["v", "T"] and len(data) == 11


def test_period_physical_units(tmp_path):
    out = tmp_path / "T.csv"
    assert run(["period", "--potential", "pendulum", "--v", "1.0", "--physical", "--out", str(out)]) == 0
    from focalrenorm import complete_k
    assert float(rows(out)[1][1]) == pytest.approx(4 * complete_k(0.25), abs=1e-10)


def test_pgm_format(tmp_path):
    g = focal.asymptotic_grid(-1, (0, 3 * math.pi), (-1, 1), (16, 9))
    path = tmp_path / "g.pgm"
    assert run(["focal", "--ell", "-1", "--t-steps", "16", "--x-steps", "9", "--out",
                str(tmp_path / "g.csv"), "--image", str(path)]) == 0
    text = path.read_text()
    assert text.startswith("P2\n16 9\n255\n")
    img = read_pgm(path)
    assert img.shape == (9, 16)
    assert img[4, 0] == 255  # origin carries the infinite index
    assert text == pgm_text(g)
    np.testing.assert_array_equal(img[::-1].T[1:], g.index[1:])


def test_grid_rows_use_inf_literal():
    g = focal.asymptotic_grid(1, (0, 1), (-1, 1), (2, 3))
    cells = list(grid_rows(g))
    assert cells[1][2] == "inf" and cells[1][3] == "certain"


def test_numeric_mode_runs(tmp_path):
    out = tmp_path / "n.csv"
    assert run(["focal", "--mode", "numeric", "--potential", "pendulum", "--t-steps", "6",
                "--x-steps", "5", "--samples", "201", "--out", str(out)]) == 0
    assert len(rows(out)) == 31
    assert run(["focal", "--mode", "numeric", "--potential", "pendulum", "--v-band", "-1.5,1.5",
                "--t-steps", "2", "--x-steps", "2", "--samples", "51", "--out", str(out)]) == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "focalrenorm", "elliptic", "--u", "1.2", "--m", "0"],
                          capture_output=True, text=True, check=True)
    sn = float(proc.stdout.splitlines()[1].split(",")[2])
    assert sn == pytest.approx(math.sin(1.2), abs=1e-15)
