import csv
import io
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from hyperratak.cli import (
    BENCH_COLUMNS,
    GRID_COLUMNS,
    PADE_COLUMNS,
    POLE_COLUMNS,
    UNSTABLE_COLUMNS,
    fmt,
    main,
    parse_complex,
    parse_params,
    thread_count,
)
from hyperratak.plotting import read_ppm, render_grid_ppms

TARGET = 0.461455316241865234


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, list(csv.DictReader(io.StringIO(out))), err


class TestParsing:
    def test_params(self):
        h = parse_params("5/4", "3/2")
        assert h.alpha[0] == 1.25 and h.beta[0] == 1.5
        assert parse_params("", "").p == 0

    def test_complex(self):
        assert parse_complex("-2,0") == -2
        assert parse_complex("1.5,-2") == complex(1.5, -2)

    def test_fmt_round_trip(self):
        for x in (math.pi, 1e-300, -2.5e17, 0.1):
            assert float(fmt(x)) == x
        assert fmt(None) == "" and fmt(True) in ("true", "True", "1")

    def test_thread_cap(self, monkeypatch):
        monkeypatch.setenv("HYPERRATAK_THREADS", "1")
        assert thread_count() == 1


class TestEval:
    def test_2f0(self, capsys):
        code, rows, _ = run(capsys, "eval", "--alpha", "1,1", "--beta", "", "--z", "-2,0")
        assert code == 0 and list(rows[0]) == GRID_COLUMNS
        assert abs(float(rows[0]["re_f"]) - TARGET) <= 5e-15 * TARGET
        assert rows[0]["status"] == "converged"

    def test_zero(self, capsys):
        code, rows, _ = run(capsys, "eval", "--alpha", "", "--beta", "", "--z", "0,0")
        assert code == 0 and float(rows[0]["re_f"]) == 1 and rows[0]["k"] == "0"

    def test_log2(self, capsys):
        code, rows, _ = run(capsys, "eval", "--alpha", "1,1", "--beta", "2", "--z", "-1,0", "--oracle", "auto")
        assert code == 0 and abs(float(rows[0]["re_f"]) - math.log(2)) <= 1e-13
        assert float(rows[0]["rel_err"]) <= 1e-13

    def test_drummond(self, capsys):
        code, rows, _ = run(capsys, "eval", "--alpha", "1,1", "--beta", "", "--z", "-2,0", "--method", "drummond")
        assert code == 0 and 100 <= int(rows[0]["k"]) <= 200

    def test_kmax_exit(self, capsys):
        code, rows, _ = run(capsys, "eval", "--alpha", "1,1", "--beta", "", "--z", "-2,0", "--kmax", "10")
        assert code == 2 and rows[0]["status"] == "k_max_reached"

    def test_overflow_exit(self, capsys):
        code, _, _ = run(capsys, "eval", "--alpha", "1,1", "--beta", "", "--z", "1e305,0", "--kmax", "300")
        assert code == 3

    @pytest.mark.parametrize(
        "argv",
        [
            ["eval", "--alpha", "1,x", "--beta", "", "--z", "-2,0"],
            ["eval", "--alpha", "1", "--beta", "-2", "--z", "0.5,0"],
            ["eval", "--alpha", "1", "--beta", "", "--z", "1,2,3"],
            ["eval", "--alpha", "1", "--beta", "", "--z", "-2,0", "--method", "nope"],
            ["eval", "--alpha", "1"],
            ["nonsense"],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        assert main(argv) == 1
        capsys.readouterr()


class TestGrid:
    def test_single_cell_matches_eval(self, capsys):
        _, e, _ = run(capsys, "eval", "--alpha", "5/4", "--beta", "3/2", "--z", "2,1")
        _, g, _ = run(capsys, "grid", "--alpha", "5/4", "--beta", "3/2", "--rect", "2,2,1,1", "--res", "1,1", "--oracle", "none")
        for key in ("re_f", "im_f", "k", "status", "err_est"):
            assert e[0][key] == g[0][key]

    def test_1f1_accuracy(self, capsys, tmp_path):
        code, rows, _ = run(
            capsys, "grid", "--alpha", "5/4", "--beta", "3/2", "--rect", "-5,5,-5,5", "--res", "21,21", "--out", str(tmp_path)
        )
        assert code == 0 and float(rows[0]["frac_rel_err_le_1e-10"]) >= 0.95
        with open(tmp_path / "grid_weniger.csv", newline="") as fh:
            cells = list(csv.DictReader(fh))
        assert len(cells) == 441 and all(c["status"] for c in cells)
        assert list(cells[0]) == GRID_COLUMNS
        assert (tmp_path / "grid_weniger.png").stat().st_size > 0

    def test_ppm_is_pure_function_of_csv(self, capsys, tmp_path):
        run(capsys, "grid", "--alpha", "5/4", "--beta", "3/2", "--res", "9,7", "--out", str(tmp_path), "--no-figures")
        first = (tmp_path / "grid_weniger_phase.ppm").read_bytes()
        err = (tmp_path / "grid_weniger_error.ppm").read_bytes()
        again = tmp_path / "again"
        again.mkdir()
        render_grid_ppms(tmp_path / "grid_weniger.csv", again, "grid_weniger")
        assert (again / "grid_weniger_phase.ppm").read_bytes() == first
        assert (again / "grid_weniger_error.ppm").read_bytes() == err
        assert read_ppm(tmp_path / "grid_weniger_phase.ppm").shape == (7, 9, 3)

    def test_weniger_orders_lower(self, capsys, tmp_path):
        code, _, _ = run(
            capsys, "grid", "--alpha", "1,3/2", "--beta", "", "--rect", "-5,-0.1,-2,2", "--res", "9,9",
            "--methods", "drummond,weniger", "--oracle", "none", "--kmax", "3000", "--out", str(tmp_path), "--no-figures",
        )
        assert code == 0
        k = {}
        for m in ("drummond", "weniger"):
            with open(tmp_path / f"grid_{m}.csv", newline="") as fh:
                k[m] = [int(r["k"]) for r in csv.DictReader(fh)]
        frac = np.mean(np.array(k["weniger"]) <= np.array(k["drummond"]))
        assert frac >= 0.9

    def test_unwritable_out(self, capsys, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert main(["grid", "--alpha", "", "--beta", "", "--res", "2,2", "--out", str(blocker / "sub")]) == 1
        capsys.readouterr()

    def test_bad_resolution(self, capsys):
        assert main(["grid", "--alpha", "", "--beta", "", "--res", "0,3"]) == 1
        capsys.readouterr()


class TestOtherCommands:
    def test_poles(self, capsys, tmp_path):
        code, rows, err = run(capsys, "poles", "--case", "delta1f0", "--k", "6", "--alpha", "0.5", "--cross-check", "--out", str(tmp_path))
        assert code == 0 and len(rows) == 6 and list(rows[0]) == POLE_COLUMNS
        assert "jacobi_roots_rel" in err
        assert any(p.suffix == ".png" for p in tmp_path.iterdir())

    def test_poles_needs_alpha(self, capsys):
        assert main(["poles", "--case", "drummond1f0", "--k", "3"]) == 1
        capsys.readouterr()

    def test_pade_exp(self, capsys):
        code, rows, _ = run(capsys, "pade-exp", "--z", "0,1e6")
        assert code == 0 and list(rows[0]) == PADE_COLUMNS
        assert float(rows[0]["abs_err"]) <= 1e-12 and float(rows[0]["unitarity_defect"]) <= 1e-11

    def test_pade_exp_first_order(self, capsys):
        code, rows, _ = run(capsys, "pade-exp", "--z", "0,1", "--kmax", "2")
        assert code == 2

    def test_unstable_demo(self, capsys, tmp_path):
        code, rows, _ = run(capsys, "unstable-demo", "--out", str(tmp_path))
        assert code == 0 and list(rows[0]) == UNSTABLE_COLUMNS and len(rows) == 201
        assert float(rows[0]["drummond_direct_true"]) == float(rows[0]["weniger_stable_true"])
        wen = [float(r["weniger_stable_approx"]) for r in rows[25:45]]
        assert min(wen) <= 8 * 2.0**-52
        for m, first in (("weniger", 36), ("drummond", 75)):
            assert all(float(r[f"{m}_direct_true"]) > 1 for r in rows[first:])
        assert (tmp_path / "unstable.png").exists()

    def test_bench(self, capsys):
        code, rows, _ = run(capsys, "bench", "--ks", "0,500,1000", "--repeat", "3")
        assert code == 0 and list(rows[0]) == BENCH_COLUMNS
        zero = [r for r in rows if r["k"] == "0"]
        assert all(float(r["seconds"]) < 1e-3 for r in zero)


def test_console_script():
    env = dict(os.environ)
    proc = subprocess.run(
        [sys.executable, "-m", "hyperratak.cli", "eval", "--alpha", "", "--beta", "", "--z", "1,0"],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode == 0
    row = next(csv.DictReader(io.StringIO(proc.stdout)))
    assert abs(float(row["re_f"]) - math.e) <= 1e-13
