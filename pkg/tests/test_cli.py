import io
import json
import subprocess
import sys

import numpy as np
import pytest

from stratdisc.cli import run_cli
from stratdisc.experiments import CSV_HEADER
from stratdisc.sampling import read_points, write_points


def run(*argv):
    out = io.StringIO()
    code = run_cli([str(a) for a in argv], out)
    return code, out.getvalue()


def test_bounds_grid():
    assert run("bounds", "--theorem", "cor3.4", "--d", 2, "--n", 16) == (0, "0.03125\n")
    assert run("bounds", "--theorem", "grid_mse", "--d", 2, "--n", 16) == (0, "0.03125\n")


def test_bounds_hsfc_and_options():
    code, out = run("bounds", "--theorem", "cor3.5", "--d", 2, "--n", 16)
    assert code == 0 and float(out) == pytest.approx(0.13975424859373686, rel=1e-15)
    code, out = run("bounds", "--theorem", "thm3.6", "--d", 2, "--n", 16, "--c", 7 / 144)
    assert code == 0 and float(out) == pytest.approx(7 / 144 / 15)
    code, out = run("bounds", "--theorem", "thm3.3", "--d", 2, "--n", 6, "--m", "2,3")
    assert code == 0 and float(out) > 0


def test_bounds_argument_errors():
    assert run("bounds", "--theorem", "thm3.6", "--d", 2, "--n", 16)[0] == 2
    assert run("bounds", "--theorem", "thm9.9", "--d", 2, "--n", 16)[0] == 2
    assert run("bounds", "--d", 2)[0] == 2


def test_sample_and_discrepancy(tmp_path):
    path = tmp_path / "pts.txt"
    assert run("sample", "--strategy", "jittered", "--d", 2, "--n", 16, "--seed", 4,
               "--out", path)[0] == 0
    x = read_points(path)
    assert x.shape == (16, 2)
    code, out = run("discrepancy", "--in", path, "--p", 2)
    res = json.loads(out)
    assert code == 0 and res["stderr"] is None and 0 < res["value"] < 1
    code, out = run("discrepancy", "--in", path, "--p", "star")
    assert code == 0 and json.loads(out)["p"] == "star"
    code, out = run("discrepancy", "--in", path, "--p", 3, "--nodes", 1000, "--seed", 2)
    assert code == 0 and json.loads(out)["stderr"] > 0


def test_sample_to_stdout_matches_file(tmp_path):
    path = tmp_path / "pts.txt"
    args = ("sample", "--strategy", "hsfc", "--d", 3, "--n", 8, "--seed", 1)
    run(*args, "--out", path)
    assert run(*args)[1] == path.read_text()


def test_discrepancy_single_point(tmp_path):
    path = tmp_path / "one.txt"
    path.write_text("1 1\n0.5\n")
    code, out = run("discrepancy", "--in", path, "--p", 2)
    assert code == 0 and json.loads(out)["value"] ** 2 == pytest.approx(1 / 12, abs=1e-15)
    assert json.loads(run("discrepancy", "--in", path, "--p", "star")[1])["value"] == 0.5


def test_discrepancy_errors(tmp_path):
    path = tmp_path / "big.txt"
    write_points(path, np.random.default_rng(0).random((4000, 2)))
    assert run("discrepancy", "--in", path, "--p", "star")[0] == 1
    assert run("discrepancy", "--in", path, "--p", 0.5)[0] == 2
    assert run("discrepancy", "--in", tmp_path / "missing.txt")[0] == 2


def test_expected_outputs_json_and_csv(tmp_path):
    code, out = run("expected", "--strategy", "jittered", "--d", 2, "--n", 16, "--reps", 50,
                    "--seed", 3)
    assert code == 0
    lines = out.splitlines()
    rep = json.loads(lines[0])
    assert rep["bound_id"] == "grid_mse" and rep["reps"] == 50
    assert lines[1] == CSV_HEADER
    assert lines[2].startswith("jittered,2,16,2,squared_l2,50,3,")
    csv = tmp_path / "row.csv"
    run("expected", "--strategy", "jittered", "--d", 2, "--n", 16, "--reps", 50, "--seed", 3,
        "--csv", csv)
    assert csv.read_text().splitlines() == lines[1:]


def test_expected_rejects_bad_reps():
    assert run("expected", "--strategy", "jittered", "--d", 2, "--n", 16, "--reps", 1)[0] == 2
    assert run("expected", "--strategy", "jittered", "--d", 2, "--n", 10, "--reps", 5)[0] == 2
    assert run("expected", "--strategy", "lhs", "--d", 2, "--n", 4, "--reps", 5,
               "--target", "mse_integration")[0] == 2


def test_rate_outputs_fit():
    code, out = run("rate", "--strategy", "simple_random", "--d", 2, "--n", "16,64,256",
                    "--reps", 100, "--seed", 1)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == CSV_HEADER and len(lines) == 5
    fit = json.loads(lines[-1])
    assert -1.4 < fit["slope"] < -0.6
    assert run("rate", "--strategy", "lhs", "--d", 2, "--n", "4,8", "--reps", 5)[0] == 2


def test_identical_runs_identical_output():
    args = ("expected", "--strategy", "hsfc", "--d", 2, "--n", 64, "--reps", 300, "--seed", 9)
    a = run(*args, "--threads", 1)
    b = run(*args, "--threads", 8)
    assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "stratdisc", "bounds", "--theorem", "cor3.4",
                           "--d", "2", "--n", "16"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "0.03125\n"
    proc = subprocess.run([sys.executable, "-m", "stratdisc", "nope"], capture_output=True)
    assert proc.returncode == 2
