import json
import subprocess
import sys

import numpy as np
import pytest

from ncchaos.cli import run
from ncchaos.kernels import Kernel


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_nc_count(capsys):
    assert call(capsys, "nc", "count", "--n", "4") == (0, "14\n", "")


def test_nc_riordan_and_pairings(capsys):
    code, out, _ = call(capsys, "nc", "riordan", "--n", "6")
    rows = out.strip().splitlines()
    assert code == 0 and "6,2,9" in rows and "6,3,5" in rows
    code, out, _ = call(capsys, "nc", "count", "--n", "6", "--pairings")
    assert out.strip() == "5"


def test_law_moments_csv(capsys):
    code, out, _ = call(capsys, "law", "moments", "--law", "free-poisson:1", "--k", "5")
    rows = [l.split(",") for l in out.strip().splitlines()]
    assert code == 0 and rows[0][0] == "k"
    assert rows[0] == ["k", "cumulant", "moment"]
    assert [r[2] for r in rows[1:]] == ["0", "1", "1", "3", "6"]


def test_influence(capsys):
    code, out, _ = call(capsys, "kernel", "influence", "--family", "example1", "--N", "6")
    lines = out.strip().splitlines()
    assert lines[0] == "i,influence"
    assert lines[1] == "1,1" and lines[2] == "2,0.2"


def test_moment_sum_json(capsys):
    code, out, _ = call(capsys, "moment", "sum", "--family", "star-counterexample", "--N", "6",
                        "--m", "4", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == 1
    assert doc["rows"][0]["value"] == pytest.approx(2.5)


def test_repeat_runs_are_byte_identical(capsys):
    argv = ("diag", "semicircle", "--family", "ring", "--N", "10,20", "--format", "json")
    assert call(capsys, *argv)[1] == call(capsys, *argv)[1]
    argv = ("diag", "cs", "--n", "4", "--trials", "20", "--seed", "3")
    assert call(capsys, *argv)[1] == call(capsys, *argv)[1]


def test_threads_do_not_change_output(capsys):
    base = ("moment", "sum", "--family", "example2", "--N", "6", "--m", "6")
    assert call(capsys, *base, "--threads", "1")[1] == call(capsys, *base, "--threads", "4")[1]


def test_out_file(capsys, tmp_path):
    path = tmp_path / "x.csv"
    code, out, _ = call(capsys, "cheb", "coeffs", "--h", "3", "--out", str(path))
    assert code == 0 and out == ""
    assert "-2" in path.read_text()


def test_kernel_file_round_trip(capsys, tmp_path):
    code, out, _ = call(capsys, "kernel", "export", "--family", "example3", "--N", "5")
    path = tmp_path / "k.json"
    path.write_text(out)
    code, out, _ = call(capsys, "kernel", "validate", "--kernel", str(path))
    assert code == 0 and "true" in out.lower()


def test_exit_codes(capsys, tmp_path):
    assert call(capsys, "nc", "count")[0] == 2
    assert call(capsys, "kernel", "validate", "--kernel", str(tmp_path / "none.json"))[0] == 2
    assert call(capsys, "nc", "count", "--n", "30")[0] == 3
    assert call(capsys, "moment", "sum", "--family", "example2", "--N", "8", "--m", "4",
                "--method", "tuples", "--tuple-budget", "10")[0] == 3
    v = np.zeros((4, 4, 4))
    for i in range(4):
        a, b, c = i, (i + 1) % 4, (i + 2) % 4
        v[a, b, c] = v[c, b, a] = 1
    path = tmp_path / "odd.json"
    Kernel(v / np.linalg.norm(v)).save(path)
    code, _, err = call(capsys, "diag", "poisson", "--kernel", str(path), "--orders", "1,2,1")
    assert code == 4 and "even" in err


def test_diag_plan(capsys):
    code, out, _ = call(capsys, "diag", "plan", "--n", "5")
    assert code == 0 and "1" in out


def test_lindeberg(capsys):
    code, out, _ = call(capsys, "diag", "lindeberg", "--family", "example2", "--N", "4..6", "--m", "2")
    assert code == 0
    assert len(out.strip().splitlines()) == 4


def test_simulate_small(capsys):
    code, out, _ = call(capsys, "simulate", "--family", "example2", "--N", "4", "--dim", "40",
                        "--trials", "3", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["rows"]


def test_suite_command_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ncchaos", "paper-suite"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "FAIL" not in proc.stdout


def test_limit_flags_do_not_leak(capsys):
    from ncchaos.errors import get_limits

    before = get_limits()
    call(capsys, "nc", "count", "--n", "4", "--nc-cap", "3", "--tuple-budget", "5")
    assert get_limits() == before
