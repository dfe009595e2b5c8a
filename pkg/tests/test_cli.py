import csv
import json
import random

import pytest

from pvi_rh_lab.backlund import random_exact_state
from pvi_rh_lab.cli import main
from pvi_rh_lab.reports import SCHEMA


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


def test_theta_example(capsys):
    code, doc = run(capsys, "theta", "--kappa", "1/2,0,0,0,0")
    assert code == 0
    assert doc["schema"] == SCHEMA
    theta = [complex(*z) for z in doc["result"]["theta"]]
    assert max(abs(a - b) for a, b in zip(theta, (0, 0, 0, -4))) < 1e-12


@pytest.mark.parametrize("argv", [
    ["theta", "--kappa", "1/2,0.5,0,0,0"],
    ["theta", "--bogus"],
    ["verify", "main", "--tol", "1"],
    ["verify", "main", "--tol", "1e-20"],
    [],
])
def test_usage_errors_exit_one(capsys, argv):
    assert main(argv) == 1


def test_verify_main_passes(capsys):
    code, doc = run(capsys, "verify", "main", "--gens", "0", "--n", "10", "--tol", "1e-9")
    assert code == 0 and doc["passed"] is True


def test_reproducible_output_is_identical(capsys):
    argv = ["rh", "compute", "--seed", "3", "--reproducible"]
    main(argv)
    a = capsys.readouterr().out
    main(argv)
    b = capsys.readouterr().out
    assert a == b and json.loads(a)["wall_time_s"] is None


def test_out_and_csv(tmp_path, capsys):
    out, table = tmp_path / "r.json", tmp_path / "traj.csv"
    code = main(["flow", "run", "--seed", "4", "--length", "0.5",
                 "--out", str(out), "--csv", str(table)])
    assert code == 0 and capsys.readouterr().out == ""
    assert json.loads(out.read_text())["command"] == "flow run"
    rows = list(csv.reader(table.open()))
    assert len(rows) > 2


def test_failed_verification_exits_two(capsys):
    code, doc = run(capsys, "verify", "coalesce", "--n", "1", "--min-pass", "1", "--seed", "0")
    assert code == 2 and doc["passed"] is False


def test_state_file(tmp_path, capsys):
    s = random_exact_state(random.Random(5))
    path = tmp_path / "s.json"
    path.write_text(json.dumps(s.to_json()))
    code, doc = run(capsys, "backlund", "apply", "--state", str(path), "--word", "0,1")
    assert code == 0
    code, _ = run(capsys, "ham", "eval", "--state", str(tmp_path / "missing.json"))
    assert code == 1
