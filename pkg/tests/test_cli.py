import json

import numpy as np
import pytest

from src.cli import run

PHI_F3 = 15.4 / 6.7


def run_cli(capsys, *argv):
    status = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return status, out, err


def test_validate_text(capsys, example_path):
    status, out, _ = run_cli(capsys, "validate", example_path)
    assert status == 0
    assert "D1 = 4, D2 = 4" in out
    assert out.startswith("pismg ")


def test_validate_json_without_banner(capsys, example_path):
    status, out, _ = run_cli(capsys, "validate", example_path, "--format", "json")
    assert status == 0
    report = json.loads(out)
    assert report["s1"] == [1, 2]
    assert report["s2"] == [3, 4]


def test_enumerate_tables(capsys, example_path):
    status, out, _ = run_cli(capsys, "enumerate", example_path, "--tables", "--no-banner")
    assert status == 0
    assert out.startswith("game: example_s5")
    assert "f3: 1:a2, 2:a1" in out
    assert "g4: 3:b2, 4:b2" in out


def test_solve_text_reports_value(capsys, example_path):
    status, out, _ = run_cli(capsys, "solve", example_path)
    assert status == 0
    assert "2.9" in out
    assert "2.29851" in out
    assert "differs from reference 0.9" in out


def test_solve_json_schema(capsys, example_path):
    status, out, _ = run_cli(capsys, "solve", example_path, "--format", "json", "--emit-matrices")
    assert status == 0
    report = json.loads(out)
    assert report["value"][:3] == pytest.approx([PHI_F3, PHI_F3, 2.9], abs=1e-12)
    assert report["value"][3] == pytest.approx(364 / 137, abs=1e-6)
    assert report["maximiser"] == {"1": 2, "2": 2, "3": 0, "4": 2}
    assert report["minimiser"] == {"1": 0, "2": 0, "3": 2, "4": 0}
    assert [s["count"] for s in report["saddles"]] == [4, 4, 8, 2]
    assert np.array(report["matrices"]["3"]).shape == (4, 4)
    assert report["diagnostics"]["reference_deltas"][3]["flagged"] is True


def test_solve_json_is_byte_identical(capsys, example_path):
    _, first, _ = run_cli(capsys, "solve", example_path, "--format", "json")
    _, second, _ = run_cli(capsys, "solve", example_path, "--format", "json")
    assert first == second


def test_solve_with_lazari(capsys, example_path):
    status, out, _ = run_cli(capsys, "solve", example_path, "--format", "json", "--method", "lazari")
    assert status == 0
    assert json.loads(out)["method"] == "lazari"


def test_cesaro_identity(capsys, tmp_path):
    path = tmp_path / "id2.json"
    path.write_text("[[1, 0], [0, 1]]", encoding="utf-8")
    status, out, err = run_cli(capsys, "cesaro", "--matrix", path)
    assert status == 0
    assert json.loads(out) == [[1.0, 0.0], [0.0, 1.0]]
    assert json.loads(err)["method"] == "structural"


def test_cesaro_csv(capsys, tmp_path):
    path = tmp_path / "swap.csv"
    path.write_text("0,1\n1,0\n", encoding="utf-8")
    status, out, _ = run_cli(capsys, "cesaro", "--matrix", path, "--method", "averaging")
    assert status == 0
    assert out == "0.5,0.5\n0.5,0.5\n"


def test_cesaro_rejects_non_stochastic(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("[[0.5, 0.4], [0, 1]]", encoding="utf-8")
    status, _, err = run_cli(capsys, "cesaro", "--matrix", path)
    assert status == 1
    assert err.startswith("[ERROR]")


def test_simulate_json_is_deterministic(capsys, example_path):
    argv = ["simulate", example_path, "--max", "f3", "--min", "0", "--start", 1]
    argv += ["--horizon", 2000, "--reps", 20, "--seed", 4, "--format", "json"]
    status, first, _ = run_cli(capsys, *argv)
    _, second, _ = run_cli(capsys, *argv)
    assert status == 0
    assert first == second
    report = json.loads(first)
    assert report["maximiser"] == 2
    assert report["analytic"] == pytest.approx(PHI_F3)


def test_simulate_with_labels(capsys, example_path):
    status, out, _ = run_cli(
        capsys,
        "simulate", example_path,
        "--max-labels", "1=a1,2=a1",
        "--min-labels", "3=b1,4=b1",
        "--start", 3, "--horizon", 50, "--reps", 2, "--no-banner",
    )
    assert status == 0
    assert "estimate: 3 +- 0" in out


def test_save_report(capsys, tmp_path, example_path):
    target = tmp_path / "out" / "report.json"
    status, out, _ = run_cli(capsys, "solve", example_path, "--format", "json", "--output", target)
    assert status == 0
    assert target.read_text(encoding="utf-8") == out


def test_missing_file_exits_1(capsys, tmp_path):
    status, _, err = run_cli(capsys, "solve", tmp_path / "absent.json")
    assert status == 1
    assert "[ERROR]" in err


def test_usage_errors_exit_2(capsys, example_path):
    assert run_cli(capsys, "solve", example_path, "--bogus")[0] == 2
    assert run_cli(capsys, "frobnicate")[0] == 2
    assert run_cli(capsys)[0] == 2


@pytest.mark.parametrize("start", [0, 5])
def test_simulate_sample_path_rejects_bad_start(capsys, example_path, start):
    status, out, err = run_cli(
        capsys,
        "simulate", example_path, "--max", "f1", "--min", "g1",
        "--start", start, "--horizon", 100, "--mode", "sample-path", "--format", "json",
    )
    assert status == 1
    assert out == ""
    assert err.startswith("[ERROR]")
    assert f"start state {start}" in err


@pytest.mark.parametrize("flag", ["--horizon", "--reps"])
def test_simulate_explicit_zero_is_not_replaced_by_default(capsys, example_path, flag):
    argv = ["simulate", example_path, "--max", "f1", "--min", "g1", "--start", 3]
    argv += ["--horizon", 10, "--reps", 2, flag, 0]
    status, out, err = run_cli(capsys, *argv)
    assert status == 1
    assert out == ""
    assert "[ERROR]" in err


def test_solve_explicit_zero_cap_and_workers(capsys, example_path):
    status, _, err = run_cli(capsys, "solve", example_path, "--cap", 0)
    assert status == 1
    assert "above the cap of 0" in err
    status, _, err = run_cli(capsys, "solve", example_path, "--max-workers", 0)
    assert status == 1
    assert "max-workers" in err
    status, _, err = run_cli(capsys, "enumerate", example_path, "--cap", 0)
    assert status == 1
    assert "above the cap of 0" in err
