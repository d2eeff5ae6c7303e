import json
import subprocess
import sys

import pytest

from predsched import adversaries, cli


def write(path, lines):
    path.write_text("".join(f"{a} {b}\n" for a, b in lines))
    return str(path)


def run(argv, capsys):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def example_files(tmp_path):
    A = [(0, 2), (3, 5), (6, 8)]
    B = [(1, 4), (4, 7)]
    return {
        "input": write(tmp_path / "input.txt", A + B),
        "prediction": write(tmp_path / "prediction.txt", A[2:] + B),
        "empty": write(tmp_path / "empty.txt", []),
    }


def test_solve(example_files, capsys):
    code, out, _ = run(["solve", "--input", example_files["input"]], capsys)
    assert code == 0
    assert out == "profit 3\n0 2\n3 5\n6 8\n"


def test_solve_jsonl(example_files, capsys):
    code, out, _ = run(["solve", "--input", example_files["input"], "--format", "jsonl"], capsys)
    assert json.loads(out) == {"profit": 3, "chosen": [[0, 2], [3, 5], [6, 8]]}


def test_error(example_files, capsys):
    code, out, _ = run(["error", "--input", example_files["input"],
                        "--prediction", example_files["prediction"]], capsys)
    assert code == 0
    assert out == "3 0 2 2 3 2 3\n"


def test_error_undefined_gamma(example_files, capsys):
    code, out, _ = run(["error", "--input", example_files["empty"],
                        "--prediction", example_files["input"]], capsys)
    assert out.split()[-2:] == ["-", "-"]


def test_simulate_trustgreedy(tmp_path, capsys):
    seq = write(tmp_path / "seq.txt", [(0, 1), (0, 2), (1, 3), (1, 4), (3, 5), (6, 8)])
    pred = write(tmp_path / "pred.txt", [(0, 2), (1, 3), (1, 4), (3, 5), (5, 7), (6, 8)])
    code, out, _ = run(["simulate", "--algo", "trustgreedy", "--input", seq, "--prediction", pred], capsys)
    assert code == 0
    assert out == "profit 2\ndecisions ARRRAR\n"


def test_simulate_crs(tmp_path, capsys):
    seq = write(tmp_path / "seq.txt", [(2, 6), (3, 5)])
    code, out, _ = run(["simulate", "--algo", "crs", "--input", seq, "--level", "1", "--m", "7"], capsys)
    assert out == "profit 1\ndecisions AR\n"
    code, out, _ = run(["simulate", "--algo", "crs", "--input", seq, "--m", "7"], capsys)
    assert out.splitlines()[0] == "expected_profit 1/3"


def test_simulate_robusttrust(example_files, capsys):
    code, out, _ = run(["simulate", "--algo", "robusttrust", "--input", example_files["input"],
                        "--prediction", example_files["input"], "--alpha", "1"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "expected_profit 3"


def test_simulate_missing_prediction_notes(example_files, capsys):
    code, out, err = run(["simulate", "--algo", "trust", "--input", example_files["input"]], capsys)
    assert code == 0 and "empty prediction" in err
    assert out.startswith("profit 0")


def test_duel_thm5(capsys):
    code, out, _ = run(["duel", "--construction", "thm5", "--algo", "trust", "--params", "epsilon=1/4,ell=2"], capsys)
    assert code == 0
    records = [json.loads(line) for line in out.splitlines()]
    summary = records[-1]
    assert summary["type"] == "summary"
    assert (summary["algorithm_profit"], summary["opt_profit"], summary["eta"]) == (2, 6, 2)
    assert summary["gamma"] == "1/3"
    assert summary["bound_satisfied"] is True
    assert all(r["type"] == "request" for r in records[:-1])


@pytest.mark.parametrize("argv", [
    ["--construction", "thm2", "--algo", "greedy", "--params", "ell=2,p=3"],
    ["--construction", "thm4", "--algo", "reject", "--params", "epsilon=1/3,ell=4"],
    ["--construction", "prop6", "--algo", "trustgreedy", "--params", "p=2,m=8"],
    ["--construction", "thm4", "--algo", "crs", "--params", "epsilon=1/2,ell=1", "--seed", "3"],
])
def test_duel_constructions(argv, capsys):
    code, out, _ = run(["duel", *argv], capsys)
    assert code == 0
    assert json.loads(out.splitlines()[-1])["type"] == "summary"


def test_duel_bound_violation_exit(monkeypatch, capsys):
    real = adversaries.duel_theorem4

    def broken(alg, eps, ell):
        t = real(alg, eps, ell)
        t.bound_satisfied = False
        return t

    monkeypatch.setattr(adversaries, "duel_theorem4", broken)
    code, _, _ = run(["duel", "--construction", "thm4", "--algo", "greedy", "--params", "epsilon=1/2,ell=1"], capsys)
    assert code == 3


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["solve"],
    ["simulate", "--algo", "oracle", "--input", "x"],
    ["duel", "--construction", "thm5", "--algo", "greedy", "--params", "epsilon=1/2,ell=1"],
    ["duel", "--construction", "thm4", "--algo", "greedy", "--params", "ell=1"],
    ["duel", "--construction", "thm4", "--algo", "greedy", "--params", "epsilon=x,ell=1"],
    ["solve", "--input", "x", "--seed", "-1"],
])
def test_usage_errors(argv, capsys):
    code, _, _ = run(argv, capsys)
    assert code == 1


def test_data_errors(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1\n")
    assert run(["solve", "--input", str(bad)], capsys)[0] == 2
    assert run(["solve", "--input", str(tmp_path / "missing.txt")], capsys)[0] == 2
    swf = tmp_path / "bad.swf"
    swf.write_text("1 2 3\n")
    assert run(["ingest", "--swf", str(swf), "--out", str(tmp_path / "o.txt")], capsys)[0] == 2
    code, _, err = run(["duel", "--construction", "thm4", "--algo", "greedy",
                        "--params", "epsilon=2,ell=0"], capsys)
    assert code == 2 and "epsilon" in err


def test_ingest(small_trace, tmp_path, capsys):
    out = tmp_path / "jobs.txt"
    code, _, _ = run(["ingest", "--swf", small_trace, "--out", str(out)], capsys)
    assert code == 0
    sidecar = json.loads((tmp_path / "jobs.txt.json").read_text())
    lines = out.read_text().splitlines()
    assert sidecar["N"] == sidecar["jobs"] == len(lines)
    assert sidecar["data_lines"] == sidecar["jobs"] + sidecar["skipped"] == 300
    assert {"max_length", "avg_length", "distinct_intervals"} <= set(sidecar)


def test_sweep(small_trace, tmp_path, capsys):
    args = ["sweep", "--swf", small_trace, "--steps", "5", "--seed", "9"]
    code, out, _ = run(args, capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "d,eta,gamma_num,gamma_den,gamma_float,opt,greedy,trust,trustgreedy"
    assert len(lines) == 6
    target = tmp_path / "s.csv"
    run(args + ["--workers", "2", "--out", str(target)], capsys)
    assert target.read_text() == out
    code, out, _ = run(args + ["--format", "jsonl", "--alpha", "1/2",
                               "--algorithms", "opt,crs_expected"], capsys)
    record = json.loads(out.splitlines()[0])
    assert set(record) >= {"d", "opt", "crs_expected", "robusttrust", "gamma_undefined"}


def test_module_entry_point(example_files):
    proc = subprocess.run([sys.executable, "-m", "predsched", "solve", "--input", example_files["input"]],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("profit 3")
