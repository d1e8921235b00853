import csv
import io
import json
import subprocess
import sys

import pytest

from dcpbench.cli import OUTPUT_DIR_ENV, main, render


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_render_six_significant_digits():
    text = render([dict(a=1 / 3, b=7, c="x", d=None)], "json")
    rec = json.loads(text)["records"][0]
    assert rec == dict(a=0.333333, b=7, c="x", d=None)
    rows = list(csv.DictReader(io.StringIO(render([dict(a=123456789.0)], "csv"))))
    assert float(rows[0]["a"]) == 1.23457e8


def test_csv_round_trip(capsys):
    code, out = run(["simulate", "qss-solve", "--n", "8", "--trials", "3"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["seed"] for r in rows] == ["0", "1", "2", "summary"]
    assert all(r["success"] == "True" for r in rows[:3])
    again = render([{k: v for k, v in r.items()} for r in rows], "csv")
    assert again.replace(",\n", "\n").splitlines()[1:] == out.replace(",\n", "\n").splitlines()[1:]


def test_json_round_trip(capsys):
    code, out = run(["simulate", "ettinger-hoyer", "--n", "8", "--trials", "2", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert json.loads(render(doc["records"], "json")) == doc


@pytest.mark.parametrize("algo", ["ettinger-hoyer", "regev-lsb", "qss-solve", "kuperberg1", "sieve"])
def test_simulate_algorithms(algo, capsys):
    code, out = run(["simulate", algo, "--n", "10", "--trials", "2", "--seed", "3"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert rows[-1]["status"] == "2/2"


def test_simulate_interpolate(capsys):
    code, out = run(["simulate", "interpolate", "--n", "10", "--t", "4", "--trials", "2"], capsys)
    assert code == 0 and "2/2" in out


def test_jobs_preserve_seed_order(capsys):
    args = ["simulate", "qss-solve", "--n", "10", "--trials", "4", "--seed", "11"]
    _, serial = run(args, capsys)
    _, parallel = run(args + ["--jobs", "2"], capsys)
    assert serial == parallel


def test_config_errors(capsys):
    assert main(["simulate", "sieve"]) == 2
    assert main(["simulate", "interpolate", "--n", "10"]) == 2
    assert main(["verify", "EZ", "--n", "10"]) == 2
    assert main(["estimate", "tree", "--m", "10"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "grover"])
    assert exc.value.code == 2


def test_budget_exit_code(capsys):
    # m=1 at n=10 needs about 2^11 attempts; a forced budget of one attempt per run cannot succeed
    from dcpbench import cli
    from dcpbench.dcp_solvers import BudgetExhausted

    def boom(*a, **k):
        raise BudgetExhausted("forced")
    orig = cli.qss_dcp_solve
    cli.qss_dcp_solve = boom
    try:
        code, out = run(["simulate", "qss-solve", "--n", "10", "--trials", "2"], capsys)
    finally:
        cli.qss_dcp_solve = orig
    assert code == 3 and out.count("budget") == 2


@pytest.mark.parametrize("lemma,extra", [("EZ", ["--n", "10", "--m", "9", "--trials", "300"]),
                                         ("Gbound", ["--n", "10", "--m", "9", "--trials", "30"]),
                                         ("success-prob", ["--n", "8", "--m", "7", "--trials", "5"]),
                                         ("sum-lemma", ["--n", "100", "--alpha", "2"]),
                                         ("pf-exact", ["--m", "8"])])
def test_verify_commands(lemma, extra, capsys):
    code, out = run(["verify", lemma] + extra, capsys)
    assert code == 0, out
    assert list(csv.DictReader(io.StringIO(out)))[0]["passed"] == "True"


def test_verify_failure_exit_code(capsys, monkeypatch):
    from dcpbench import cli
    monkeypatch.setattr(cli.cm, "sum_lemma_check", lambda a, n: (2.0, 1.0))
    code, _ = run(["verify", "sum-lemma", "--n", "4", "--alpha", "1"], capsys)
    assert code == 1


def test_estimate_table2_rounded(capsys):
    code, out = run(["estimate", "table2", "--rounded"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 10
    first = rows[1]
    assert (first["algorithm"], first["queries"], first["classical_time"]) == ("alg4_qracm", "11", "73")


def test_estimate_interpolation_and_sieve(capsys):
    code, out = run(["estimate", "interpolation", "--n", "64"], capsys)
    assert code == 0 and len(out.strip().splitlines()) == 64
    code, out = run(["estimate", "sieve", "--n", "4608", "--format", "json"], capsys)
    recs = json.loads(out)["records"]
    assert recs[1]["queries"] == pytest.approx(99.59, abs=0.01)


def test_estimate_tree_json(capsys):
    code, out = run(["estimate", "tree", "--m", "64", "--shape", "no_qracm", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["m"] == 64 and "steps" in doc and len(doc["nodes"]) > 5


def test_output_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    assert main(["estimate", "row", "--algorithm", "regev", "--n", "256", "--output", "row.csv"]) == 0
    assert (tmp_path / "row.csv").read_text().startswith("algorithm,n,queries")


def test_console_script_determinism():
    cmd = [sys.executable, "-m", "dcpbench.cli", "simulate", "sieve", "--n", "12", "--trials", "3", "--seed", "5"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
