import csv
import io
import json

import pytest

from taulab import cli
from taulab.suites import SUITES, ConfigError, RunConfig


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- parsing helpers ---------------------------------------------------------------------

@pytest.mark.parametrize("text,value", [("0.5i", 0.5j), ("-0.5+1i", -0.5 + 1j), ("2", 2), ("i", 1j), ("-i", -1j), (" 1 + 2i ", 1 + 2j)])
def test_parse_complex(text, value):
    assert cli.parse_complex(text) == value


@pytest.mark.parametrize("text", ["", "abc", "1+"])
def test_parse_complex_rejects(text):
    with pytest.raises(ConfigError):
        cli.parse_complex(text)


def test_parse_range_and_grid():
    assert cli.parse_range("1:3") == [1, 2, 3]
    assert cli.parse_range("2") == [2]
    assert len(cli.parse_grid("-2:4:0.1")) == 61
    for bad in ("3:1", "-1:2", "x"):
        with pytest.raises(ConfigError):
            cli.parse_range(bad)
    for bad in ("0:1:0", "1:0:0.1", "0:1"):
        with pytest.raises(ConfigError):
            cli.parse_grid(bad)


def test_glue_values():
    assert cli._glue_values(["scatter", "wf", "--grid", "-2:4:0.1"]) == ["scatter", "wf", "--grid=-2:4:0.1"]
    assert cli._glue_values(["--seed", "3"]) == ["--seed", "3"]


@pytest.mark.parametrize("kwargs", [dict(cutoff_K=0), dict(degree_D=0), dict(fock_M=7), dict(fock_M=1), dict(tol=0.0), dict(seed=-1)])
def test_run_config_validation(kwargs):
    with pytest.raises(ConfigError):
        RunConfig(**kwargs).validate()


# -- verify ------------------------------------------------------------------------------------

@pytest.mark.parametrize("suite", [s for s in SUITES if s not in ("limit",)])
def test_verify_suites_pass(capsys, suite):
    code, out, _ = run(capsys, "verify", suite, "--no-timing")
    assert code == 0
    assert out.strip().splitlines()[-1].endswith("passed")


def test_verify_json_schema_and_determinism(capsys):
    args = ("verify", "fock", "--seed", "42", "--no-timing", "--format", "json")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
    report = json.loads(first)
    assert report["schema"] == 1 and report["seed"] == 42
    ids = [c["id"] for c in report["cases"]]
    assert ids == sorted(ids)
    assert set(report["cases"][0]) == {"id", "eq_tag", "status", "residual", "ms"}
    assert all(c["ms"] == 0 for c in report["cases"])


def test_verify_csv(capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, _, _ = run(capsys, "verify", "sl2", "--format", "csv", "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert rows and all(r["status"] == "pass" for r in rows)


def test_verify_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "whittaker", "--tol", "1e-300", "--no-timing")
    assert code == 2
    assert "FAIL" in out


@pytest.mark.parametrize("argv", [
    ("verify", "nosuch"),
    ("verify", "toda", "--cutoff-K", "0"),
    ("verify", "fock", "--fock-M", "9"),
    ("verify",),
])
def test_config_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert "configuration error" in err


# -- tau -----------------------------------------------------------------------------------------

def _kernel_file(tmp_path, R):
    path = tmp_path / "k.json"
    entries = [[k, m, str(x)] for k, row in enumerate(R) for m, x in enumerate(row) if x]
    path.write_text(json.dumps({"size": len(R), "entries": entries}))
    return path


def test_tau_identity_kernel(capsys, tmp_path):
    path = _kernel_file(tmp_path, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    code, out, _ = run(capsys, "tau", "classical", "--kernel", str(path), "--n", "0:1", "--format", "json")
    assert code == 0
    taus = json.loads(out)["taus"]
    assert taus[0] == {"n": 0, "tau": "1"}


def test_tau_rank_two_kernel_vanishes(capsys, tmp_path):
    path = _kernel_file(tmp_path, [[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    code, out, _ = run(capsys, "tau", "classical", "--kernel", str(path), "--n", "3")
    assert code == 0
    assert out.strip() == "tau_3 = 0"


@pytest.mark.parametrize("kind", ["classical", "kos", "parA", "fund"])
def test_tau_kinds(capsys, tmp_path, kind):
    path = _kernel_file(tmp_path, [[1, 2], [0, 1]])
    code, out, _ = run(capsys, "tau", kind, "--kernel", str(path), "--n", "0:2", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "n,tau"
    assert len(out.splitlines()) == 4


def test_tau_classical_matches_fund(capsys, tmp_path):
    path = _kernel_file(tmp_path, [[1, 2, 0], [3, 1, 1], [0, 2, 5]])
    _, a, _ = run(capsys, "tau", "classical", "--kernel", str(path), "--n", "0:3")
    _, b, _ = run(capsys, "tau", "fund", "--kernel", str(path), "--n", "0:3", "--cutoff-K", "2")
    _, c, _ = run(capsys, "tau", "classical", "--kernel", str(path), "--n", "0:3", "--cutoff-K", "2")
    assert b == c
    assert a.splitlines()[0] == b.splitlines()[0]


@pytest.mark.parametrize("content", ["{", json.dumps({"size": 2, "entries": [[0, 5, "1"]]}), json.dumps({"Q": 1})])
def test_tau_bad_kernel(capsys, tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    code, _, _ = run(capsys, "tau", "classical", "--kernel", str(path))
    assert code == 1


def test_tau_missing_kernel(capsys, tmp_path):
    assert run(capsys, "tau", "classical")[0] == 1
    assert run(capsys, "tau", "classical", "--kernel", str(tmp_path / "none.json"))[0] == 1


# -- scatter -----------------------------------------------------------------------------------------

def test_scatter_smatrix(capsys):
    assert run(capsys, "scatter", "smatrix", "--p", "0")[1].strip() == "1+0i"
    assert run(capsys, "scatter", "smatrix", "--p", "0.5")[1].strip() == "0.25+0i"
    code, _, err = run(capsys, "scatter", "smatrix", "--p", "1")
    assert code == 1 and "PoleError" in err


def test_scatter_wf_negative_grid(capsys, tmp_path):
    fit = tmp_path / "fit.json"
    code, out, _ = run(capsys, "scatter", "wf", "--j", "0.5i", "--grid", "-2:0:0.5", "--fit", str(fit))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["phi"]) for r in rows] == [-2, -1.5, -1, -0.5, 0]
    assert max(float(r["residual"]) for r in rows) < 1e-6
    data = json.loads(fit.read_text())
    assert set(data) >= {"ratio", "fit_residual", "c_plus", "c_minus"}


def test_scatter_cfun(capsys):
    code, out, _ = run(capsys, "scatter", "cfun", "--rank", "3", "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 6
    code, out, _ = run(capsys, "scatter", "cfun", "--rank", "3", "--weyl", "132")
    assert code == 0 and out.strip().endswith("i")


@pytest.mark.parametrize("argv", [
    ("scatter", "cfun", "--rank", "1"),
    ("scatter", "cfun", "--rank", "3", "--weyl", "12"),
    ("scatter", "wf", "--grid", "1:0:0.1"),
    ("scatter", "wf", "--mu-L", "-1"),
])
def test_scatter_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "taulab", "scatter", "smatrix", "--p", "0"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "1+0i"
