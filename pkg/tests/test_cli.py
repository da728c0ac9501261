import csv
import io
import json

import pytest
from click.testing import CliRunner

from cvmetro import __version__
from cvmetro.cli import main


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, list(args), catch_exceptions=False)
    return invoke


def _csv_rows(text):
    return list(csv.DictReader(line for line in io.StringIO(text) if not line.startswith("#")))


def _header(text):
    return dict(line[2:].split(": ", 1) for line in text.splitlines() if line.startswith("# "))


def test_version(run):
    res = run("--version")
    assert res.exit_code == 0 and __version__ in res.output


def test_table_csv(run):
    res = run("table", "3")
    assert res.exit_code == 0
    head = _header(res.output)
    assert head["status"] == "PASS" and head["cutoff"] == "80" and head["tolerance"] == "9.9999999999999995e-07"
    rows = _csv_rows(res.output)
    assert rows and all(r["passed"] == "true" for r in rows)


def test_table_json(run, tmp_path):
    out = tmp_path / "t1.json"
    res = run("table", "1", "--format", "json", "--out", str(out))
    assert res.exit_code == 0
    doc = json.loads(out.read_text())
    assert doc["status"] == "PASS" and doc["kind"] == "table"


def test_table_failure_exits_one(run):
    res = run("table", "1", "--large-alpha-tol", "1e-9")
    assert res.exit_code == 1
    assert _header(res.output)["status"] == "FAIL"


@pytest.mark.parametrize("args", [("table", "42"), ("table", "1", "--cutoff", "1"),
                                  ("map", "--state", "unicorn", "--task", "disp"),
                                  ("map", "--state", "fock:n=1", "--task", "disp", "--grid", "0:1:3"),
                                  ("map", "--state", "fock:n=1", "--task", "spin"),
                                  ("sweep", "--task", "disp", "--nbar", "0:1", "--nb", "0", "--kt", "0:1:3"),
                                  ("sweep", "--task", "rot", "--nbar", "0:1:3", "--nb", "-1", "--kt", "0:1:3"),
                                  ("validate", "--suite", "everything")])
def test_input_errors_exit_two(run, args):
    res = run(*args)
    assert res.exit_code == 2


def test_unconverged_state_reports_cleanly(run):
    res = run("map", "--state", "compass:a=6", "--task", "disp", "--cutoff", "20", "--grid", "-1:1:2,-1:1:2")
    assert res.exit_code == 2
    assert "NonConverged" in res.output


def test_map_small_grid(run):
    res = run("map", "--state", "fock:n=1", "--task", "disp", "--grid", "-1:1:2,-1:1:2")
    assert res.exit_code == 0
    rows = _csv_rows(res.output)
    assert len(rows) == 4
    assert [(float(r["x"]), float(r["p"])) for r in rows] == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    head = _header(res.output)
    assert head["qfi_bound"].startswith("6")


def test_map_argmax_within_bound(run):
    res = run("map", "--state", "fock:n=1", "--task", "disp", "--grid", "-2:2:101,-2:2:101", "--format", "json")
    doc = json.loads(res.output)
    assert doc["meta"]["argmax_value"] <= doc["meta"]["qfi_bound"] * (1 + 1e-8)
    assert doc["meta"]["argmax_value"] >= 0.98 * 6
    assert doc["summary"]["argmax_within_bound"] is True


def test_map_rotation_has_no_direction(run):
    res = run("map", "--state", "cat:a=1.5,gamma=0", "--task", "rot", "--grid", "-2:2:5,-2:2:5",
              "--format", "json")
    doc = json.loads(res.output)
    assert doc["meta"]["phi"] is None
    assert all(r["phi_opt"] is None for r in doc["rows"])


def test_map_noisy_shortcut(run):
    res = run("map", "--state", "fock:n=2", "--task", "disp", "--phi", "0.3", "--noisy",
              "--grid", "-1:1:3,-1:1:3", "--format", "json")
    doc = json.loads(res.output)
    assert doc["meta"]["eps"] == 0.01
    assert not any(r["indeterminate"] for r in doc["rows"])


def test_map_backends_agree(run):
    base = ("map", "--state", "compass:a=1.2", "--task", "disp", "--phi", "0.5", "--grid", "-2:2:9,-2:2:9",
            "--format", "json")
    a = json.loads(run(*base, "--backend", "python").output)
    b = json.loads(run(*base, "--backend", "cython").output) if _has_cython() else a
    for ra, rb in zip(a["rows"], b["rows"]):
        assert ra["value"] == pytest.approx(rb["value"], rel=1e-8, abs=1e-10)


def _has_cython():
    from cvmetro import _kernel
    return _kernel.BACKEND == "cython"


def test_map_writes_gnuplot_stub(run, tmp_path):
    out = tmp_path / "m.csv"
    res = run("map", "--state", "fock:n=1", "--task", "disp", "--grid", "-1:1:3,-1:1:3", "--out", str(out))
    assert res.exit_code == 0
    stub = (tmp_path / "m.gp").read_text()
    assert "splot" in stub and "m.csv" in stub


def test_output_is_deterministic(run):
    args = ("map", "--state", "compass:a=1.2", "--task", "disp", "--grid", "-2:2:11,-2:2:11")
    assert run(*args).output == run(*args).output


def test_sweep(run):
    res = run("sweep", "--task", "disp", "--nbar", "0:3:4", "--nb", "0,1", "--kt", "0:1:3")
    assert res.exit_code == 0
    head = _header(res.output)
    assert head["status"] == "PASS" and head["monotone_in_kt"] == "true" and head["kt0_equals_noiseless"] == "true"
    rows = _csv_rows(res.output)
    grid = [r for r in rows if r["series"] == "grid"]
    assert len(grid) == 4 * 2 * 3


@pytest.mark.parametrize("suite", ["noise", "mai", "gaussian-optimum", "qfi-oracle"])
def test_validate_fast_suites(run, suite):
    res = run("validate", "--suite", suite, "--format", "json")
    assert res.exit_code == 0
    assert json.loads(res.output)["status"] == "PASS"
