import csv
import io
import json
import os
import subprocess
import sys
from fractions import Fraction

import pytest

from ergolab import oracles
from ergolab.cli import main
from ergolab.report import COLUMNS, Report, write_atomic


def _rows(text):
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def _run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_phi_table_plan(tmp_path, capsys):
    (tmp_path / "odo.sys").write_text("kind=odometer base=2\n")
    plan = {"system": "odo.sys", "format": "csv", "tasks": [{"task": "phi-table", "set": 'cyl("00")', "m": "0..4"}]}
    (tmp_path / "plan.json").write_text(json.dumps(plan))
    code, out, _ = _run(["run", str(tmp_path / "plan.json")], capsys)
    assert code == 0
    got = [(r["param"], r["lower"]) for r in _rows(out)]
    # each rate counts the indices reached by 0, 1, ..., m on Z/4
    want = [(str(m), str(oracles.perm_rates([1, 2, 3, 0], [Fraction(1, 4)] * 4, [0], m)[m])) for m in range(5)]
    assert got == want == [("0", "1/4"), ("1", "1/2"), ("2", "3/4"), ("3", "1"), ("4", "1")]


def test_provenance_header(capsys):
    code, out, _ = _run(["phi", "--system-text", "kind=odometer base=3", "--set", 'cyl("1")', "--seed", "7"], capsys)
    assert code == 0
    head = [line for line in out.splitlines() if line.startswith("#")]
    assert "# seed: 7" in head and "# m_max: 4096" in head and "# exponent_budget: 64" in head
    assert any(line.startswith("# tool: ergolab") for line in head)
    assert out.splitlines()[len(head)] == ",".join(COLUMNS)


def test_malformed_spec_exits_2(capsys):
    code, _, err = _run(["phi", "--system-text", "kind=odometer base=", "--set", "full"], capsys)
    assert code == 2
    assert "1:20" in err


def test_bad_set_exits_2(capsys):
    code, _, err = _run(["phi", "--system-text", "kind=odometer base=2", "--set", 'cyl("5")'], capsys)
    assert code == 2 and "outside base" in err


def test_precondition_exits_2(capsys):
    code, _, err = _run(["witness", "--system-text", "kind=odometer base=2", "--set", 'cyl("0")'], capsys)
    assert code == 2 and "continuous" in err


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 2


def test_check_suite_exit_status(capsys):
    code, out, err = _run(["check", "witness-jump", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["rows"][0]["param"] == "witness-jump" and doc["rows"][0]["lower"] == "1"
    assert "[PASS] witness-jump" in err


def test_check_group_plan(tmp_path, capsys):
    plan = {"tasks": [{"task": "check", "suite": "tm1-suite"}], "format": "json"}
    (tmp_path / "p.json").write_text(json.dumps(plan))
    code, out, _ = _run(["run", str(tmp_path / "p.json")], capsys)
    assert code == 0
    assert [r["param"] for r in json.loads(out)["rows"]] == ["ergodicity", "witness-jump", "null-point", "ergodic-probes"]


def test_failed_check_exits_1(monkeypatch, capsys):
    from ergolab import checks

    def broken(seed=0):
        return checks.CheckResult("broken", False, "forced", 0.0, None)

    monkeypatch.setitem(checks.SUITES, "broken", broken)
    code, _, _ = _run(["check", "broken"], capsys)
    assert code == 1


def test_report_is_byte_identical(tmp_path, capsys):
    spec = "kind=product of { kind=identity n=2 } { kind=odometer base=2 }"
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        code, _, _ = _run(
            ["probe", "--system-text", spec, "--set", "atoms{0}", "--radii", "1/8,1/64", "--samples", "6",
             "--seed", "11", "--format", "json", "--output", str(path)],
            capsys,
        )
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert doc["schema"] == "ergolab.report/1"
    witness = [r for r in doc["rows"] if r["task"] == "witness"][0]
    assert witness["detail"]["guarantee"] == "1/4"


def test_decimal_column_is_opt_in(capsys):
    base = ["phistar", "--system-text", "kind=odometer base=2", "--set", 'cyl("011")']
    _, plain, _ = _run(base, capsys)
    _, dec, _ = _run(base + ["--decimal"], capsys)
    assert "lower_decimal" not in plain
    row = _rows(dec)[0]
    assert row["lower"] == "1/8" and row["lower_decimal"] == "0.125"


def test_golden_values_printed_exactly(capsys):
    spec = "kind=rotation alpha=(-1/2 + 1/2*sqrt(5))"
    code, out, _ = _run(["phi", "--system-text", spec, "--set", "interval(0, (-1/2 + 1/2*sqrt(5)))", "--m-list", "0"], capsys)
    assert code == 0
    assert _rows(out)[0]["lower"] == "(-1/2 + 1/2*sqrt(5))"


def test_other_subcommands(capsys):
    code, out, _ = _run(["tower", "--system-text", "kind=odometer base=2", "--n0", "3", "--eps", "1/4"], capsys)
    assert code == 0 and _rows(out)[0]["lower"] == "15/16"
    code, out, _ = _run(["decompose", "--system-text", "kind=power k=2 of { kind=odometer base=2 }"], capsys)
    assert code == 0 and [r["certificate"] for r in _rows(out)] == ['cyl("0")', 'cyl("1")']
    code, out, _ = _run(["witness", "--system-text", "kind=odometer base=2", "--set", 'cyl("0")', "--phi-star"], capsys)
    assert code == 0 and [r["lower"] for r in _rows(out)] == ["1/2", "1/2", "1/2"]
    code, out, _ = _run(["phi", "--system-text", "kind=odometer base=2", "--set", 'cyl("0")', "--format", "markdown"], capsys)
    assert code == 0 and "| phi |" in out


def test_atomic_write_leaves_no_temp(tmp_path):
    path = tmp_path / "out.csv"
    write_atomic(str(path), Report({"seed": 0}).to_csv())
    write_atomic(str(path), Report({"seed": 1}).to_csv())
    assert os.listdir(tmp_path) == ["out.csv"]
    assert "# seed: 1" in path.read_text()


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ergolab.cli", "phi", "--system-text", "kind=odometer base=2", "--set", "empty"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert _rows(proc.stdout)[0]["lower"] == "0"


@pytest.mark.parametrize("name", ["phi_table.json", "witness.json"])
def test_shipped_plans_run(name, capsys):
    plans = os.path.join(os.path.dirname(__file__), os.pardir, "plans")
    code, out, _ = _run(["run", os.path.join(plans, name)], capsys)
    assert code == 0 and out
