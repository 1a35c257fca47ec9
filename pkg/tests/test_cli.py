import csv
import io
import json
import subprocess
import sys

import pytest

from congested_floc.cli import EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_lof_witness(capsys):
    code, out, _ = run(capsys, "eval", "--witness", "lof-17-8", "--mechanism", "lofm", "--objective", "max")
    assert code == EXIT_OK
    doc = json.loads(out)
    (rep,) = doc["runs"][0]["mechanisms"]
    assert rep["ratio"] == "17/8"
    assert doc["runs"][0]["optima"]["max"]["exact"]["y"] == "4/7"


def test_eval_fixed_location_comparison(capsys):
    code, out, _ = run(capsys, "eval", "--witness", "lemma6-tight", "--mechanism", "midm",
                       "--objective", "max", "--format", "csv")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    by_name = {r["mechanism"]: r for r in rows}
    assert by_name["midm"]["ratio"] == "1"
    assert by_name["at=1"]["ratio"] == "2"


def test_eval_singleton_instance(tmp_path, capsys):
    path = tmp_path / "one.json"
    path.write_text('{"groups":[{"id":0,"alpha":"1/2"}],"agents":[{"x":"3/8","group":0}]}')
    code, out, _ = run(capsys, "eval", "--instance", str(path), "--oracle", "both", "--format", "csv")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 10
    assert {r["facility"] for r in rows} == {"3/8"}
    assert {r["ratio"] for r in rows} == {"1"}


def test_eval_at_points(capsys):
    code, out, _ = run(capsys, "eval", "--witness", "lof-17-8", "--mechanism", "lofm",
                       "--objective", "max", "--at", "4/7", "--at", "0")
    comps = json.loads(out)["runs"][0]["comparisons"]
    assert [c["ratio"] for c in comps] == ["1", "17/8"]


def test_audit_resm_counterexample(capsys):
    code, out, _ = run(capsys, "audit", "--mechanism", "resm", "--deviations", "group",
                       "--witness", "resm-group-ce")
    assert code == EXIT_VIOLATION
    doc = json.loads(out)
    assert doc["violation_count"] >= 1
    v = doc["violations"][0]
    assert v["gain"] == "2/5" and v["deviated_facility"] == "1"


def test_audit_midm_group_random(capsys):
    code, out, _ = run(capsys, "audit", "--mechanism", "midm", "--deviations", "group",
                       "--trials", "50", "--seed", "7")
    assert code == EXIT_OK
    assert json.loads(out)["ok"] is True


def test_audit_medm_small(capsys):
    code, _, _ = run(capsys, "audit", "--mechanism", "medm", "--deviations", "both",
                     "--trials", "30", "--seed", "7")
    assert code == EXIT_OK


def test_search_reports_bound(capsys):
    code, out, _ = run(capsys, "search", "--mechanism", "lofm", "--objective", "max",
                       "--trials", "50", "--seed", "1")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["bound"]["label"] == "17/8"
    assert doc["within_bound"] is True
    code, out, _ = run(capsys, "search", "--mechanism", "midm", "--objective", "max",
                       "--trials", "5", "--seed", "1", "--format", "csv")
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["bound_decimal"] == "1.70825098525"


def test_witnesses_command(capsys):
    code, out, _ = run(capsys, "witnesses", "--format", "csv")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and all(r["passed"] == "true" for r in rows)


def test_deterministic_output(capsys):
    args = ("search", "--mechanism", "midm", "--objective", "max", "--trials", "30", "--seed", "4")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


def test_output_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "eval", "--witness", "lof-17-8", "--output", str(target))
    assert code == EXIT_OK and out == ""
    assert json.loads(target.read_text())["runs"]


@pytest.mark.parametrize("argv", [
    ("eval", "--instance", "/nonexistent.json"),
    ("eval", "--witness", "nope"),
    ("eval",),  # generator needs a seed
    ("eval", "--witness", "fig1-violating"),
    ("audit", "--mechanism", "medm", "--mechanism", "midm", "--witness", "lof-17-8"),
    ("eval", "--witness", "lof-17-8", "--trials", "3"),
    ("search", "--mechanism", "lofm", "--objective", "max", "--n-min", "9", "--n-max", "2", "--seed", "1"),
])
def test_input_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_INPUT
    assert err.startswith("error:")


def test_malformed_instance_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert run(capsys, "eval", "--instance", str(bad))[0] == EXIT_INPUT


def test_violating_instance_with_override(capsys):
    code, out, _ = run(capsys, "eval", "--witness", "fig1-violating", "--allow-violating-aversion",
                       "--mechanism", "medm", "--objective", "max")
    assert code == EXIT_OK


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["eval", "--mechanism", "bogus"])
    assert info.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "congested_floc", "witnesses", "--witness", "lof-17-8"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["witnesses"][0]["name"] == "lof-17-8"
