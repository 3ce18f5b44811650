"""Command-line behavior: flags, outputs, exit codes."""

import json

import pytest
from importlib import resources

from fogplace.cli import main
from fogplace.sweep import CSV_HEADER

DATA = resources.files("fogplace") / "data"


def test_solve_bundled_names_to_stdout(capsys):
    rc = main(
        ["solve", "--topology", "att25.json", "--scenario", "linear10.json", "--quiet"]
    )
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["distribution"]["pct_access"] == 100.0
    assert len(doc["vms"]) == 1


def test_solve_writes_file_and_summary(tmp_path, capsys):
    out = tmp_path / "solution.json"
    rc = main(
        [
            "solve",
            "--topology",
            "att25.json",
            "--scenario",
            "constant50.json",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "total" in captured.err
    doc = json.loads(out.read_text())
    assert doc["distribution"]["replicas_metro"] == 14


def test_sweep_csv_and_json(tmp_path, capsys):
    out = tmp_path / "report.csv"
    rc = main(
        ["sweep", "--topology", "att25.json", "--out", str(out), "--quiet"]
    )
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 43
    rc = main(
        ["sweep", "--topology", "att25.json", "--format", "json", "--quiet", "--jobs", "2"]
    )
    assert rc == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 42


def test_validate_reports_inputs(capsys):
    rc = main(
        [
            "validate",
            "--topology",
            "att25.json",
            "--scenario",
            "linear10.json",
            "--grid",
            "fig6_grid.json",
        ]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "25 nodes" in out
    assert "42 cells" in out


def test_missing_required_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--scenario", "linear10.json"])
    assert exc.value.code == 2


def test_unknown_file_exits_3(capsys):
    rc = main(["solve", "--topology", "missing.json", "--scenario", "linear10.json"])
    assert rc == 3
    assert "missing.json" in capsys.readouterr().err


def test_invalid_file_contents_exit_3(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"name\": \"x\"}")
    rc = main(["validate", "--topology", str(bad)])
    assert rc == 3


def test_infeasible_scenario_exits_4(tmp_path, capsys):
    params = json.loads((DATA / "reference_params.json").read_text())
    params["server_capacity_workload"] = 0.05
    params_path = tmp_path / "tiny.json"
    params_path.write_text(json.dumps(params))
    rc = main(
        [
            "solve",
            "--topology",
            "att25.json",
            "--params",
            str(params_path),
            "--scenario",
            "linear10.json",
        ]
    )
    assert rc == 4
    assert "capacity" in capsys.readouterr().err


def test_inputs_never_mutated(tmp_path):
    source = (DATA / "att25.json").read_text()
    topo_path = tmp_path / "topo.json"
    topo_path.write_text(source)
    before = topo_path.read_bytes()
    main(["sweep", "--topology", str(topo_path), "--quiet", "--out", str(tmp_path / "r.csv")])
    assert topo_path.read_bytes() == before
