"""Grid runs and report serialization."""

import json

import pytest
from importlib import resources

from fogplace import (
    GridSpec,
    Profile,
    SweepRow,
    ValidationError,
    emit_report,
    load_grid,
    load_power_params,
    load_topology,
    parse_report,
    run_grid,
)
from fogplace.sweep import CSV_HEADER

DATA = resources.files("fogplace") / "data"
TOPO = load_topology(DATA / "att25.json")
PARAMS = load_power_params(DATA / "reference_params.json")


def small_grid():
    return GridSpec(
        profiles=(Profile.LINEAR, Profile.CONSTANT),
        peak_workloads=(0.5,),
        rates_mbps=(1.0, 100.0),
        pue_sets=((1.3, 1.4, 1.5),),
        users_per_node={n: 4 for n in TOPO.nodes},
    )


def test_bundled_grid_shape():
    grid = load_grid(DATA / "fig6_grid.json", TOPO)
    cells = list(grid.cells())
    assert len(cells) == 2 * 3 * 7
    assert sum(grid.users_per_node.values()) == 800
    # profile is the outermost axis, then workload, then rate
    assert cells[0][0] is Profile.LINEAR
    assert [c[2] for c in cells[:7]] == [0.1, 1, 10, 20, 50, 100, 200]


def test_load_grid_rejects_bad_files(tmp_path):
    good = json.loads((DATA / "fig6_grid.json").read_text())
    for mutate in [
        lambda d: d.pop("profiles"),
        lambda d: d.update(profiles=["sometimes"]),
        lambda d: d.update(pue_sets=[[1.3, 1.4]]),
        lambda d: d.update(rates_mbps=[]),
        lambda d: d.update(base={}),
    ]:
        body = json.loads(json.dumps(good))
        mutate(body)
        path = tmp_path / "grid.json"
        path.write_text(json.dumps(body))
        with pytest.raises(ValidationError):
            load_grid(path, TOPO)


def test_run_grid_row_order_and_content():
    rows = run_grid(TOPO, PARAMS, small_grid())
    assert [(r.profile, r.rate_mbps) for r in rows] == [
        ("linear", 1.0),
        ("linear", 100.0),
        ("constant", 1.0),
        ("constant", 100.0),
    ]
    for row in rows:
        assert row.pct_cloud + row.pct_metro + row.pct_access == pytest.approx(
            100.0, abs=1e-9
        )
        assert row.pue_metro == 1.4
        assert row.total_watts > 0


def test_run_grid_parallel_matches_serial():
    grid = small_grid()
    serial = run_grid(TOPO, PARAMS, grid, jobs=1)
    parallel = run_grid(TOPO, PARAMS, grid, jobs=3)
    assert serial == parallel


def test_csv_report_roundtrip_and_stability():
    rows = run_grid(TOPO, PARAMS, small_grid())
    text = emit_report(rows, "csv")
    assert text.splitlines()[0] == CSV_HEADER
    assert len(text.splitlines()) == len(rows) + 1
    assert emit_report(rows, "csv") == text  # same bytes on re-emit
    parsed = parse_report(text)
    assert emit_report(parsed, "csv") == text  # parse -> emit is stable
    for row, back in zip(rows, parsed):
        assert back.replicas_cloud == row.replicas_cloud
        assert back.total_watts == pytest.approx(row.total_watts, rel=1e-5)


def test_json_report_roundtrips_exactly():
    rows = run_grid(TOPO, PARAMS, small_grid())
    body = json.loads(emit_report(rows, "json"))
    assert [SweepRow(**entry) for entry in body] == rows


def test_emit_report_rejects_empty_and_unknown():
    rows = run_grid(TOPO, PARAMS, small_grid())
    with pytest.raises(ValidationError):
        emit_report([], "csv")
    with pytest.raises(ValidationError):
        emit_report(rows, "yaml")
    with pytest.raises(ValidationError):
        parse_report("not,a,report\n1,2,3\n")


def test_single_row_report():
    grid = GridSpec(
        profiles=(Profile.LINEAR,),
        peak_workloads=(0.1,),
        rates_mbps=(5.0,),
        pue_sets=((1.3, 1.4, 1.5),),
        users_per_node={n: 4 for n in TOPO.nodes},
    )
    rows = run_grid(TOPO, PARAMS, grid)
    text = emit_report(rows, "csv")
    assert len(text.splitlines()) == 2
