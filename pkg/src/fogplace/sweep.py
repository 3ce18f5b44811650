"""Parameter sweeps over demand grids, and report serialization.

A grid is the cross product of VM profiles, peak workloads, per-user
rates and PUE triples, all served to the same user population.  Each
cell is solved exactly and summarized as one row: the user-weighted
placement percentages per tier, replica counts per tier, and total
power.  Rows are ordered profile, then workload, then rate, then PUE
triple, regardless of worker count, and the CSV form is byte-stable:
floats are written with ``%.6g`` so emit, parse, emit round-trips to
the identical file.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from itertools import product
from pathlib import Path

from .errors import InfeasibleError, ValidationError
from .placement import (
    PlacementSolution,
    Scenario,
    _parse_users,
    solve_exact_single_vm,
)
from .power import PowerParams
from .topology import Tier, Topology
from .workload import Profile, VmSpec

CSV_HEADER = (
    "profile,peak_workload,rate_mbps,pue_cloud,pue_metro,pue_access,"
    "pct_cloud,pct_metro,pct_access,"
    "replicas_cloud,replicas_metro,replicas_access,total_watts"
)

_FLOAT_FIELDS = frozenset(
    {
        "peak_workload",
        "rate_mbps",
        "pue_cloud",
        "pue_metro",
        "pue_access",
        "pct_cloud",
        "pct_metro",
        "pct_access",
        "total_watts",
    }
)
_INT_FIELDS = frozenset({"replicas_cloud", "replicas_metro", "replicas_access"})


@dataclass(frozen=True)
class SweepRow:
    profile: str
    peak_workload: float
    rate_mbps: float
    pue_cloud: float
    pue_metro: float
    pue_access: float
    pct_cloud: float
    pct_metro: float
    pct_access: float
    replicas_cloud: int
    replicas_metro: int
    replicas_access: int
    total_watts: float


@dataclass(frozen=True)
class GridSpec:
    """Axes of a sweep plus the shared user population."""

    profiles: tuple
    peak_workloads: tuple
    rates_mbps: tuple
    pue_sets: tuple
    users_per_node: dict
    sync_rate_mbps: float = 0.0

    def cells(self):
        """Grid points in report order."""
        return product(self.profiles, self.peak_workloads, self.rates_mbps, self.pue_sets)


def load_grid(path, topology: Topology) -> GridSpec:
    """Read a grid JSON file.

    Expected shape::

        {"profiles": ["linear", "constant"],
         "peak_workloads": [0.1, 0.5, 1.0],
         "rates_mbps": [0.1, 1, 10, 20, 50, 100, 200],
         "pue_sets": [[1.3, 1.4, 1.5]],
         "base": {"users_per_node": {"uniform_total": 800},
                  "sync_rate_mbps": 0.0}}
    """
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: grid must be a JSON object")
    for field in ("profiles", "peak_workloads", "rates_mbps", "pue_sets", "base"):
        if field not in raw:
            raise ValidationError(f"{path}: grid missing field {field!r}")
    try:
        profiles = tuple(Profile(p) for p in raw["profiles"])
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from None
    pue_sets = []
    for entry in raw["pue_sets"]:
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise ValidationError(
                f"{path}: each pue_set must be [cloud, metro, access]"
            )
        pue_sets.append(tuple(float(v) for v in entry))
    base = raw["base"]
    if not isinstance(base, dict) or "users_per_node" not in base:
        raise ValidationError(f"{path}: base needs a users_per_node field")
    if not profiles or not raw["peak_workloads"] or not raw["rates_mbps"] or not pue_sets:
        raise ValidationError(f"{path}: every grid axis needs at least one value")
    return GridSpec(
        profiles=profiles,
        peak_workloads=tuple(float(w) for w in raw["peak_workloads"]),
        rates_mbps=tuple(float(r) for r in raw["rates_mbps"]),
        pue_sets=tuple(pue_sets),
        users_per_node=_parse_users(base["users_per_node"], topology),
        sync_rate_mbps=float(base.get("sync_rate_mbps", 0.0)),
    )


def distribution(solution: PlacementSolution, scenario: Scenario) -> dict:
    """User-weighted tier percentages and replica counts for a solution."""
    tier_users = {Tier.CLOUD: 0, Tier.METRO_FOG: 0, Tier.ACCESS_FOG: 0}
    total_users = 0
    for spec, assignment in zip(scenario.vms, solution.assignments):
        for node, site in assignment.items():
            tier_users[site.tier] += spec.users_per_node[node]
            total_users += spec.users_per_node[node]
    counts = solution.replica_count_by_tier()
    return {
        "pct_cloud": 100.0 * tier_users[Tier.CLOUD] / total_users,
        "pct_metro": 100.0 * tier_users[Tier.METRO_FOG] / total_users,
        "pct_access": 100.0 * tier_users[Tier.ACCESS_FOG] / total_users,
        "replicas_cloud": counts["cloud"],
        "replicas_metro": counts["metro"],
        "replicas_access": counts["access"],
    }


def _solve_cell(args):
    topology, params, grid, cell = args
    profile, peak, rate, pues = cell
    try:
        spec = VmSpec(
            profile=profile,
            peak_workload=peak,
            rate_per_user_mbps=rate,
            users_per_node=grid.users_per_node,
            sync_rate_mbps=grid.sync_rate_mbps,
        )
        scenario = Scenario(topology, params.with_pues(*pues), (spec,))
        solution = solve_exact_single_vm(scenario)
    except (ValidationError, InfeasibleError) as exc:
        raise type(exc)(
            f"grid cell profile={profile.value} peak_workload={peak} "
            f"rate_mbps={rate} pues={pues}: {exc}"
        ) from exc
    summary = distribution(solution, scenario)
    return SweepRow(
        profile=profile.value,
        peak_workload=peak,
        rate_mbps=rate,
        pue_cloud=pues[0],
        pue_metro=pues[1],
        pue_access=pues[2],
        total_watts=solution.breakdown.total_watts,
        **summary,
    )


def run_grid(topology: Topology, params: PowerParams, grid: GridSpec, jobs: int = 1):
    """Solve every grid cell, returning rows in report order."""
    work = [(topology, params, grid, cell) for cell in grid.cells()]
    if jobs <= 1 or len(work) <= 1:
        return [_solve_cell(args) for args in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_solve_cell, work))


def _fmt(value) -> str:
    return format(value, ".6g")


def emit_report(rows, fmt: str = "csv") -> str:
    """Serialize sweep rows; ``fmt`` is ``csv`` or ``json``.

    CSV floats use 6 significant digits so identical rows always give
    identical bytes; JSON keeps full float precision so a parsed report
    compares equal to the source rows field for field.
    """
    rows = list(rows)
    if not rows:
        raise ValidationError("no rows to emit")
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        names = CSV_HEADER.split(",")
        writer.writerow(names)
        for row in rows:
            writer.writerow(
                [
                    _fmt(getattr(row, name))
                    if name in _FLOAT_FIELDS
                    else getattr(row, name)
                    for name in names
                ]
            )
        return out.getvalue()
    if fmt == "json":
        body = [
            {field.name: getattr(row, field.name) for field in fields(SweepRow)}
            for row in rows
        ]
        return json.dumps(body, indent=2) + "\n"
    raise ValidationError(f"unknown report format {fmt!r}")


def parse_report(text: str):
    """Parse a CSV report back into SweepRow values."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_HEADER.split(","):
        raise ValidationError("report header does not match the sweep schema")
    rows = []
    for record in reader:
        kwargs = {}
        for name, value in record.items():
            if name in _FLOAT_FIELDS:
                kwargs[name] = float(value)
            elif name in _INT_FIELDS:
                kwargs[name] = int(value)
            else:
                kwargs[name] = value
        rows.append(SweepRow(**kwargs))
    return rows
