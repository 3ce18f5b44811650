"""Command-line front end.

Three subcommands share the flag vocabulary:

* ``solve``: place one scenario and print the solution as JSON.
* ``sweep``: solve a whole demand grid and print a CSV or JSON report.
* ``validate``: parse and cross-check input files without solving.

Topology, parameter, grid and scenario arguments accept either a file
path or the name of a bundled data file (``att25.json``,
``reference_params.json``, ``fig6_grid.json``).  All configuration
comes from files and flags so a run is reproducible from its command
line alone.  Exit codes: 0 success, 2 usage error, 3 invalid input,
4 infeasible scenario.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .errors import InfeasibleError, ValidationError
from .placement import (
    load_scenario,
    solve_exact_single_vm,
    solve_greedy_multi_vm,
)
from .power import load_power_params
from .sweep import distribution, emit_report, load_grid, run_grid
from .topology import load_topology

_DEFAULT_PARAMS = "reference_params.json"
_DEFAULT_GRID = "fig6_grid.json"


def _resolve(name: str):
    """Interpret an argument as a path, falling back to bundled data."""
    path = Path(name)
    if path.exists():
        return path
    bundled = resources.files(__package__) / "data" / name
    if bundled.is_file():
        return bundled
    raise ValidationError(f"{name}: no such file or bundled data file")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fogplace",
        description="Energy-minimizing VM placement over a cloud-fog hierarchy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument(
            "--topology", required=True, help="topology JSON (path or bundled name)"
        )
        p.add_argument(
            "--params",
            default=_DEFAULT_PARAMS,
            help="power parameter JSON (default: bundled reference set)",
        )
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument(
            "--quiet", action="store_true", help="suppress the summary on stderr"
        )

    solve = sub.add_parser("solve", help="place one scenario")
    common(solve)
    solve.add_argument("--scenario", required=True, help="scenario JSON")

    sweep = sub.add_parser("sweep", help="solve a grid of scenarios")
    common(sweep)
    sweep.add_argument(
        "--grid",
        default=_DEFAULT_GRID,
        help="grid JSON (default: bundled demand grid)",
    )
    sweep.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="report format"
    )
    sweep.add_argument(
        "--jobs", type=int, default=1, help="worker processes for grid cells"
    )

    validate = sub.add_parser("validate", help="check input files without solving")
    common(validate)
    validate.add_argument("--scenario", help="scenario JSON to check")
    validate.add_argument("--grid", help="grid JSON to check")
    return parser


def _write(text: str, out_path) -> None:
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _info(message: str, quiet: bool) -> None:
    if not quiet:
        print(message, file=sys.stderr)


def _cmd_solve(args) -> int:
    topology = load_topology(_resolve(args.topology))
    params = load_power_params(_resolve(args.params))
    scenario = load_scenario(_resolve(args.scenario), topology, params)
    if len(scenario.vms) == 1:
        solution = solve_exact_single_vm(scenario)
    else:
        solution = solve_greedy_multi_vm(scenario)
    doc = solution.to_json_dict()
    doc["distribution"] = distribution(solution, scenario)
    _write(json.dumps(doc, indent=2) + "\n", args.out)
    summary = doc["distribution"]
    _info(
        "total {:.6g} W, users {:.6g}% cloud / {:.6g}% metro / {:.6g}% access".format(
            solution.breakdown.total_watts,
            summary["pct_cloud"],
            summary["pct_metro"],
            summary["pct_access"],
        ),
        args.quiet,
    )
    return 0


def _cmd_sweep(args) -> int:
    topology = load_topology(_resolve(args.topology))
    params = load_power_params(_resolve(args.params))
    grid = load_grid(_resolve(args.grid), topology)
    rows = run_grid(topology, params, grid, jobs=args.jobs)
    _write(emit_report(rows, args.format), args.out)
    _info(f"{len(rows)} grid cells solved", args.quiet)
    return 0


def _cmd_validate(args) -> int:
    topology = load_topology(_resolve(args.topology))
    print(
        f"topology {topology.name}: {len(topology.nodes)} nodes, "
        f"{len(topology.edges)} edges, "
        f"{len(topology.cloud_candidates)} cloud candidates"
    )
    params = load_power_params(_resolve(args.params))
    print(f"params: PUE {params.pue_cloud}/{params.pue_metro}/{params.pue_access}")
    if args.scenario:
        scenario = load_scenario(_resolve(args.scenario), topology, params)
        users = sum(spec.total_users for spec in scenario.vms)
        print(f"scenario: {len(scenario.vms)} VM(s), {users} users")
    if args.grid:
        grid = load_grid(_resolve(args.grid), topology)
        cells = len(list(grid.cells()))
        print(f"grid: {cells} cells, {sum(grid.users_per_node.values())} users")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"solve": _cmd_solve, "sweep": _cmd_sweep, "validate": _cmd_validate}
    try:
        return handlers[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
