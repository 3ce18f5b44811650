"""Energy-minimizing VM placement over a three-tier cloud-fog network.

Users in each region can be served from an access fog, a metro fog, or
a shared cloud replica; the solver picks the replica set and user
assignment with the lowest total wall-plug power, trading PUE-weighted
server power against per-bit transport power.
"""

from .errors import InfeasibleError, ValidationError
from .placement import (
    PlacementSolution,
    PowerBreakdown,
    Scenario,
    brute_force_oracle,
    evaluate,
    load_scenario,
    solve_exact_single_vm,
    solve_greedy_multi_vm,
)
from .power import (
    PowerParams,
    facility_power,
    load_power_params,
    replica_it_power,
    transport_power,
    transport_power_by_layer,
)
from .sweep import (
    GridSpec,
    SweepRow,
    distribution,
    emit_report,
    load_grid,
    parse_report,
    run_grid,
)
from .topology import (
    RouteSegments,
    Site,
    Tier,
    Topology,
    load_topology,
    route_site_to_site,
    route_user_to_site,
)
from .workload import (
    AppCategory,
    Profile,
    VmSpec,
    classify_app,
    coop_demand,
    sync_demands,
    sync_root,
    vm_workload,
)

__version__ = "0.1.0"

__all__ = [
    "AppCategory",
    "GridSpec",
    "InfeasibleError",
    "PlacementSolution",
    "PowerBreakdown",
    "PowerParams",
    "Profile",
    "RouteSegments",
    "Scenario",
    "Site",
    "SweepRow",
    "Tier",
    "Topology",
    "ValidationError",
    "VmSpec",
    "brute_force_oracle",
    "classify_app",
    "coop_demand",
    "distribution",
    "emit_report",
    "evaluate",
    "facility_power",
    "load_grid",
    "load_power_params",
    "load_scenario",
    "load_topology",
    "parse_report",
    "replica_it_power",
    "route_site_to_site",
    "route_user_to_site",
    "run_grid",
    "solve_exact_single_vm",
    "solve_greedy_multi_vm",
    "sync_demands",
    "sync_root",
    "transport_power",
    "transport_power_by_layer",
    "vm_workload",
]
