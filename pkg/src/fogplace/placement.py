"""Replica placement: evaluation, exact single-VM solving, greedy pairs.

The placement space per VM: each region's users are served either by a
fog replica in their own region (access or metro) or by a cloud replica
shared across regions; a solution holds at most one cloud site per VM.
The objective is total wall-plug power, the sum of PUE-weighted replica
processing power and per-flow transport power (user traffic, the
synchronization star, and cooperation traffic between VM pairs).

The exact solver relies on the objective being separable once the root
of the synchronization star is fixed: it enumerates the root choice
(each cloud candidate, and for cloud-free solutions each tier at the
lowest user node, which the root ordering rule forces to host the root)
and picks each region's cheapest option independently.  A cloud root
must serve at least one region, otherwise the candidate collapses to a
cloud-free solution whose sync star is rooted elsewhere and would be
priced wrongly; when no region picks the cloud voluntarily, the one
with the smallest regret is forced onto it so the partition keeps its
meaning.  Ties prefer cloud over metro over access, then the lower
node id, so repeated runs are bit-for-bit reproducible.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import InfeasibleError, ValidationError
from .power import (
    PowerParams,
    facility_power,
    replica_it_power,
    transport_power,
    transport_power_by_layer,
)
from .topology import Site, Tier, Topology, route_site_to_site, route_user_to_site
from .workload import (
    Profile,
    VmSpec,
    coop_demand,
    sync_demands,
    sync_root,
    vm_workload,
)

_ORACLE_NODE_LIMIT = 6
_TIER_KEYS = {Tier.CLOUD: "cloud", Tier.METRO_FOG: "metro", Tier.ACCESS_FOG: "access"}


@dataclass(frozen=True)
class PowerBreakdown:
    """Wall-plug watts split by consumer."""

    processing_watts_by_tier: dict
    network_watts_by_layer: dict
    total_watts: float


class PlacementSolution:
    """Per-VM assignments of regions to serving sites, plus their cost.

    ``assignments[k]`` maps node id to the site serving that region's
    users of VM ``k``.  The replica set of a VM is exactly the set of
    sites appearing in its assignment.
    """

    def __init__(self, assignments, breakdown=None):
        self.assignments = tuple(dict(sorted(a.items())) for a in assignments)
        self.breakdown = breakdown

    @property
    def replicas(self):
        """Per VM, the set of sites hosting a replica."""
        return tuple(frozenset(a.values()) for a in self.assignments)

    def replica_count_by_tier(self) -> dict:
        counts = {"cloud": 0, "metro": 0, "access": 0}
        for sites in self.replicas:
            for site in sites:
                counts[_TIER_KEYS[site.tier]] += 1
        return counts

    def to_json_dict(self) -> dict:
        vms = []
        for assignment, sites in zip(self.assignments, self.replicas):
            vms.append(
                {
                    "replicas": [
                        {"node": s.node, "tier": s.tier.value}
                        for s in sorted(sites, key=Site.order_key)
                    ],
                    "assignment": {
                        str(node): {"node": site.node, "tier": site.tier.value}
                        for node, site in assignment.items()
                    },
                }
            )
        body = {"vms": vms}
        if self.breakdown is not None:
            body["power"] = {
                "processing_watts_by_tier": dict(self.breakdown.processing_watts_by_tier),
                "network_watts_by_layer": dict(self.breakdown.network_watts_by_layer),
                "total_watts": self.breakdown.total_watts,
            }
        return body


@dataclass(frozen=True, eq=False)
class Scenario:
    """A solvable problem: topology, power parameters and VM demands."""

    topology: Topology
    params: PowerParams
    vms: tuple
    coop_links: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "vms", tuple(self.vms))
        object.__setattr__(self, "coop_links", tuple(self.coop_links))
        if not self.vms:
            raise ValidationError("scenario has no VMs")
        known = set(self.topology.nodes)
        for spec in self.vms:
            stray = set(spec.users_per_node) - known
            if stray:
                raise ValidationError(
                    f"users placed at unknown nodes {sorted(stray)}"
                )
        for link in self.coop_links:
            i, j, rate = link
            if not (0 <= i < len(self.vms) and 0 <= j < len(self.vms)) or i == j:
                raise ValidationError(f"bad cooperation link {link}")
            if rate < 0:
                raise ValidationError("coop rate must be >= 0")


def load_scenario(path, topology: Topology, params: PowerParams) -> Scenario:
    """Read a scenario JSON file.

    Expected shape::

        {"vm": {"profile": "constant" | "linear",
                "peak_workload": float,
                "rate_per_user_mbps": float,
                "sync_rate_mbps": float,
                "users_per_node": {"<node>": int} | {"uniform_total": int}},
         "coop": {"rate_mbps": float, "vm": {...}}}      # optional

    ``uniform_total`` spreads users evenly over all nodes, giving any
    remainder to the lowest node ids one user each.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict) or "vm" not in raw:
        raise ValidationError(f"{path}: scenario must be an object with a 'vm' field")
    vms = [_parse_vm(raw["vm"], topology)]
    coop_links = []
    if "coop" in raw and raw["coop"] is not None:
        coop = raw["coop"]
        if not isinstance(coop, dict) or "vm" not in coop or "rate_mbps" not in coop:
            raise ValidationError(
                f"{path}: 'coop' needs 'vm' and 'rate_mbps' fields"
            )
        vms.append(_parse_vm(coop["vm"], topology))
        coop_links.append((0, 1, float(coop["rate_mbps"])))
    return Scenario(topology, params, tuple(vms), tuple(coop_links))


def _parse_vm(raw, topology: Topology) -> VmSpec:
    if not isinstance(raw, dict):
        raise ValidationError("vm entry must be an object")
    for field in ("profile", "peak_workload", "rate_per_user_mbps", "users_per_node"):
        if field not in raw:
            raise ValidationError(f"vm entry missing field {field!r}")
    try:
        profile = Profile(raw["profile"])
    except ValueError:
        raise ValidationError(f"unknown profile {raw['profile']!r}") from None
    users = _parse_users(raw["users_per_node"], topology)
    return VmSpec(
        profile=profile,
        peak_workload=float(raw["peak_workload"]),
        rate_per_user_mbps=float(raw["rate_per_user_mbps"]),
        users_per_node=users,
        sync_rate_mbps=float(raw.get("sync_rate_mbps", 0.0)),
    )


def _parse_users(raw, topology: Topology) -> dict:
    if not isinstance(raw, dict) or not raw:
        raise ValidationError("users_per_node must be a non-empty object")
    if set(raw) == {"uniform_total"}:
        total = raw["uniform_total"]
        if not isinstance(total, int) or isinstance(total, bool) or total < 1:
            raise ValidationError("uniform_total must be a positive integer")
        nodes = topology.nodes
        base, extra = divmod(total, len(nodes))
        return {n: base + (1 if i < extra else 0) for i, n in enumerate(nodes)}
    users = {}
    for key, count in raw.items():
        try:
            node = int(key)
        except (TypeError, ValueError):
            raise ValidationError(f"bad node id {key!r} in users_per_node") from None
        if not isinstance(count, int) or isinstance(count, bool):
            raise ValidationError(f"user count for node {key} must be an integer")
        users[node] = count
    return users


def evaluate(solution: PlacementSolution, scenario: Scenario) -> PowerBreakdown:
    """Total wall-plug power of a solution, validated against the model.

    Checks that every region with users is assigned exactly one serving
    site, that fog sites serve only their own region, that cloud sites
    sit at candidate nodes, and that no replica exceeds one server.
    """
    if len(solution.assignments) != len(scenario.vms):
        raise ValidationError(
            f"solution covers {len(solution.assignments)} VMs, "
            f"scenario has {len(scenario.vms)}"
        )
    topo, params = scenario.topology, scenario.params
    processing = {"cloud": 0.0, "metro": 0.0, "access": 0.0}
    network = {"access": 0.0, "metro": 0.0, "core": 0.0}

    for spec, assignment in zip(scenario.vms, solution.assignments):
        expected = set(spec.users_per_node)
        if set(assignment) != expected:
            raise ValidationError(
                "assignment must cover exactly the regions with users"
            )
        baseline_active = spec.profile is Profile.CONSTANT
        served: dict[Site, int] = {}
        for node, site in assignment.items():
            if site.tier is Tier.CLOUD and site.node not in topo.cloud_candidates:
                raise ValidationError(f"{site} is not a cloud candidate")
            served[site] = served.get(site, 0) + spec.users_per_node[node]
            flow = transport_power_by_layer(
                route_user_to_site(topo, node, site),
                spec.users_per_node[node] * spec.rate_per_user_mbps,
                params,
            )
            for layer, watts in flow.items():
                network[layer] += watts
        for site, users in served.items():
            it_watts = replica_it_power(
                vm_workload(spec, users), params, baseline_active
            )
            processing[_TIER_KEYS[site.tier]] += facility_power(
                it_watts, site.tier, params
            )
        for root, other, rate in sync_demands(served, spec.sync_rate_mbps):
            flow = transport_power_by_layer(
                route_site_to_site(topo, root, other), rate, params
            )
            for layer, watts in flow.items():
                network[layer] += watts

    for i, j, rate in scenario.coop_links:
        end_a, end_b, rate = coop_demand(
            solution.replicas[i], solution.replicas[j], rate
        )
        if end_a != end_b:
            flow = transport_power_by_layer(
                route_site_to_site(topo, end_a, end_b), rate, params
            )
            for layer, watts in flow.items():
                network[layer] += watts

    total = sum(processing.values()) + sum(network.values())
    return PowerBreakdown(processing, network, total)


# ---------------------------------------------------------------------------
# Exact single-VM solver


def _region_option_cost(topo, params, spec, node, site, root):
    """Additive cost of serving one region's users from ``site``.

    Covers the user-traffic transport, and for a new fog replica its
    facility power and synchronization arm from ``root``.  For the root
    itself only the workload-proportional share is counted here; any
    baseline and constant-profile peak of the root is a per-candidate
    fixed cost, and the root has no synchronization arm.
    """
    users = spec.users_per_node[node]
    cost = transport_power(
        route_user_to_site(topo, node, site), users * spec.rate_per_user_mbps, params
    )
    if site == root:
        if spec.profile is Profile.LINEAR:
            share = spec.peak_workload * users / spec.total_users
            cost += facility_power(share * params.server_prop_power, site.tier, params)
        return cost
    baseline_active = spec.profile is Profile.CONSTANT
    it_watts = replica_it_power(vm_workload(spec, users), params, baseline_active)
    cost += facility_power(it_watts, site.tier, params)
    if spec.sync_rate_mbps > 0:
        cost += transport_power(
            route_site_to_site(topo, root, site), spec.sync_rate_mbps, params
        )
    return cost


def _solve_single(topo, params, spec, anchors=()):
    """Exact placement for one VM, optionally pulled toward anchor sites.

    ``anchors`` are (site, rate) pairs of cooperation traffic between
    this VM's root and already-placed partner roots; the cost is fixed
    per root candidate, so exactness is preserved.
    """
    cap = params.server_capacity_workload
    if spec.peak_workload > cap + 1e-12:
        raise InfeasibleError(
            f"peak workload {spec.peak_workload} exceeds server capacity {cap}"
        )
    nodes = sorted(spec.users_per_node)
    lowest = nodes[0]

    def anchor_cost(root):
        watts = 0.0
        for site, rate in anchors:
            if site != root:
                watts += transport_power(
                    route_site_to_site(topo, root, site), rate, params
                )
        return watts

    candidates = []

    for cloud_node in sorted(topo.cloud_candidates):
        root = Site(cloud_node, Tier.CLOUD)
        total = _root_processing_cost(params, spec, Tier.CLOUD) + anchor_cost(root)
        assignment = {}
        regrets = []
        root_serves = False
        for node in nodes:
            options = _region_options(topo, params, spec, node, root)
            cost, _, _, site = min(options)
            root_option = next(o for o in options if o[3] == root)
            assignment[node] = site
            total += cost
            if site == root:
                root_serves = True
            else:
                regrets.append((root_option[0] - cost, node))
        if not root_serves:
            # Partition rule: the cloud root must serve someone, else the
            # candidate duplicates a cloud-free solution with a mispriced
            # sync star.  Put the least-regret region on the root.
            regret, node = min(regrets)
            total += regret
            assignment[node] = root
        candidates.append((total, root.tier.rank, root.node, assignment))

    # Cloud-free solutions: every region is served in-region, and the
    # root ordering rule places the sync root at the lowest user node.
    for tier in (Tier.METRO_FOG, Tier.ACCESS_FOG):
        root = Site(lowest, tier)
        total = anchor_cost(root)
        total += _root_processing_cost(params, spec, tier)
        assignment = {lowest: root}
        total += _region_option_cost(topo, params, spec, lowest, root, root)
        for node in nodes[1:]:
            options = _region_options(
                topo, params, spec, node, root, include_root=False
            )
            cost, _, _, site = min(options)
            assignment[node] = site
            total += cost
        candidates.append((total, root.tier.rank, root.node, assignment))

    total, _, _, assignment = min(
        candidates, key=lambda c: (c[0], c[1], c[2], _assignment_key(c[3]))
    )
    return assignment


def _region_options(topo, params, spec, node, root, include_root=True):
    """Sorted-comparable option tuples for one region under one root.

    A region can always use its own fogs; the root is an option only
    when it is a cloud (``include_root`` is False for fog roots, which
    serve no region but their own).
    """
    sites = [Site(node, Tier.METRO_FOG), Site(node, Tier.ACCESS_FOG)]
    if include_root:
        sites.insert(0, root)
    options = []
    for site in sites:
        cost = _region_option_cost(topo, params, spec, node, site, root)
        options.append((cost, site.tier.rank, site.node, site))
    return options


def _root_processing_cost(params, spec, tier):
    """Fixed processing power of the root replica for one candidate.

    A constant-profile replica draws its full peak regardless of how
    many regions it serves, so this is a per-candidate constant.  A
    linear-profile root draws only the per-region shares, which the
    per-region option costs already carry.
    """
    if spec.profile is Profile.CONSTANT:
        it_watts = replica_it_power(spec.peak_workload, params, True)
        return facility_power(it_watts, tier, params)
    return 0.0


def solve_exact_single_vm(scenario: Scenario) -> PlacementSolution:
    """Globally optimal placement for a single-VM scenario."""
    if len(scenario.vms) != 1:
        raise ValidationError("exact solver handles single-VM scenarios only")
    assignment = _solve_single(
        scenario.topology, scenario.params, scenario.vms[0]
    )
    solution = PlacementSolution([assignment])
    solution.breakdown = evaluate(solution, scenario)
    return solution


def brute_force_oracle(scenario: Scenario) -> PlacementSolution:
    """Exhaustive reference search for tiny instances.

    Enumerates every combination of per-region choices for every cloud
    root, plus all cloud-free combinations, and evaluates each complete
    assignment.  Intended for cross-checking the exact solver; refuses
    topologies larger than six nodes.
    """
    if len(scenario.vms) != 1:
        raise ValidationError("oracle handles single-VM scenarios only")
    topo, params, spec = scenario.topology, scenario.params, scenario.vms[0]
    if len(topo.nodes) > _ORACLE_NODE_LIMIT:
        raise ValidationError(
            f"oracle limited to {_ORACLE_NODE_LIMIT} nodes, "
            f"got {len(topo.nodes)}"
        )
    cap = params.server_capacity_workload
    if spec.peak_workload > cap + 1e-12:
        raise InfeasibleError(
            f"peak workload {spec.peak_workload} exceeds server capacity {cap}"
        )
    nodes = sorted(spec.users_per_node)
    choice_sets = []
    for cloud_node in sorted(topo.cloud_candidates):
        root = Site(cloud_node, Tier.CLOUD)
        choice_sets.append(
            [
                [root, Site(n, Tier.METRO_FOG), Site(n, Tier.ACCESS_FOG)]
                for n in nodes
            ]
        )
    choice_sets.append(
        [[Site(n, Tier.METRO_FOG), Site(n, Tier.ACCESS_FOG)] for n in nodes]
    )

    best = None
    for per_node in choice_sets:
        for combo in itertools.product(*per_node):
            assignment = dict(zip(nodes, combo))
            solution = PlacementSolution([assignment])
            breakdown = evaluate(solution, scenario)
            key = (breakdown.total_watts, _assignment_key(assignment))
            if best is None or key < best[0]:
                solution.breakdown = breakdown
                best = (key, solution)
    return best[1]


def _assignment_key(assignment):
    return tuple(
        (node, site.tier.rank, site.node) for node, site in sorted(assignment.items())
    )


def solve_greedy_multi_vm(scenario: Scenario) -> PlacementSolution:
    """Place VMs one at a time in declaration order.

    Each VM is placed exactly, treating cooperation traffic toward
    already-placed partners as a fixed cost per root candidate.  The
    result is compared against the all-cloud baseline (every VM rooted
    at one shared cloud candidate) and the cheaper one is returned.
    """
    topo, params = scenario.topology, scenario.params
    placed_roots: dict[int, Site] = {}
    assignments = []
    for index, spec in enumerate(scenario.vms):
        anchors = []
        for i, j, rate in scenario.coop_links:
            other = j if i == index else (i if j == index else None)
            if other is not None and other in placed_roots and rate > 0:
                anchors.append((placed_roots[other], rate))
        assignment = _solve_single(topo, params, spec, anchors)
        assignments.append(assignment)
        placed_roots[index] = _realized_root(assignment)
    greedy = PlacementSolution(assignments)
    greedy.breakdown = evaluate(greedy, scenario)

    best = greedy
    for cloud_node in sorted(topo.cloud_candidates):
        root = Site(cloud_node, Tier.CLOUD)
        try:
            candidate = PlacementSolution(
                [{n: root for n in spec.users_per_node} for spec in scenario.vms]
            )
            candidate.breakdown = evaluate(candidate, scenario)
        except ValidationError:
            continue
        if candidate.breakdown.total_watts < best.breakdown.total_watts:
            best = candidate
    return best


def _realized_root(assignment):
    return sync_root(assignment.values())
