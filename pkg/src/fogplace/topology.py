"""Three-tier network topology and route accounting.

The network has a core layer of interconnected nodes plus, per node, an
aggregated metro network and an aggregated access network.  Every node
can host an access-fog site and a metro-fog site serving its own region;
cloud sites may be hosted at the designated candidate core nodes and are
reachable from every region across the core.

Routes are reported as segment counts (access, metro, core hops, core
router ports), which the power model prices per Mbps.  Core traffic over
``h`` hops traverses ``h + 1`` IP router ports (ingress aggregation plus
one per transited node) and ``h`` line segments; a cloud co-located with
the traffic source still crosses one aggregation port.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import ValidationError


class Tier(Enum):
    """Site tier, ordered from the top of the hierarchy down."""

    CLOUD = "cloud"
    METRO_FOG = "metro"
    ACCESS_FOG = "access"

    @property
    def rank(self) -> int:
        """Position in the hierarchy: 0 cloud, 1 metro fog, 2 access fog."""
        return _TIER_RANK[self]


_TIER_RANK = {Tier.CLOUD: 0, Tier.METRO_FOG: 1, Tier.ACCESS_FOG: 2}

# Segments a site crosses upward to reach its node's core router:
# (access, metro).  Access fogs hang off the access network, metro fogs
# off the metro network, clouds sit at the core node itself.
_UPWARD = {Tier.CLOUD: (0, 0), Tier.METRO_FOG: (0, 1), Tier.ACCESS_FOG: (1, 1)}


@dataclass(frozen=True)
class Site:
    """A candidate replica location: a tier at a core node's region."""

    node: int
    tier: Tier

    def order_key(self) -> tuple:
        """Deterministic (node, tier) ordering used for root selection."""
        return (self.node, self.tier.rank)

    def __str__(self) -> str:
        return f"{self.tier.value}@{self.node}"


@dataclass(frozen=True)
class RouteSegments:
    """Per-layer traversal counts for one traffic flow."""

    access: int = 0
    metro: int = 0
    core_hops: int = 0
    router_ports: int = 0

    def __add__(self, other: "RouteSegments") -> "RouteSegments":
        return RouteSegments(
            self.access + other.access,
            self.metro + other.metro,
            self.core_hops + other.core_hops,
            self.router_ports + other.router_ports,
        )


class Topology:
    """Immutable core graph with per-node minimum hop counts.

    Hop distances between all node pairs are computed once at
    construction (breadth-first search per source), so instances are
    safe to share across concurrent scenario evaluations.
    """

    def __init__(self, name, nodes, edges, cloud_candidates):
        self.name = str(name)
        self.nodes = tuple(sorted(nodes))
        if not self.nodes:
            raise ValidationError("topology has no nodes")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValidationError("duplicate node ids")
        known = set(self.nodes)

        seen = set()
        adjacency: dict[int, set[int]] = {n: set() for n in self.nodes}
        for pair in edges:
            a, b = pair
            if a == b:
                raise ValidationError(f"self-loop at node {a}")
            if a not in known or b not in known:
                raise ValidationError(f"edge ({a}, {b}) references unknown node")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValidationError(f"duplicate edge ({a}, {b})")
            seen.add(key)
            adjacency[a].add(b)
            adjacency[b].add(a)
        self.edges = frozenset(seen)
        self._adjacency = {n: frozenset(peers) for n, peers in adjacency.items()}

        self.cloud_candidates = frozenset(cloud_candidates)
        if not self.cloud_candidates:
            raise ValidationError("cloud_candidates must not be empty")
        if not self.cloud_candidates <= known:
            bad = sorted(self.cloud_candidates - known)
            raise ValidationError(f"cloud candidates {bad} are not topology nodes")

        self._hops = {n: self._bfs(n) for n in self.nodes}
        if any(len(level) != len(self.nodes) for level in self._hops.values()):
            raise ValidationError("topology is not connected")

    def _bfs(self, source: int) -> dict[int, int]:
        level = {source: 0}
        queue = deque([source])
        while queue:
            here = queue.popleft()
            for peer in self._adjacency[here]:
                if peer not in level:
                    level[peer] = level[here] + 1
                    queue.append(peer)
        return level

    def neighbors(self, node: int) -> frozenset:
        self._require(node)
        return self._adjacency[node]

    def min_hops(self, a: int, b: int) -> int:
        """Minimum number of core links between two nodes (0 if equal)."""
        self._require(a)
        self._require(b)
        return self._hops[a][b]

    def _require(self, node: int) -> None:
        if node not in self._adjacency:
            raise ValidationError(f"unknown node {node}")

    def __repr__(self) -> str:
        return (
            f"Topology({self.name!r}, {len(self.nodes)} nodes, "
            f"{len(self.edges)} edges)"
        )


def load_topology(path) -> Topology:
    """Read a topology JSON file.

    Expected shape::

        {"name": str, "nodes": [int], "edges": [[int, int]],
         "cloud_candidates": [int]}
    """
    raw = _read_json(path)
    for field in ("name", "nodes", "edges", "cloud_candidates"):
        if field not in raw:
            raise ValidationError(f"topology file missing field {field!r}")
    return Topology(
        raw["name"], raw["nodes"], raw["edges"], raw["cloud_candidates"]
    )


def _read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc


def route_user_to_site(topology: Topology, user_node: int, site: Site) -> RouteSegments:
    """Segments traversed by user traffic from a region to a serving site.

    Fog sites may only serve their own region; clouds are reachable from
    anywhere (including their own node, which still crosses the local
    aggregation router port).
    """
    topology._require(user_node)
    topology._require(site.node)
    if site.tier is Tier.ACCESS_FOG:
        if site.node != user_node:
            raise ValidationError(f"access fog {site} cannot serve node {user_node}")
        return RouteSegments(access=1)
    if site.tier is Tier.METRO_FOG:
        if site.node != user_node:
            raise ValidationError(f"metro fog {site} cannot serve node {user_node}")
        return RouteSegments(access=1, metro=1)
    hops = topology.min_hops(user_node, site.node)
    return RouteSegments(access=1, metro=1, core_hops=hops, router_ports=hops + 1)


def route_site_to_site(topology: Topology, a: Site, b: Site) -> RouteSegments:
    """Segments traversed by replica-to-replica traffic.

    Same-node pairs cross only the layers between the two tiers and
    never enter the core; different-node pairs climb to the core, cross
    ``min_hops`` links, and descend to the other site.
    """
    if a == b:
        raise ValidationError(f"route requested between identical sites {a}")
    topology._require(a.node)
    topology._require(b.node)
    up_a = _UPWARD[a.tier]
    up_b = _UPWARD[b.tier]
    if a.node == b.node:
        return RouteSegments(
            access=max(up_a[0], up_b[0]), metro=max(up_a[1], up_b[1])
        )
    hops = topology.min_hops(a.node, b.node)
    return RouteSegments(
        access=up_a[0] + up_b[0],
        metro=up_a[1] + up_b[1],
        core_hops=hops,
        router_ports=hops + 1,
    )
