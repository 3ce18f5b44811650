"""Device power accounting for replicas and traffic flows.

Processing power is attributed per replica: an optional baseline for
hosting the replica at all, plus a term proportional to the workload it
serves, the whole weighted by the hosting tier's PUE.  Transport power
is attributed per flow as watts per Mbps on every segment the flow
crosses.  All rates are Mbps and all energies-per-bit are expressed as
watts per Mbps; parameter files use these units directly, so any unit
conversion happens before a file is written, never at evaluation time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ValidationError
from .topology import RouteSegments, Tier

_FIELDS = (
    "pue_cloud",
    "pue_metro",
    "pue_access",
    "server_capacity_workload",
    "server_prop_power",
    "server_baseline_power",
    "e_router_port",
    "e_wdm_line",
    "e_metro",
    "e_access",
)


@dataclass(frozen=True)
class PowerParams:
    """Power model coefficients.

    PUEs are dimensionless facility overhead factors per tier.  Server
    powers are watts: ``server_prop_power`` per unit of workload (one
    full server = workload 1.0) and ``server_baseline_power`` per active
    replica.  The four ``e_*`` coefficients are watts per Mbps for one
    traversal of the named segment.
    """

    pue_cloud: float
    pue_metro: float
    pue_access: float
    server_capacity_workload: float
    server_prop_power: float
    server_baseline_power: float
    e_router_port: float
    e_wdm_line: float
    e_metro: float
    e_access: float

    def __post_init__(self) -> None:
        for name in ("pue_cloud", "pue_metro", "pue_access"):
            if getattr(self, name) < 1.0:
                raise ValidationError(f"{name} must be >= 1.0")
        if self.server_capacity_workload <= 0:
            raise ValidationError("server_capacity_workload must be > 0")
        for name in _FIELDS[4:]:
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")

    def pue(self, tier: Tier) -> float:
        if tier is Tier.CLOUD:
            return self.pue_cloud
        if tier is Tier.METRO_FOG:
            return self.pue_metro
        return self.pue_access

    def with_pues(self, cloud: float, metro: float, access: float) -> "PowerParams":
        return replace(self, pue_cloud=cloud, pue_metro=metro, pue_access=access)


def load_power_params(path) -> PowerParams:
    """Read a parameter JSON file holding exactly the PowerParams fields."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: expected a JSON object")
    missing = [f for f in _FIELDS if f not in raw]
    if missing:
        raise ValidationError(f"{path}: missing parameter fields {missing}")
    extra = [k for k in raw if k not in _FIELDS]
    if extra:
        raise ValidationError(f"{path}: unknown parameter fields {extra}")
    values = {}
    for field in _FIELDS:
        value = raw[field]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ValidationError(f"{path}: {field} must be a number")
        values[field] = float(value)
    return PowerParams(**values)


def replica_it_power(workload: float, params: PowerParams, baseline_active: bool) -> float:
    """IT watts drawn by one replica serving the given workload.

    The baseline term applies only when the replica's profile attributes
    idle power (constant-profile replicas do, linear-profile ones do
    not); a replica with zero workload and no baseline draws nothing.
    """
    if workload < 0:
        raise ValidationError(f"negative workload {workload}")
    if workload > params.server_capacity_workload + 1e-12:
        raise ValidationError(
            f"workload {workload} exceeds server capacity "
            f"{params.server_capacity_workload}"
        )
    baseline = params.server_baseline_power if baseline_active else 0.0
    return baseline + workload * params.server_prop_power


def facility_power(it_watts: float, tier: Tier, params: PowerParams) -> float:
    """Wall-plug watts for IT load hosted at a tier (PUE-weighted)."""
    if it_watts < 0:
        raise ValidationError(f"negative IT power {it_watts}")
    return it_watts * params.pue(tier)


def transport_power_by_layer(
    segments: RouteSegments, rate_mbps: float, params: PowerParams
) -> dict:
    """Watts drawn by one flow, split into access, metro and core."""
    if rate_mbps < 0:
        raise ValidationError(f"negative rate {rate_mbps}")
    return {
        "access": rate_mbps * segments.access * params.e_access,
        "metro": rate_mbps * segments.metro * params.e_metro,
        "core": rate_mbps
        * (
            segments.router_ports * params.e_router_port
            + segments.core_hops * params.e_wdm_line
        ),
    }


def transport_power(segments: RouteSegments, rate_mbps: float, params: PowerParams) -> float:
    """Total watts drawn by one flow across every segment it traverses."""
    return sum(transport_power_by_layer(segments, rate_mbps, params).values())
