"""VM demand profiles and inter-replica traffic demands.

A VM aggregates the demand of its subscribed users.  Two profiles are
supported: a constant profile that runs at peak on every replica that
serves anyone, and a linear profile whose replica workload scales with
the fraction of users assigned to it (and carries no idle power).

Replicas of one VM synchronize state over a star rooted at the cloud
replica when one exists, otherwise at the lowest-ordered replica site.
Cooperating VM pairs exchange traffic between their two star roots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import ValidationError
from .topology import Site, Tier

# Per-user workload share may not exceed 60% of one server.
_MAX_PEAK_PER_USER = 0.6


class Profile(Enum):
    CONSTANT = "constant"
    LINEAR = "linear"


class AppCategory(Enum):
    """Coarse application class by per-user data rate."""

    BASIC = "basic"
    INTERMEDIATE = "intermediate"
    ADVANCED = "advanced"


def classify_app(rate_per_user_mbps: float) -> AppCategory:
    """Classify an application by its per-user rate in Mbps."""
    if rate_per_user_mbps < 0:
        raise ValidationError(f"negative rate {rate_per_user_mbps}")
    if rate_per_user_mbps <= 0.75:
        return AppCategory.BASIC
    if rate_per_user_mbps <= 2.5:
        return AppCategory.INTERMEDIATE
    return AppCategory.ADVANCED


@dataclass(frozen=True)
class VmSpec:
    """One VM's demand description.

    ``users_per_node`` maps core node id to the number of subscribed
    users in that region; ``peak_workload`` is the fraction of one
    server the VM needs when fully loaded.
    """

    profile: Profile
    peak_workload: float
    rate_per_user_mbps: float
    users_per_node: dict = field(default_factory=dict)
    sync_rate_mbps: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.profile, Profile):
            raise ValidationError(f"unknown profile {self.profile!r}")
        if not 0 < self.peak_workload <= 1.0:
            raise ValidationError(
                f"peak_workload {self.peak_workload} outside (0, 1]"
            )
        if self.rate_per_user_mbps < 0:
            raise ValidationError("rate_per_user_mbps must be >= 0")
        if self.sync_rate_mbps < 0:
            raise ValidationError("sync_rate_mbps must be >= 0")
        users = {}
        for node, count in self.users_per_node.items():
            if not isinstance(count, int) or isinstance(count, bool) or count < 0:
                raise ValidationError(
                    f"user count for node {node} must be a non-negative integer"
                )
            if count > 0:
                users[int(node)] = count
        object.__setattr__(self, "users_per_node", users)
        total = sum(users.values())
        if total == 0:
            raise ValidationError("VM has no users")
        if self.peak_workload / total > _MAX_PEAK_PER_USER:
            raise ValidationError(
                f"peak_workload {self.peak_workload} over {total} users exceeds "
                f"the {_MAX_PEAK_PER_USER} per-user share bound"
            )

    @property
    def total_users(self) -> int:
        return sum(self.users_per_node.values())


def vm_workload(spec: VmSpec, users_assigned: int) -> float:
    """Workload one replica carries when serving the given user count.

    Constant-profile replicas run at peak whenever they serve anyone;
    linear-profile replicas scale with the assigned share of all users.
    """
    if users_assigned < 0:
        raise ValidationError(f"negative user count {users_assigned}")
    total = spec.total_users
    if users_assigned > total:
        raise ValidationError(
            f"{users_assigned} users assigned but the VM has only {total}"
        )
    if spec.profile is Profile.CONSTANT:
        return spec.peak_workload if users_assigned > 0 else 0.0
    return spec.peak_workload * users_assigned / total


def sync_root(replicas) -> Site:
    """Root of the synchronization star for a set of replica sites.

    The cloud replica roots the star when present (lowest node id if
    several); otherwise the replica with the lowest (node, tier) order.
    """
    sites = sorted(set(replicas), key=Site.order_key)
    if not sites:
        raise ValidationError("no replicas")
    clouds = [s for s in sites if s.tier is Tier.CLOUD]
    return clouds[0] if clouds else sites[0]


def sync_demands(replicas, sync_rate_mbps: float) -> list:
    """Star demands (root, replica, rate) keeping replicas in sync."""
    if sync_rate_mbps < 0:
        raise ValidationError("sync_rate_mbps must be >= 0")
    root = sync_root(replicas)
    others = sorted(
        (s for s in set(replicas) if s != root), key=Site.order_key
    )
    return [(root, other, sync_rate_mbps) for other in others]


def coop_demand(replicas_a, replicas_b, coop_rate_mbps: float) -> tuple:
    """Cooperation demand between two VMs' star roots.

    The two roots may coincide, in which case the demand crosses no
    network segment and costs nothing.
    """
    if coop_rate_mbps < 0:
        raise ValidationError("coop rate must be >= 0")
    return (sync_root(replicas_a), sync_root(replicas_b), coop_rate_mbps)
