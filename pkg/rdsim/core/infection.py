"""
Placement of the study trait A on a fixed fraction of the network nodes.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from .errors import ProtocolError
from .graph import CommunityPartition, Network
from .netgen import round_half_up

logger = logging.getLogger("rdsim")

PROTOCOLS = ("RI", "PI", "PRI", "SI", "BI", "SRI", "BRI")
COMMUNITY_PROTOCOLS = ("SI", "BI", "SRI", "BRI")
DEFAULT_NOISE = {"PRI": 0.20, "SRI": 0.40, "BRI": 0.40}


@dataclass(frozen=True)
class ProtocolSpec:
    """
    Trait placement protocol.

    Attributes:
        kind (str): RI (uniform), PI (high degree first), SI (small communities
            first), BI (big communities first), and the noisy variants PRI, SRI, BRI
        prevalence (float): Fraction of nodes carrying the trait
        noise (float): Fraction of carriers moved uniformly after placement;
            defaults to 0.20 for PRI, 0.40 for SRI/BRI and 0 otherwise
    """

    kind: str = "RI"
    prevalence: float = 0.25
    noise: Optional[float] = None

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in PROTOCOLS:
            raise ProtocolError(f"unknown protocol {self.kind!r}; expected one of {', '.join(PROTOCOLS)}")
        object.__setattr__(self, "kind", kind)
        if self.noise is None:
            object.__setattr__(self, "noise", DEFAULT_NOISE.get(kind, 0.0))
        if not 0.0 <= self.prevalence <= 1.0:
            raise ProtocolError(f"quota exceeds N: prevalence must lie in [0, 1], got {self.prevalence}")
        if not 0.0 <= self.noise <= 1.0:
            raise ProtocolError(f"noise must lie in [0, 1], got {self.noise}")

    @property
    def base_kind(self) -> str:
        """Protocol without its noise suffix (PRI -> PI, SRI -> SI, BRI -> BI)."""
        return {"PRI": "PI", "SRI": "SI", "BRI": "BI"}.get(self.kind, self.kind)

    @property
    def needs_partition(self) -> bool:
        return self.kind in COMMUNITY_PROTOCOLS


@dataclass(frozen=True, eq=False)
class InfectionAssignment:
    """
    Boolean trait mark per node.

    Attributes:
        infected (np.ndarray): Boolean array, True for carriers of A
        true_prevalence (float): Realized fraction P_A of carriers
        protocol (str): Protocol that produced the assignment
    """

    infected: np.ndarray
    true_prevalence: float
    protocol: str = ""

    @property
    def node_count(self) -> int:
        return len(self.infected)

    @property
    def count(self) -> int:
        return int(self.infected.sum())

    @classmethod
    def from_mask(cls, infected, protocol: str = "") -> "InfectionAssignment":
        mask = np.asarray(infected, dtype=bool)
        if len(mask) == 0:
            raise ProtocolError("empty infection mask")
        return cls(infected=mask, true_prevalence=mask.sum() / len(mask), protocol=protocol)


def infection_quota(n: int, prevalence: float) -> int:
    """Number of carriers, rounded half up."""
    quota = round_half_up(prevalence * n)
    if quota > n:
        raise ProtocolError(f"quota exceeds N: {quota} > {n}")
    return quota


def _by_degree(net: Network, quota: int) -> np.ndarray:
    ids = np.arange(net.node_count)
    order = np.lexsort((ids, -net.degrees))
    return order[:quota]


def _by_community(part: CommunityPartition, quota: int, smallest_first: bool,
                  rng: np.random.Generator) -> np.ndarray:
    # Overlapping nodes count towards their smallest (SI) or largest (BI) community.
    groups: Dict[int, List[int]] = {}
    for v in range(part.node_count):
        c = part.smallest_community(v) if smallest_first else part.largest_community(v)
        groups.setdefault(c, []).append(v)

    sign = 1 if smallest_first else -1
    chosen: List[int] = []
    for c in sorted(groups, key=lambda c: (sign * part.sizes[c], c)):
        remaining = quota - len(chosen)
        if remaining <= 0:
            break
        members = groups[c]
        if len(members) <= remaining:
            chosen.extend(members)
        else:
            chosen.extend(rng.choice(members, size=remaining, replace=False).tolist())
    return np.asarray(chosen, dtype=np.int64)


def redistribute(infected: np.ndarray, noise: float, rng: np.random.Generator) -> np.ndarray:
    """
    Cure a fraction ``noise`` of the carriers, then infect as many nodes drawn
    uniformly among all non-carriers, the just-cured included; the count is
    unchanged.
    """
    carriers = np.flatnonzero(infected)
    moved = round_half_up(noise * len(carriers))
    if moved == 0:
        return infected.copy()
    out = infected.copy()
    out[rng.choice(carriers, size=moved, replace=False)] = False
    out[rng.choice(np.flatnonzero(~out), size=moved, replace=False)] = True
    return out


def place_infection(net: Network, part: Optional[CommunityPartition], spec: ProtocolSpec,
                    rng: np.random.Generator) -> InfectionAssignment:
    """
    Mark exactly round-half-up(prevalence * N) nodes as carriers of A.

    Args:
        net: Study network
        part: Community partition (required by SI, BI, SRI, BRI)
        spec: Protocol specification
        rng: Random generator

    Returns:
        InfectionAssignment: Carrier mask and realized prevalence

    Raises:
        ProtocolError: If a community protocol is requested without a matching partition
    """
    n = net.node_count
    quota = infection_quota(n, spec.prevalence)
    if spec.needs_partition:
        if part is None:
            raise ProtocolError(f"protocol {spec.kind} needs a community partition")
        if part.node_count != n:
            raise ProtocolError(f"partition covers {part.node_count} nodes, network has {n}")

    base = spec.base_kind
    if base == "RI":
        chosen = rng.choice(n, size=quota, replace=False)
    elif base == "PI":
        chosen = _by_degree(net, quota)
    else:
        chosen = _by_community(part, quota, smallest_first=(base == "SI"), rng=rng)

    infected = np.zeros(n, dtype=bool)
    infected[chosen] = True
    if spec.noise > 0:
        infected = redistribute(infected, spec.noise, rng)

    logger.info(f"Placed {spec.kind} infection on {int(infected.sum())} of {n} nodes")
    return InfectionAssignment(infected=infected, true_prevalence=quota / n, protocol=spec.kind)
