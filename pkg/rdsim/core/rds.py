"""
Continuous-time simulation of respondent-driven sampling (RDS).

Each participant waits an exponential time, then hands coupons to
uniformly chosen contacts that have not participated yet. Each invited
contact accepts with the response-rate p and immediately joins the sample;
refusers stay available for later invitations. Nobody participates twice.
"""

import heapq
import logging
from dataclasses import dataclass, replace
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .errors import SamplingError
from .graph import CommunityPartition, Network

logger = logging.getLogger("rdsim")

SEED_STRATEGIES = ("uniform", "small-community", "large-community", "sequential-restart")

EXHAUSTED = "exhausted"
CAP_REACHED = "cap_reached"

OUTCOME_COLUMNS = ["node", "recruiter", "tree", "wave", "time"]


@dataclass(frozen=True)
class RdsConfig:
    """
    Parameters of one recruitment process.

    Attributes:
        n_seeds (int): Seeds started simultaneously
        coupons (int): Coupons handed out by each participant
        mean_wait (float): Mean of the exponential waiting time before coupons are passed
        response_rate (float): Probability p that an invited contact participates
        sample_cap (int, optional): Stop once this many participants joined; None = unlimited
        seed_strategy (str): uniform, small-community, large-community or sequential-restart
        per_seed_cap (int): Successful recruits per tree in sequential-restart mode
        small_threshold (int): Communities below this size count as small
        large_threshold (int): Communities above this size count as large
        include_seeds (bool): Whether seeds enter the sample used by estimators
    """

    n_seeds: int = 10
    coupons: int = 3
    mean_wait: float = 5.0
    response_rate: float = 1.0
    sample_cap: Optional[int] = None
    seed_strategy: str = "uniform"
    per_seed_cap: int = 50
    small_threshold: int = 200
    large_threshold: int = 500
    include_seeds: bool = True

    def __post_init__(self):
        if not 0.0 <= self.response_rate <= 1.0:
            raise SamplingError(f"response rate must lie in [0, 1], got {self.response_rate}")
        if self.n_seeds < 1:
            raise SamplingError(f"need at least one seed, got {self.n_seeds}")
        if self.coupons < 1:
            raise SamplingError(f"need at least one coupon, got {self.coupons}")
        if self.mean_wait <= 0:
            raise SamplingError(f"mean waiting time must be positive, got {self.mean_wait}")
        if self.sample_cap is not None and self.sample_cap < 1:
            raise SamplingError(f"sample cap must be positive, got {self.sample_cap}")
        if self.seed_strategy not in SEED_STRATEGIES:
            raise SamplingError(f"unknown seed strategy {self.seed_strategy!r}")
        if self.per_seed_cap < 1:
            raise SamplingError(f"per-seed cap must be positive, got {self.per_seed_cap}")

    def with_response_rate(self, p: float) -> "RdsConfig":
        return replace(self, response_rate=p)


class Participant(NamedTuple):
    node: int
    recruiter: Optional[int]
    tree: int
    wave: int
    time: float


@dataclass(frozen=True, eq=False)
class RdsOutcome:
    """
    Time-ordered recruitment record of one simulation.

    Attributes:
        participants (tuple): Participant records in order of admission
        refusal_count (int): Invitations that were declined
        termination (str): ``exhausted`` or ``cap_reached``
    """

    participants: Tuple[Participant, ...]
    refusal_count: int = 0
    termination: str = EXHAUSTED

    @property
    def omega(self) -> int:
        return len(self.participants)

    def nodes(self) -> List[int]:
        return [p.node for p in self.participants]

    def seeds(self) -> List[int]:
        return [p.node for p in self.participants if p.recruiter is None]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(list(self.participants), columns=OUTCOME_COLUMNS)
        frame["recruiter"] = frame["recruiter"].astype("Int64")
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, refusal_count: int = 0,
                   termination: str = EXHAUSTED) -> "RdsOutcome":
        participants = []
        for row in frame.itertuples(index=False):
            recruiter = None if pd.isna(row.recruiter) else int(row.recruiter)
            participants.append(Participant(int(row.node), recruiter, int(row.tree), int(row.wave), float(row.time)))
        return cls(participants=tuple(participants), refusal_count=refusal_count, termination=termination)


class EventQueue:
    """Future event list ordered by time; ties pop in insertion order."""

    def __init__(self):
        self._events: List[Tuple[float, int, int]] = []
        self._counter = 0

    def schedule(self, time: float, node: int) -> None:
        heapq.heappush(self._events, (time, self._counter, node))
        self._counter += 1

    def next_event(self) -> Tuple[float, int]:
        time, _, node = heapq.heappop(self._events)
        return time, node

    def clear(self) -> None:
        self._events.clear()

    def __len__(self) -> int:
        return len(self._events)


def seed_pool(net: Network, part: Optional[CommunityPartition], cfg: RdsConfig) -> List[int]:
    """Nodes eligible as seeds under the configured strategy (isolated nodes never are)."""
    connected = net.degrees > 0
    strategy = cfg.seed_strategy
    if strategy in ("uniform", "sequential-restart"):
        return np.flatnonzero(connected).tolist()
    if part is None:
        raise SamplingError(f"seed strategy {strategy} needs a community partition")
    if strategy == "small-community":
        return [v for v in range(net.node_count)
                if connected[v] and part.sizes[part.smallest_community(v)] < cfg.small_threshold]
    return [v for v in range(net.node_count)
            if connected[v] and any(part.sizes[c] > cfg.large_threshold for c in part.memberships[v])]


def select_seeds(net: Network, part: Optional[CommunityPartition], cfg: RdsConfig,
                 rng: np.random.Generator) -> List[int]:
    """
    Draw distinct seeds uniformly from the strategy's pool.

    Sequential-restart returns only the first seed; later seeds are drawn by
    the simulation when a tree stops.

    Raises:
        SamplingError: If the pool is empty or smaller than the number of seeds
    """
    pool = seed_pool(net, part, cfg)
    if not pool:
        raise SamplingError(f"empty pool: no node qualifies for seed strategy {cfg.seed_strategy}")
    count = 1 if cfg.seed_strategy == "sequential-restart" else cfg.n_seeds
    if count > len(pool):
        raise SamplingError(f"seed pool has {len(pool)} nodes, {count} seeds requested")
    return rng.choice(pool, size=count, replace=False).tolist()


class _Recruitment:
    """Mutable state of one simulation run."""

    def __init__(self, net: Network, cfg: RdsConfig, rng: np.random.Generator):
        self.adjacency = net.adjacency
        self.cfg = cfg
        self.rng = rng
        self.cap = cfg.sample_cap if cfg.sample_cap is not None else net.node_count
        self.joined = np.zeros(net.node_count, dtype=bool)
        self.participants: List[Participant] = []
        self.tree_of: Dict[int, int] = {}
        self.wave_of: Dict[int, int] = {}
        self.queue = EventQueue()
        self.refusals = 0

    @property
    def full(self) -> bool:
        return len(self.participants) >= self.cap

    def admit(self, node: int, recruiter: Optional[int], tree: int, wave: int, time: float) -> None:
        self.joined[node] = True
        self.participants.append(Participant(node, recruiter, tree, wave, time))
        self.tree_of[node] = tree
        self.wave_of[node] = wave
        self.queue.schedule(time + self.rng.exponential(self.cfg.mean_wait), node)

    def distribute(self, time: float, u: int, budget: Optional[int] = None) -> int:
        """
        Process the coupon hand-out of participant ``u``.

        Returns:
            int: Number of contacts that accepted
        """
        joined = self.joined
        eligible = [w for w in self.adjacency[u] if not joined[w]]
        if not eligible:
            return 0
        k = min(self.cfg.coupons, len(eligible))
        accepted = 0
        for idx in self.rng.choice(len(eligible), size=k, replace=False).tolist():
            w = eligible[idx]
            if self.rng.random() < self.cfg.response_rate:
                self.admit(w, u, self.tree_of[u], self.wave_of[u] + 1, time)
                accepted += 1
                if self.full or (budget is not None and accepted >= budget):
                    break
            else:
                self.refusals += 1
        return accepted

    def outcome(self) -> RdsOutcome:
        termination = CAP_REACHED if self.cfg.sample_cap is not None and self.full else EXHAUSTED
        return RdsOutcome(participants=tuple(self.participants), refusal_count=self.refusals,
                          termination=termination)


def _check_seeds(net: Network, seeds: Sequence[int]) -> List[int]:
    seeds = [int(s) for s in seeds]
    if len(set(seeds)) != len(seeds):
        raise SamplingError("seeds must be distinct")
    for s in seeds:
        if not 0 <= s < net.node_count:
            raise SamplingError(f"seed {s} is not a node of the network")
    return seeds


def run_rds(net: Network, cfg: RdsConfig, seeds: Sequence[int], rng: np.random.Generator) -> RdsOutcome:
    """
    Simulate one respondent-driven sampling process.

    Seeds join at t = 0. Coupon hand-outs are processed in time order (ties
    in scheduling order) until no event is left or the sample cap is hit.
    In sequential-restart mode only one tree is active at a time; a tree
    stops after ``per_seed_cap`` successful recruits or when it dies out,
    and a new seed drawn uniformly among non-participants starts at the
    current time.

    Args:
        net: Study network
        cfg: Recruitment parameters
        seeds: Distinct starting nodes (only the first is used in sequential-restart mode)
        rng: Random generator for waiting times, coupon targets and acceptances

    Returns:
        RdsOutcome: Participants in admission order
    """
    seeds = _check_seeds(net, seeds)
    state = _Recruitment(net, cfg, rng)
    if cfg.seed_strategy == "sequential-restart":
        _run_sequential(net, state, seeds[:1])
    else:
        for tree, s in enumerate(seeds):
            if state.full:
                break
            state.admit(s, None, tree, 0, 0.0)
        while len(state.queue) and not state.full:
            time, u = state.queue.next_event()
            state.distribute(time, u)
    result = state.outcome()
    logger.debug(f"RDS run p={cfg.response_rate}: omega={result.omega}, "
                 f"refusals={result.refusal_count}, {result.termination}")
    return result


def _run_sequential(net: Network, state: _Recruitment, seeds: List[int]) -> None:
    cfg = state.cfg
    connected = net.degrees > 0
    time = 0.0
    tree = 0
    if not seeds:
        return
    state.admit(seeds[0], None, tree, 0, time)
    while not state.full:
        recruits = 0
        while len(state.queue) and not state.full and recruits < cfg.per_seed_cap:
            time, u = state.queue.next_event()
            recruits += state.distribute(time, u, budget=cfg.per_seed_cap - recruits)
        if state.full:
            break
        state.queue.clear()
        candidates = np.flatnonzero(~state.joined & connected)
        if len(candidates) == 0:
            break
        tree += 1
        state.admit(int(candidates[state.rng.integers(len(candidates))]), None, tree, 0, time)


@dataclass(frozen=True)
class TreeStats:
    """
    Per-tree size S_i and depth W_i of an outcome.

    Attributes:
        seeds (tuple): Seed node of each tree
        sizes (tuple): S_i, participants per tree including the seed
        waves (tuple): W_i, maximum wave reached in each tree
        omega (int): Total participants
    """

    seeds: Tuple[int, ...]
    sizes: Tuple[int, ...]
    waves: Tuple[int, ...]
    omega: int


def tree_stats(out: RdsOutcome) -> TreeStats:
    seeds: Dict[int, int] = {}
    sizes: Dict[int, int] = {}
    waves: Dict[int, int] = {}
    for p in out.participants:
        if p.recruiter is None:
            seeds[p.tree] = p.node
        sizes[p.tree] = sizes.get(p.tree, 0) + 1
        waves[p.tree] = max(waves.get(p.tree, 0), p.wave)
    trees = sorted(sizes)
    return TreeStats(
        seeds=tuple(seeds.get(t, -1) for t in trees),
        sizes=tuple(sizes[t] for t in trees),
        waves=tuple(waves[t] for t in trees),
        omega=sum(sizes.values()),
    )


def histogram(values: Sequence[int], bin_size: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Fixed-width histogram starting at zero.

    Returns:
        tuple: (bin start values, counts)
    """
    values = np.asarray(values, dtype=np.int64)
    if len(values) == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    counts = np.bincount(values // bin_size)
    return np.arange(len(counts), dtype=np.int64) * bin_size, counts
