"""
Synthetic network generators.

Three structural regimes are covered:

* random wiring of a fixed degree sequence (configuration model),
* triangle-rich networks with a per-degree-class clustering target,
* community-structured networks with overlapping bridge nodes and a
  mixing parameter.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _csgraph_components

from .errors import GenerationError
from .graph import CommunityPartition, Network, connected_components

logger = logging.getLogger("rdsim")

Edge = Tuple[int, int]

# Random edges tried per splice before a leftover stub pair is given up.
SPLICE_TRIES = 256


@dataclass(frozen=True)
class DegreeDistributionSpec:
    """
    Discrete degree distribution P(k) ~ k^-exponent * exp(-cutoff_rate * k) on [k_min, k_max].

    Attributes:
        exponent (float): Power-law exponent (> 1)
        cutoff_rate (float): Rate of the exponential cutoff (>= 0)
        k_min (int): Smallest degree (>= 1)
        k_max (int, optional): Largest degree; defaults to N - 1
    """

    exponent: float = 2.5
    cutoff_rate: float = 0.0001
    k_min: int = 3
    k_max: Optional[int] = None

    def __post_init__(self):
        if self.exponent <= 1:
            raise GenerationError(f"degree exponent must exceed 1, got {self.exponent}")
        if self.cutoff_rate < 0:
            raise GenerationError(f"cutoff rate must be non-negative, got {self.cutoff_rate}")
        if self.k_min < 1:
            raise GenerationError(f"k_min must be at least 1, got {self.k_min}")
        if self.k_max is not None and self.k_max < self.k_min:
            raise GenerationError(f"k_max {self.k_max} is below k_min {self.k_min}")


@dataclass(frozen=True)
class ClusteredSpec:
    """
    Clustering target c(k) = min(1, c0 * k^-alpha); beta is the assortativity knob.

    Only beta = 1.0 (uniform triple selection) is supported.
    """

    c0: float = 0.5
    alpha: float = 0.3
    beta: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.c0 <= 1.0:
            raise GenerationError(f"c0 must lie in [0, 1], got {self.c0}")
        if self.alpha < 0:
            raise GenerationError(f"alpha must be non-negative, got {self.alpha}")
        if self.beta != 1.0:
            raise GenerationError(f"unsupported: beta={self.beta} (only beta = 1.0 is implemented)")


@dataclass(frozen=True)
class CommunitySpec:
    """
    Community-structure parameters.

    Attributes:
        size_exponent (float): Exponent of the community-size power law P(s) ~ s^size_exponent
        size_min (int): Smallest community size
        size_max (int): Largest community size
        mu (float): Probability of rewiring each bridge-node link to another community
        n_overlap (int): Number of bridge nodes
        memberships_per_overlap (int): Communities each bridge node belongs to
    """

    size_exponent: float = -1.0
    size_min: int = 10
    size_max: int = 1000
    mu: float = 0.0
    n_overlap: int = 100
    memberships_per_overlap: int = 5

    def __post_init__(self):
        if self.size_min < 2 or self.size_min > self.size_max:
            raise GenerationError(f"invalid community size range [{self.size_min}, {self.size_max}]")
        if not 0.0 <= self.mu <= 1.0:
            raise GenerationError(f"mu must lie in [0, 1], got {self.mu}")
        if self.n_overlap < 0:
            raise GenerationError(f"n_overlap must be non-negative, got {self.n_overlap}")
        if self.memberships_per_overlap < 1:
            raise GenerationError("memberships_per_overlap must be at least 1")


def round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def degree_pmf(spec: DegreeDistributionSpec, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Normalized degree probabilities for a network of ``n`` nodes.

    Returns:
        tuple: (degree values, probabilities)

    Raises:
        GenerationError: If the support is empty or the weights do not normalize
    """
    k_max = spec.k_max if spec.k_max is not None else n - 1
    if k_max < spec.k_min:
        raise GenerationError(f"unnormalizable degree spec: empty support [{spec.k_min}, {k_max}]")
    ks = np.arange(spec.k_min, k_max + 1, dtype=np.float64)
    weights = ks ** -spec.exponent * np.exp(-spec.cutoff_rate * ks)
    total = weights.sum()
    if not np.isfinite(total) or total <= 0:
        raise GenerationError("unnormalizable degree spec: weights sum to zero")
    return ks.astype(np.int64), weights / total


def sample_degree_sequence(n: int, spec: DegreeDistributionSpec, rng: np.random.Generator) -> np.ndarray:
    """
    Draw ``n`` degrees from ``spec``; an odd total is repaired by adding one
    stub to a uniformly chosen node.
    """
    if n < 2:
        raise GenerationError(f"need at least 2 nodes, got {n}")
    ks, pmf = degree_pmf(spec, n)
    degrees = rng.choice(ks, size=n, p=pmf)
    if degrees.sum() % 2:
        candidates = np.flatnonzero(degrees < n - 1)
        degrees[candidates[rng.integers(len(candidates))]] += 1
    return degrees.astype(np.int64)


def _validate_degrees(degrees: Sequence[int]) -> np.ndarray:
    degrees = np.asarray(degrees, dtype=np.int64)
    n = len(degrees)
    if n == 0:
        raise GenerationError("empty degree sequence")
    if (degrees < 0).any():
        raise GenerationError("negative degree in sequence")
    if degrees.sum() % 2:
        raise GenerationError("degree sum must be even")
    if (degrees >= n).any():
        raise GenerationError(f"degree {int(degrees.max())} not realizable on {n} nodes")
    return degrees


def _pair_rounds(pending: np.ndarray, rng: np.random.Generator, taken: Set[Edge],
                 edges: List[Edge]) -> np.ndarray:
    """Shuffle-and-pair rounds until one adds no edge; returns the unmatched stubs."""
    while len(pending) >= 2:
        pending = rng.permutation(pending)
        rejected: List[int] = []
        added = 0
        for a, b in zip(pending[0::2].tolist(), pending[1::2].tolist()):
            key = (a, b) if a < b else (b, a)
            if a == b or key in taken:
                rejected.append(a)
                rejected.append(b)
                continue
            taken.add(key)
            edges.append(key)
            added += 1
        pending = np.asarray(rejected, dtype=np.int64)
        if added == 0:
            break
    return pending


def _splice(h: int, edges: List[Edge], rng: np.random.Generator, taken: Set[Edge]) -> bool:
    """
    Spend two free stubs of ``h``: replace a random edge (a, b) whose ends are
    both non-neighbours of ``h`` by (h, a) and (h, b). Degrees of a and b are kept.
    """
    for i in rng.integers(len(edges), size=SPLICE_TRIES).tolist():
        a, b = edges[i]
        if h == a or h == b:
            continue
        key_a = (h, a) if h < a else (a, h)
        key_b = (h, b) if h < b else (b, h)
        if key_a in taken or key_b in taken:
            continue
        taken.discard(edges[i])
        taken.add(key_a)
        taken.add(key_b)
        edges[i] = key_a
        edges.append(key_b)
        return True
    return False


def _match_stubs(stubs: np.ndarray, rng: np.random.Generator, taken: Set[Edge]) -> Tuple[List[Edge], int]:
    """
    Pair stubs uniformly at random, rejecting self-loops and edges in ``taken``.

    Rejected stubs are reshuffled and paired again until a round adds no
    edge. Pairs of stubs still left at one node are then spliced into edges
    made by this call (see ``_splice``) and the odd ones out get a last
    pairing round, so a node ends at most one stub short, two when the
    stub count is odd. ``taken`` is updated in place.

    Returns:
        tuple: (new edges as ``(u, v)`` with ``u < v``, number of dropped stubs)
    """
    pending = np.asarray(stubs, dtype=np.int64)
    dropped = 0
    if len(pending) % 2:
        pending = rng.permutation(pending)[1:]
        dropped += 1
    edges: List[Edge] = []
    pending = _pair_rounds(pending, rng, taken, edges)
    if len(pending) and edges:
        nodes, counts = np.unique(pending, return_counts=True)
        rest: List[int] = []
        for h, count in zip(nodes.tolist(), counts.tolist()):
            while count >= 2 and _splice(h, edges, rng, taken):
                count -= 2
            rest.extend([h] * count)
        pending = _pair_rounds(np.asarray(rest, dtype=np.int64), rng, taken, edges)
    return edges, dropped + len(pending)


def _edges_to_network(n: int, edges: List[Edge], info: Dict) -> Network:
    if edges:
        arr = np.asarray(edges, dtype=np.int64)
        return Network.from_edge_arrays(n, arr[:, 0], arr[:, 1], info=info)
    return Network.from_edge_arrays(n, np.empty(0, np.int64), np.empty(0, np.int64), info=info)


def configuration_model(degrees: Sequence[int], rng: np.random.Generator) -> Network:
    """
    Random simple graph with (approximately) the requested degrees.

    Args:
        degrees: Requested degree of each node; the sum must be even
        rng: Random generator

    Returns:
        Network: Realized graph; ``info["dropped_stubs"]`` counts unmatched stubs

    Raises:
        GenerationError: For odd sums or degrees that cannot fit on the node set
    """
    degrees = _validate_degrees(degrees)
    n = len(degrees)
    edges, dropped = _match_stubs(np.repeat(np.arange(n), degrees), rng, set())
    if dropped:
        logger.info(f"Configuration model dropped {dropped} of {int(degrees.sum())} stubs")
    return _edges_to_network(n, edges, {"model": "configuration", "dropped_stubs": dropped})


def triangle_quota(degrees: np.ndarray, spec: ClusteredSpec) -> np.ndarray:
    """
    Deliberate triangles wanted at each node.

    The per-class target is c(k) = min(1, c0 * k^-alpha), giving
    round-half-up(c(k) k (k - 1) / 2) triangles, capped at floor(k / 2)
    since every deliberate triangle consumes two stubs of each corner.
    """
    k = np.asarray(degrees, dtype=np.float64)
    target = np.zeros_like(k)
    mask = k >= 2
    target[mask] = np.minimum(1.0, spec.c0 * k[mask] ** -spec.alpha)
    quota = np.floor(target * k * (k - 1) / 2.0 + 0.5).astype(np.int64)
    return np.minimum(quota, np.asarray(degrees, dtype=np.int64) // 2)


def clustered_network(degrees: Sequence[int], spec: ClusteredSpec, rng: np.random.Generator) -> Network:
    """
    Triangle-rich network on a fixed degree sequence.

    Phase one closes triangles between uniformly drawn triples of nodes that
    still have triangle quota and at least two free stubs, skipping triples
    that already share an edge. The phase ends when fewer than three
    eligible nodes remain or after a run of consecutive rejected draws
    proportional to the eligible pool. Phase two wires the remaining stubs
    by configuration matching.

    Returns:
        Network: ``info["triangles_added"]`` holds deliberate triangles per node
    """
    degrees = _validate_degrees(degrees)
    n = len(degrees)
    quota = triangle_quota(degrees, spec)
    free = degrees.copy()
    made = np.zeros(n, dtype=np.int64)

    pool: List[int] = [v for v in range(n) if quota[v] > 0 and free[v] >= 2]
    position = {v: i for i, v in enumerate(pool)}

    def _retire(v: int) -> None:
        i = position.pop(v)
        last = pool.pop()
        if last != v:
            pool[i] = last
            position[last] = i

    taken: Set[Edge] = set()
    edges: List[Edge] = []
    failures = 0
    while len(pool) >= 3 and failures < 10 * len(pool) + 100:
        i, j, l = rng.choice(len(pool), size=3, replace=False)
        a, b, c = sorted((pool[i], pool[j], pool[l]))
        if (a, b) in taken or (a, c) in taken or (b, c) in taken:
            failures += 1
            continue
        failures = 0
        for key in ((a, b), (a, c), (b, c)):
            taken.add(key)
            edges.append(key)
        for v in (a, b, c):
            free[v] -= 2
            made[v] += 1
            if made[v] >= quota[v] or free[v] < 2:
                _retire(v)

    triangles = len(edges) // 3
    wired, dropped = _match_stubs(np.repeat(np.arange(n), free), rng, taken)
    edges.extend(wired)
    logger.info(f"Clustered network: {triangles} deliberate triangles, {dropped} dropped stubs")
    return _edges_to_network(n, edges, {
        "model": "clustered",
        "c0": spec.c0,
        "alpha": spec.alpha,
        "dropped_stubs": dropped,
        "triangles_added": made,
        "triangle_quota": quota,
    })


def community_size_pmf(spec: CommunitySpec) -> Tuple[np.ndarray, np.ndarray]:
    sizes = np.arange(spec.size_min, spec.size_max + 1, dtype=np.float64)
    weights = sizes ** spec.size_exponent
    return sizes.astype(np.int64), weights / weights.sum()


def draw_community_sizes(demand: int, spec: CommunitySpec, rng: np.random.Generator) -> List[int]:
    """
    Draw community sizes until their total covers ``demand`` member slots,
    then trim so the total equals ``demand`` exactly.
    """
    values, pmf = community_size_pmf(spec)
    sizes: List[int] = []
    total = 0
    while total < demand:
        s = int(rng.choice(values, p=pmf))
        sizes.append(s)
        total += s

    sizes[-1] -= total - demand
    if sizes[-1] < spec.size_min and len(sizes) > 1:
        shortfall = spec.size_min - sizes[-1]
        sizes[-1] = spec.size_min
        for idx in sorted(range(len(sizes) - 1), key=lambda i: -sizes[i]):
            take = min(shortfall, sizes[idx] - spec.size_min)
            sizes[idx] -= take
            shortfall -= take
            if shortfall == 0:
                break
        if shortfall:
            raise GenerationError(f"cannot fit {demand} memberships into communities of size >= {spec.size_min}")
    return sizes


def _assign_memberships(n: int, sizes: List[int], cspec: CommunitySpec,
                        rng: np.random.Generator) -> List[List[int]]:
    """
    Fill the member slots of every community.

    Bridges take ``memberships_per_overlap`` distinct communities drawn in
    proportion to their open slots; every other node takes one of the
    remaining slots uniformly. A full community is never drawn.
    """
    capacity = np.asarray(sizes, dtype=np.int64).copy()
    memberships: List[List[int]] = [[] for _ in range(n)]
    per_bridge = cspec.memberships_per_overlap

    bridges = rng.choice(n, size=cspec.n_overlap, replace=False) if cspec.n_overlap else np.empty(0, np.int64)
    for v in bridges.tolist():
        open_ = int(np.count_nonzero(capacity))
        if open_ < per_bridge:
            raise GenerationError(f"only {open_} open communities for a node needing {per_bridge}")
        picked = rng.choice(len(capacity), size=per_bridge, replace=False, p=capacity / capacity.sum())
        capacity[picked] -= 1
        memberships[v] = picked.tolist()

    is_bridge = np.zeros(n, dtype=bool)
    is_bridge[bridges] = True
    slots = rng.permutation(np.repeat(np.arange(len(capacity)), capacity))
    for v, c in zip(np.flatnonzero(~is_bridge).tolist(), slots.tolist()):
        memberships[v] = [c]
    return memberships


def _stub_shares(degree: int, count: int) -> List[int]:
    # Equal split of a node's degree over its memberships, remainder to the first.
    share, rest = divmod(degree, count)
    return [share + rest] + [share] * (count - 1)


def _community_components(memberships: List[List[int]], degrees: np.ndarray, bridges: List[int],
                          count: int) -> np.ndarray:
    """
    Component label of each community in the graph where a bridge joins the
    communities it holds stubs in. A bridge with fewer stubs than memberships
    only wires its first community and joins nothing.
    """
    rows: List[int] = []
    cols: List[int] = []
    for i, v in enumerate(bridges):
        if degrees[v] < len(memberships[v]):
            continue
        rows.extend([count + i] * len(memberships[v]))
        cols.extend(memberships[v])
    size = count + len(bridges)
    graph = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(size, size))
    _, labels = _csgraph_components(graph, directed=False)
    return labels[:count]


def _link_stranded_communities(memberships: List[List[int]], degrees: np.ndarray, sizes: List[int],
                               rng: np.random.Generator) -> int:
    """
    Move bridge memberships into communities no bridge connects to the rest.

    For each stranded community a bridge of the main group trades one of its
    later memberships for it, and a single-membership node of the stranded
    community moves the other way, so community sizes are unchanged.

    Returns:
        int: Number of memberships moved
    """
    count = len(sizes)
    bridges = [v for v, ms in enumerate(memberships) if len(ms) > 1]
    home = np.array([ms[0] if len(ms) == 1 else -1 for ms in memberships], dtype=np.int64)
    moved = 0
    for _ in range(2 * count):
        labels = _community_components(memberships, degrees, bridges, count)
        main = int(np.argmax(np.bincount(labels, weights=np.asarray(sizes, dtype=np.float64))))
        stranded = np.flatnonzero(labels != main)
        if len(stranded) == 0:
            break
        target = int(stranded[rng.integers(len(stranded))])
        donors = [v for v in bridges
                  if degrees[v] >= len(memberships[v])
                  and labels[memberships[v][0]] == main
                  and target not in memberships[v]]
        residents = np.flatnonzero(home == target)
        if not donors or len(residents) == 0:
            break
        b = donors[int(rng.integers(len(donors)))]
        slot = 1 + int(rng.integers(len(memberships[b]) - 1))
        r = int(residents[rng.integers(len(residents))])
        old = memberships[b][slot]
        memberships[b][slot] = target
        memberships[r] = [old]
        home[r] = old
        moved += 1
    return moved


def _community_attempt(n: int, dspec: DegreeDistributionSpec, cspec: CommunitySpec,
                       rng: np.random.Generator) -> Tuple[Network, CommunityPartition]:
    demand = n + cspec.n_overlap * (cspec.memberships_per_overlap - 1)
    sizes = draw_community_sizes(demand, cspec, rng)
    memberships = _assign_memberships(n, sizes, cspec, rng)
    degrees = sample_degree_sequence(n, dspec, rng)
    relinked = _link_stranded_communities(memberships, degrees, sizes, rng)

    community_stubs: List[List[int]] = [[] for _ in sizes]
    for v, ms in enumerate(memberships):
        for c, share in zip(ms, _stub_shares(int(degrees[v]), len(ms))):
            community_stubs[c].extend([v] * share)

    taken: Set[Edge] = set()
    edge_community: Dict[Edge, int] = {}
    dropped = 0
    for c, stubs in enumerate(community_stubs):
        wired, lost = _match_stubs(np.asarray(stubs, dtype=np.int64), rng, taken)
        dropped += lost
        for key in wired:
            edge_community[key] = c

    partition = CommunityPartition.from_memberships(memberships)
    rewired = 0
    bridge_set = set(partition.overlapping_nodes())
    if cspec.mu > 0 and bridge_set and len(sizes) > 1:
        community_ids = list(range(len(sizes)))
        for key, c in list(edge_community.items()):
            u, v = key
            if u not in bridge_set and v not in bridge_set:
                continue
            if rng.random() >= cspec.mu:
                continue
            near = u if u in bridge_set else v
            others = [x for x in community_ids if x != c]
            target_c = others[int(rng.integers(len(others)))]
            members = partition.members(target_c)
            w = members[int(rng.integers(len(members)))]
            new_key = (near, w) if near < w else (w, near)
            if w == near or new_key in taken:
                continue
            taken.discard(key)
            del edge_community[key]
            taken.add(new_key)
            edge_community[new_key] = target_c
            rewired += 1

    net = _edges_to_network(n, sorted(edge_community), {
        "model": "community",
        "mu": cspec.mu,
        "n_overlap": cspec.n_overlap,
        "communities": len(sizes),
        "dropped_stubs": dropped,
        "relinked": relinked,
        "rewired": rewired,
    })
    return net, partition


def community_network(n: int, dspec: DegreeDistributionSpec, cspec: CommunitySpec,
                      rng: np.random.Generator, max_retries: int = 100) -> Tuple[Network, CommunityPartition]:
    """
    Connected network with overlapping community structure.

    Community sizes follow a power law on [size_min, size_max]. Member slots
    are filled in proportion to the room left in each community, bridges
    first, and degrees are drawn afterwards, independently of the community.
    Communities no bridge connects to the rest receive a membership moved in
    from a connected bridge. Bridge nodes split their degree evenly across
    their communities, links are wired inside communities, and each
    bridge-node link is rewired with probability ``mu`` to a random node of
    another community. Attempts are repeated on fresh substreams until the
    network is connected.

    Args:
        n: Number of nodes
        dspec: Degree distribution
        cspec: Community structure parameters
        rng: Random generator; each attempt uses a spawned child stream
        max_retries: Maximum number of attempts

    Returns:
        tuple: (Network, CommunityPartition)

    Raises:
        GenerationError: If no connected network is produced within ``max_retries`` attempts
    """
    if cspec.n_overlap > n:
        raise GenerationError(f"n_overlap {cspec.n_overlap} exceeds node count {n}")
    for attempt in range(max_retries):
        child = rng.spawn(1)[0]
        net, partition = _community_attempt(n, dspec, cspec, child)
        components = connected_components(net)
        if len(components) == 1:
            info = dict(net.info, attempts=attempt + 1)
            logger.info(f"Community network: {partition.community_count} communities, "
                        f"{net.edge_count} edges after {attempt + 1} attempt(s)")
            return Network(net.indptr, net.indices, net.labels, info), partition
        logger.info(f"Community network attempt {attempt + 1} has {len(components)} components; retrying")
    raise GenerationError(f"infeasible: no connected community network after {max_retries} attempts")
