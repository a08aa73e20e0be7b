"""
Immutable undirected simple graphs, community partitions and structural metrics.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _csgraph_components

from .errors import GraphError

logger = logging.getLogger("rdsim")

TRIANGLE_BLOCK = 2048


@dataclass(frozen=True, eq=False)
class Network:
    """
    Undirected simple graph with contiguous node ids ``0..N-1``.

    Adjacency is stored in CSR form: the neighbors of ``v`` are
    ``indices[indptr[v]:indptr[v + 1]]``, sorted ascending.

    Attributes:
        indptr (np.ndarray): Row pointer array of length N + 1
        indices (np.ndarray): Concatenated sorted neighbor lists
        labels (tuple): Original node token of each dense id (remap table)
        info (dict): Provenance recorded by the constructor or generator
    """

    indptr: np.ndarray
    indices: np.ndarray
    labels: Tuple[Hashable, ...] = ()
    info: Mapping[str, Any] = field(default_factory=dict)

    @property
    def node_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @cached_property
    def degrees(self) -> np.ndarray:
        """Degree of every node as an int64 array."""
        return np.diff(self.indptr).astype(np.int64)

    @cached_property
    def adjacency(self) -> List[List[int]]:
        """Per-node sorted neighbor lists as plain Python ints (hot loops)."""
        indices = self.indices.tolist()
        bounds = self.indptr.tolist()
        return [indices[bounds[v]:bounds[v + 1]] for v in range(self.node_count)]

    def neighbors(self, v: int) -> np.ndarray:
        _check_node(self, v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Yield every edge once as ``(u, v)`` with ``u < v``."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield u, v

    def edge_array(self) -> np.ndarray:
        """Return an ``(E, 2)`` array of edges with ``u < v``."""
        rows = np.repeat(np.arange(self.node_count), self.degrees)
        mask = rows < self.indices
        return np.column_stack([rows[mask], self.indices[mask]])

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        pos = np.searchsorted(nbrs, v)
        return bool(pos < len(nbrs) and nbrs[pos] == v)

    def to_sparse(self) -> sp.csr_matrix:
        """Adjacency matrix A as a SciPy CSR matrix of float64 ones."""
        n = self.node_count
        data = np.ones(len(self.indices), dtype=np.float64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(n, n))

    def label(self, v: int) -> Hashable:
        """Original token of node ``v`` (the id itself when no table was kept)."""
        return self.labels[v] if self.labels else v

    @classmethod
    def from_edge_arrays(cls, n: int, u: np.ndarray, v: np.ndarray,
                         labels: Sequence[Hashable] = (), info: Optional[Mapping[str, Any]] = None) -> "Network":
        """
        Build a network on ``n`` nodes from endpoint arrays.

        Self-loops and duplicate pairs are dropped. Node ids must already be
        dense in ``0..n-1``; isolated nodes are allowed.
        """
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if len(u) != len(v):
            raise GraphError("endpoint arrays differ in length")
        if len(u) and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
            raise GraphError(f"edge endpoint outside 0..{n - 1}")

        keep = u != v
        lo = np.minimum(u[keep], v[keep])
        hi = np.maximum(u[keep], v[keep])
        pairs = np.unique(lo * n + hi)
        lo, hi = pairs // n, pairs % n

        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(indptr=indptr, indices=cols.astype(np.int64), labels=tuple(labels), info=dict(info or {}))


@dataclass(frozen=True)
class CommunityPartition:
    """
    Possibly overlapping assignment of nodes to communities.

    Attributes:
        memberships (tuple): Per node, the frozenset of community ids it belongs to
        sizes (dict): Community id -> number of member nodes
    """

    memberships: Tuple[FrozenSet[int], ...]
    sizes: Mapping[int, int]

    @classmethod
    def from_memberships(cls, memberships: Iterable[Iterable[int]]) -> "CommunityPartition":
        frozen = tuple(frozenset(int(c) for c in m) for m in memberships)
        sizes: Dict[int, int] = {}
        for v, m in enumerate(frozen):
            if not m:
                raise GraphError(f"node {v} has no community membership")
            for c in m:
                sizes[c] = sizes.get(c, 0) + 1
        return cls(memberships=frozen, sizes=dict(sorted(sizes.items())))

    @property
    def node_count(self) -> int:
        return len(self.memberships)

    @property
    def community_count(self) -> int:
        return len(self.sizes)

    @cached_property
    def _members(self) -> Dict[int, Tuple[int, ...]]:
        members: Dict[int, List[int]] = {c: [] for c in self.sizes}
        for v, m in enumerate(self.memberships):
            for c in m:
                members[c].append(v)
        return {c: tuple(vs) for c, vs in members.items()}

    def members(self, c: int) -> Tuple[int, ...]:
        return self._members[c]

    def smallest_community(self, v: int) -> int:
        """Smallest community of ``v`` (ties broken by lower id)."""
        return min(self.memberships[v], key=lambda c: (self.sizes[c], c))

    def largest_community(self, v: int) -> int:
        """Largest community of ``v`` (ties broken by lower id)."""
        return min(self.memberships[v], key=lambda c: (-self.sizes[c], c))

    def overlapping_nodes(self) -> List[int]:
        return [v for v, m in enumerate(self.memberships) if len(m) > 1]


def _check_node(net: Network, v: int) -> None:
    if not 0 <= v < net.node_count:
        raise GraphError(f"node id {v} out of range 0..{net.node_count - 1}")


def build_network(edges: Iterable[Tuple[Hashable, Hashable]], info: Optional[Mapping[str, Any]] = None) -> Network:
    """
    Build a canonical network from an edge list.

    Self-loops and duplicate pairs are dropped silently. Node tokens are
    remapped to dense ids in sorted token order, so any permutation of the
    same edge list yields the same network. The remap table is kept in
    ``Network.labels``.

    Args:
        edges: Unordered node pairs; integer tokens must be non-negative
        info: Extra provenance to attach to the network

    Returns:
        Network: The canonical simple graph

    Raises:
        GraphError: If the edge list is empty (after dropping self-loops)
            or contains a negative integer id
    """
    pairs = []
    for a, b in edges:
        for token in (a, b):
            if isinstance(token, (int, np.integer)) and token < 0:
                raise GraphError(f"negative node id {token}")
        if a != b:
            pairs.append((a, b))
    if not pairs:
        raise GraphError("empty graph")

    tokens = sorted({t for pair in pairs for t in pair})
    index = {t: i for i, t in enumerate(tokens)}
    u = np.fromiter((index[a] for a, _ in pairs), dtype=np.int64, count=len(pairs))
    v = np.fromiter((index[b] for _, b in pairs), dtype=np.int64, count=len(pairs))
    net = Network.from_edge_arrays(len(tokens), u, v, labels=tokens, info=info)
    logger.debug(f"Built network with {net.node_count} nodes and {net.edge_count} edges")
    return net


def degree(net: Network, v: int) -> int:
    """Number of neighbors of ``v``; raises ``GraphError`` for ids outside the graph."""
    _check_node(net, v)
    return int(net.indptr[v + 1] - net.indptr[v])


def triangle_counts(net: Network) -> np.ndarray:
    """
    Number of triangles through each node.

    Row sums of (A @ A) masked by A count the closed walks of length 3
    through each node, which see every triangle twice. Rows are processed
    in blocks so hubs do not densify the whole product at once.
    """
    n = net.node_count
    a = sp.csr_matrix((np.ones(len(net.indices), dtype=np.int64), net.indices, net.indptr), shape=(n, n))
    closed = np.zeros(n, dtype=np.int64)
    for start in range(0, n, TRIANGLE_BLOCK):
        rows = a[start:start + TRIANGLE_BLOCK]
        closed[start:start + rows.shape[0]] = np.asarray((rows @ a).multiply(rows).sum(axis=1)).ravel()
    return closed // 2


def global_clustering(net: Network) -> float:
    """Transitivity: 3 x triangles / connected triples (0 when there are no triples)."""
    k = net.degrees
    triples = int(np.sum(k * (k - 1) // 2))
    if triples == 0:
        return 0.0
    return int(triangle_counts(net).sum()) / triples


def local_clustering(net: Network) -> np.ndarray:
    """Per-node closure t_v / (k_v (k_v - 1) / 2); nodes of degree < 2 get 0."""
    k = net.degrees
    pairs = k * (k - 1) / 2.0
    t = triangle_counts(net)
    out = np.zeros(net.node_count, dtype=np.float64)
    np.divide(t, pairs, out=out, where=pairs > 0)
    return out


def mean_local_clustering(net: Network) -> float:
    if net.node_count == 0:
        return 0.0
    return float(local_clustering(net).mean())


def connected_components(net: Network) -> List[Set[int]]:
    """
    Connected components as node sets, largest first (ties by lowest node id).
    """
    count, labels = _csgraph_components(net.to_sparse(), directed=False)
    groups: List[Set[int]] = [set() for _ in range(count)]
    for v, c in enumerate(labels.tolist()):
        groups[c].add(v)
    groups.sort(key=lambda g: (-len(g), min(g)))
    return groups


def degree_assortativity(net: Network) -> float:
    """Pearson correlation of endpoint degrees over both orientations of every edge."""
    edges = net.edge_array()
    if len(edges) == 0:
        return float("nan")
    k = net.degrees
    x = np.concatenate([k[edges[:, 0]], k[edges[:, 1]]]).astype(np.float64)
    y = np.concatenate([k[edges[:, 1]], k[edges[:, 0]]]).astype(np.float64)
    if np.std(x) == 0:
        return float("nan")
    return float(np.corrcoef(x, y)[0, 1])


def inter_community_edges(net: Network, part: CommunityPartition) -> int:
    """Number of edges whose endpoints share no community."""
    return sum(1 for u, v in net.edges() if not part.memberships[u] & part.memberships[v])


def induced_subgraph(net: Network, nodes: Iterable[int]) -> Network:
    """Subgraph induced by ``nodes``, relabelled densely in ascending id order."""
    keep = np.array(sorted(set(nodes)), dtype=np.int64)
    remap = np.full(net.node_count, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    edges = net.edge_array()
    inside = (remap[edges[:, 0]] >= 0) & (remap[edges[:, 1]] >= 0)
    sub = edges[inside]
    labels = [net.label(int(v)) for v in keep]
    return Network.from_edge_arrays(len(keep), remap[sub[:, 0]], remap[sub[:, 1]],
                                    labels=labels, info={"parent_nodes": net.node_count})


def largest_component(net: Network) -> Network:
    return induced_subgraph(net, connected_components(net)[0])


def network_summary(net: Network, part: Optional[CommunityPartition] = None) -> Dict[str, Any]:
    """
    Structural summary of a network.

    Reports both clustering definitions, raw counts and the counts restricted
    to the largest component, and the community-size columns when a
    partition is supplied.

    Returns:
        dict: Ordered mapping of statistic name to value
    """
    components = connected_components(net)
    giant = components[0]
    k = net.degrees
    giant_edges = int(k[list(giant)].sum()) // 2
    summary: Dict[str, Any] = {
        "N": net.node_count,
        "E": net.edge_count,
        "mean_degree": float(k.mean()),
        "max_degree": int(k.max()),
        "triangles": int(triangle_counts(net).sum()) // 3,
        "transitivity": global_clustering(net),
        "mean_local_clustering": mean_local_clustering(net),
        "assortativity": degree_assortativity(net),
        "components": len(components),
        "N_largest_component": len(giant),
        "E_largest_component": giant_edges,
    }
    if part is not None:
        sizes = list(part.sizes.values())
        summary.update({
            "C": part.community_count,
            "C_S": min(sizes),
            "C_L": max(sizes),
            "overlapping_nodes": len(part.overlapping_nodes()),
            "inter_community_edges": inter_community_edges(net, part),
        })
    return summary
