import networkx as nx
import numpy as np
import pytest

from rdsim.core import graph
from rdsim.core.errors import GraphError
from rdsim.core.graph import (
    CommunityPartition,
    build_network,
    connected_components,
    degree,
    degree_assortativity,
    global_clustering,
    inter_community_edges,
    largest_component,
    local_clustering,
    mean_local_clustering,
    network_summary,
    triangle_counts,
)


def test_triangle_is_fully_clustered(triangle):
    assert triangle.node_count == 3
    assert triangle.edge_count == 3
    assert global_clustering(triangle) == 1.0
    assert mean_local_clustering(triangle) == 1.0


def test_star_has_no_clustering():
    star = build_network([(0, i) for i in range(1, 6)])
    assert global_clustering(star) == 0.0
    assert mean_local_clustering(star) == 0.0
    assert degree(star, 0) == 5


def test_duplicates_and_self_loops_are_dropped():
    net = build_network([(0, 1), (1, 0), (1, 1), (1, 2), (2, 1)])
    assert net.edge_count == 2
    assert list(net.edges()) == [(0, 1), (1, 2)]


def test_node_only_in_self_loop_is_dropped():
    net = build_network([(0, 1), (7, 7)])
    assert net.node_count == 2


def test_empty_graph_is_rejected():
    with pytest.raises(GraphError, match="empty graph"):
        build_network([(3, 3)])
    with pytest.raises(GraphError, match="empty graph"):
        build_network([])


def test_negative_id_is_rejected():
    with pytest.raises(GraphError, match="negative"):
        build_network([(0, -1)])


def test_string_tokens_are_remapped_in_sorted_order():
    net = build_network([("b", "a"), ("c", "a")])
    assert net.labels == ("a", "b", "c")
    assert degree(net, 0) == 2
    assert net.label(2) == "c"


def test_edge_order_does_not_change_the_network(rng):
    edges = [(i, (i * 7 + 3) % 40) for i in range(40)] + [(i, i + 1) for i in range(39)]
    a = build_network(edges)
    shuffled = [edges[i] for i in rng.permutation(len(edges))]
    b = build_network([(v, u) for u, v in shuffled])
    assert np.array_equal(a.indptr, b.indptr)
    assert np.array_equal(a.indices, b.indices)


def test_neighbor_slices_are_sorted(config_net):
    for v in range(0, config_net.node_count, 37):
        nbrs = config_net.neighbors(v)
        assert np.all(np.diff(nbrs) > 0)


def test_degree_out_of_range(triangle):
    with pytest.raises(GraphError):
        degree(triangle, 3)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_measures_match_networkx(seed):
    g = nx.gnp_random_graph(80, 0.08, seed=seed)
    g.remove_nodes_from(list(nx.isolates(g)))
    net = build_network(g.edges())
    ids = {label: i for i, label in enumerate(net.labels)}

    assert net.edge_count == g.number_of_edges()
    assert global_clustering(net) == pytest.approx(nx.transitivity(g), abs=1e-12)
    assert mean_local_clustering(net) == pytest.approx(nx.average_clustering(g), abs=1e-12)
    assert degree_assortativity(net) == pytest.approx(nx.degree_assortativity_coefficient(g), abs=1e-9)
    tri = triangle_counts(net)
    for node, count in nx.triangles(g).items():
        assert tri[ids[node]] == count
    assert len(connected_components(net)) == nx.number_connected_components(g)


def test_triangle_counts_on_hub_heavy_graph(monkeypatch):
    monkeypatch.setattr(graph, "TRIANGLE_BLOCK", 37)
    g = nx.barabasi_albert_graph(400, 4, seed=7)
    net = build_network(g.edges())
    ids = {label: i for i, label in enumerate(net.labels)}
    tri = triangle_counts(net)
    assert tri.dtype == np.int64
    for node, count in nx.triangles(g).items():
        assert tri[ids[node]] == count


def test_complete_graph_triangles():
    k6 = [(i, j) for i in range(6) for j in range(i + 1, 6)]
    assert triangle_counts(build_network(k6)).tolist() == [10] * 6


def test_local_clustering_of_pendant_is_zero():
    net = build_network([(0, 1), (1, 2), (2, 0), (2, 3)])
    local = local_clustering(net)
    assert local[3] == 0.0
    assert local[2] == pytest.approx(1 / 3)


def test_regular_graph_assortativity_is_nan(triangle):
    assert np.isnan(degree_assortativity(triangle))


def test_components_are_sorted_by_size():
    net = build_network([(0, 1), (2, 3), (3, 4), (4, 2), (5, 6)])
    comps = connected_components(net)
    assert [len(c) for c in comps] == [3, 2, 2]
    assert comps[1] == {0, 1}


def test_largest_component_keeps_labels():
    net = build_network([("x", "y"), ("p", "q"), ("q", "r")])
    giant = largest_component(net)
    assert giant.node_count == 3
    assert set(giant.labels) == {"p", "q", "r"}
    assert giant.edge_count == 2


def test_summary_reports_raw_and_largest_component():
    net = build_network([(0, 1), (1, 2), (2, 0), (3, 4)])
    summary = network_summary(net)
    assert summary["N"] == 5
    assert summary["E"] == 4
    assert summary["triangles"] == 1
    assert summary["components"] == 2
    assert summary["N_largest_component"] == 3
    assert summary["E_largest_component"] == 3


def test_summary_with_partition(path10, ladder_partition):
    summary = network_summary(path10, ladder_partition)
    assert summary["C"] == 3
    assert summary["C_S"] == 2
    assert summary["C_L"] == 5
    assert summary["inter_community_edges"] == 2


def test_partition_lookups():
    part = CommunityPartition.from_memberships([[0, 1], [0], [1], [1], [2, 0]])
    assert part.sizes == {0: 3, 1: 3, 2: 1}
    assert part.smallest_community(0) == 0
    assert part.largest_community(0) == 0
    assert part.smallest_community(4) == 2
    assert part.largest_community(4) == 0
    assert part.members(1) == (0, 2, 3)
    assert part.overlapping_nodes() == [0, 4]


def test_partition_requires_membership():
    with pytest.raises(GraphError):
        CommunityPartition.from_memberships([[0], []])


def test_inter_community_edges_counts_disjoint_pairs():
    net = build_network([(0, 1), (1, 2), (2, 3)])
    part = CommunityPartition.from_memberships([[0], [0, 1], [1], [2]])
    assert inter_community_edges(net, part) == 1
