import functools

import numpy as np
import pytest

from rdsim.core.errors import SamplingError
from rdsim.core.graph import CommunityPartition, Network, build_network
from rdsim.core.netgen import DegreeDistributionSpec, community_network, configuration_model, sample_degree_sequence
from rdsim.core.presets import COMMUNITY_PRESETS
from rdsim.core.rds import (
    CAP_REACHED,
    EXHAUSTED,
    EventQueue,
    Participant,
    RdsConfig,
    RdsOutcome,
    histogram,
    run_rds,
    seed_pool,
    select_seeds,
    tree_stats,
)


def check_outcome(out: RdsOutcome):
    nodes = out.nodes()
    assert len(nodes) == len(set(nodes))
    by_node = {p.node: p for p in out.participants}
    times = [p.time for p in out.participants]
    assert all(a <= b for a, b in zip(times, times[1:]))
    for p in out.participants:
        if p.recruiter is None:
            assert p.wave == 0
        else:
            parent = by_node[p.recruiter]
            assert p.wave == parent.wave + 1
            assert p.tree == parent.tree
            assert p.time >= parent.time


@pytest.mark.parametrize("kwargs", [
    {"response_rate": 1.5},
    {"response_rate": -0.1},
    {"n_seeds": 0},
    {"coupons": 0},
    {"mean_wait": 0},
    {"sample_cap": 0},
    {"seed_strategy": "random-walk"},
])
def test_config_validation(kwargs):
    with pytest.raises(SamplingError):
        RdsConfig(**kwargs)


def test_event_queue_breaks_ties_by_insertion():
    q = EventQueue()
    q.schedule(2.0, 7)
    q.schedule(1.0, 5)
    q.schedule(1.0, 3)
    assert [q.next_event() for _ in range(3)] == [(1.0, 5), (1.0, 3), (2.0, 7)]
    assert len(q) == 0


def test_zero_response_rate_keeps_only_seeds(config_net, rng):
    cfg = RdsConfig(response_rate=0.0)
    seeds = select_seeds(config_net, None, cfg, rng)
    out = run_rds(config_net, cfg, seeds, rng)
    assert out.omega == 10
    assert out.refusal_count > 0
    assert out.termination == EXHAUSTED
    stats = tree_stats(out)
    assert stats.sizes == (1,) * 10
    assert stats.waves == (0,) * 10
    assert stats.omega == 10


def test_path_graph_recruits_both_neighbors(path3, rng):
    out = run_rds(path3, RdsConfig(response_rate=1.0), [1], rng)
    assert out.omega == 3
    assert out.participants[0] == Participant(1, None, 0, 0, 0.0)
    assert {p.node for p in out.participants[1:]} == {0, 2}
    assert all(p.recruiter == 1 and p.wave == 1 for p in out.participants[1:])
    assert out.participants[1].time == out.participants[2].time > 0
    assert tree_stats(out).waves == (1,)


@pytest.mark.parametrize("p", [0.3, 0.6, 1.0])
def test_sampling_without_replacement(config_net, p):
    rng = np.random.default_rng(11)
    cfg = RdsConfig(response_rate=p)
    out = run_rds(config_net, cfg, select_seeds(config_net, None, cfg, rng), rng)
    check_outcome(out)
    assert tree_stats(out).omega == out.omega


def test_cap_is_enforced_per_acceptance(config_net, rng):
    cfg = RdsConfig(response_rate=1.0, sample_cap=50)
    out = run_rds(config_net, cfg, select_seeds(config_net, None, cfg, rng), rng)
    assert out.omega == 50
    assert out.termination == CAP_REACHED
    check_outcome(out)


def test_cap_below_seed_count(config_net, rng):
    cfg = RdsConfig(response_rate=1.0, sample_cap=4)
    out = run_rds(config_net, cfg, list(range(10)), rng)
    assert out.omega == 4
    assert out.termination == CAP_REACHED


def test_full_response_exhausts_the_component(config_net, rng):
    cfg = RdsConfig(response_rate=1.0)
    out = run_rds(config_net, cfg, select_seeds(config_net, None, cfg, rng), rng)
    assert out.termination == EXHAUSTED
    assert out.omega > 0.5 * config_net.node_count


def test_simulation_is_deterministic(config_net):
    cfg = RdsConfig(response_rate=0.7, sample_cap=300)
    a = run_rds(config_net, cfg, [3, 4, 5], np.random.default_rng(8))
    b = run_rds(config_net, cfg, [3, 4, 5], np.random.default_rng(8))
    assert a.participants == b.participants
    assert a.refusal_count == b.refusal_count


def test_invalid_seeds(path3, rng):
    with pytest.raises(SamplingError):
        run_rds(path3, RdsConfig(), [0, 0], rng)
    with pytest.raises(SamplingError):
        run_rds(path3, RdsConfig(), [5], rng)


def test_uniform_seeds_are_distinct(config_net, rng):
    seeds = select_seeds(config_net, None, RdsConfig(), rng)
    assert len(seeds) == 10
    assert len(set(seeds)) == 10


def test_isolated_nodes_are_never_seeds():
    net = Network.from_edge_arrays(6, np.array([0, 1]), np.array([1, 2]))
    pool = seed_pool(net, None, RdsConfig())
    assert pool == [0, 1, 2]
    with pytest.raises(SamplingError):
        select_seeds(net, None, RdsConfig(n_seeds=4), np.random.default_rng(0))


def test_small_community_pool_can_be_empty(path10, rng):
    part = CommunityPartition.from_memberships([[0]] * 10)
    with pytest.raises(SamplingError, match="empty pool"):
        select_seeds(path10, part, RdsConfig(seed_strategy="small-community", small_threshold=5), rng)


def test_strategy_pools_match_a_direct_filter(rng):
    edges = [(i, (i + 1) % 50) for i in range(50)] + [(i, (i + 7) % 50) for i in range(50)]
    net = build_network(edges)
    memberships = [[int(x) for x in rng.choice(6, size=1 + (v % 3 == 0), replace=False)] for v in range(50)]
    part = CommunityPartition.from_memberships(memberships)
    small = RdsConfig(seed_strategy="small-community", small_threshold=9)
    large = RdsConfig(seed_strategy="large-community", large_threshold=10)

    expected_small = [v for v in range(50) if min(part.sizes[c] for c in memberships[v]) < 9]
    expected_large = [v for v in range(50) if max(part.sizes[c] for c in memberships[v]) > 10]
    assert seed_pool(net, part, small) == expected_small
    assert seed_pool(net, part, large) == expected_large


def test_community_strategy_needs_partition(path10, rng):
    with pytest.raises(SamplingError):
        select_seeds(path10, None, RdsConfig(seed_strategy="large-community"), rng)


def test_sequential_restart_caps_each_tree(config_net, rng):
    cfg = RdsConfig(response_rate=1.0, sample_cap=40, seed_strategy="sequential-restart", per_seed_cap=5)
    seeds = select_seeds(config_net, None, cfg, rng)
    assert len(seeds) == 1
    out = run_rds(config_net, cfg, seeds, rng)
    check_outcome(out)
    assert out.omega == 40
    stats = tree_stats(out)
    assert max(stats.sizes) <= 6
    assert len(stats.sizes) >= 7
    starts = [p.time for p in out.participants if p.recruiter is None]
    assert all(a <= b for a, b in zip(starts, starts[1:]))


def test_sequential_restart_with_no_response(config_net, rng):
    cfg = RdsConfig(response_rate=0.0, sample_cap=12, seed_strategy="sequential-restart")
    out = run_rds(config_net, cfg, select_seeds(config_net, None, cfg, rng), rng)
    assert out.omega == 12
    assert tree_stats(out).sizes == (1,) * 12


def test_tree_stats_of_balanced_tree():
    participants = [Participant(0, None, 0, 0, 0.0)]
    participants += [Participant(i, 0, 0, 1, 1.0) for i in (1, 2, 3)]
    participants += [Participant(4 + 3 * (i - 1) + j, i, 0, 2, 2.0) for i in (1, 2, 3) for j in range(3)]
    stats = tree_stats(RdsOutcome(tuple(participants)))
    assert stats.sizes == (13,)
    assert stats.waves == (2,)
    assert stats.seeds == (0,)
    assert stats.omega == 13


def test_histogram_bins_from_zero():
    starts, counts = histogram([0, 99, 100, 250], 100)
    assert starts.tolist() == [0, 100, 200]
    assert counts.tolist() == [2, 1, 1]
    starts, counts = histogram([], 5)
    assert len(starts) == 0 and len(counts) == 0


@pytest.mark.slow
def test_participation_grows_with_response_rate():
    rng = np.random.default_rng(21)
    degrees = sample_degree_sequence(2000, DegreeDistributionSpec(), rng)
    net = configuration_model(degrees, rng)
    means = []
    for p in (0.2, 0.5, 0.8, 1.0):
        omegas = []
        for rep in range(20):
            sim_rng = np.random.default_rng([21, rep])
            cfg = RdsConfig(response_rate=p)
            omegas.append(run_rds(net, cfg, select_seeds(net, None, cfg, sim_rng), sim_rng).omega)
        means.append(np.mean(omegas))
    assert all(a <= b for a, b in zip(means, means[1:]))


def _recruited_fraction(p, reps=20, n=10000):
    fractions = []
    for rep in range(reps):
        rng = np.random.default_rng([7, rep])
        net = configuration_model(sample_degree_sequence(n, DegreeDistributionSpec(), rng), rng)
        cfg = RdsConfig(response_rate=p)
        fractions.append(run_rds(net, cfg, select_seeds(net, None, cfg, rng), rng).omega / n)
    return float(np.mean(fractions))


@pytest.mark.slow
def test_nearly_everyone_recruited_at_full_response():
    assert _recruited_fraction(1.0) >= 0.95


@pytest.mark.slow
def test_partial_response_recruits_about_eighty_percent():
    assert _recruited_fraction(0.7) == pytest.approx(0.80, abs=0.07)


@pytest.mark.slow
def test_take_off_threshold():
    assert _recruited_fraction(0.30) < 0.05
    assert _recruited_fraction(0.45) > 0.30


@functools.lru_cache(maxsize=None)
def _strong_networks(reps=10, n=10000):
    return tuple(community_network(n, DegreeDistributionSpec(), COMMUNITY_PRESETS["strong"],
                                   np.random.default_rng([9, rep]))[0] for rep in range(reps))


def _community_fraction(p):
    fractions = []
    for rep, net in enumerate(_strong_networks()):
        rng = np.random.default_rng([10, rep])
        n = net.node_count
        cfg = RdsConfig(response_rate=p)
        fractions.append(run_rds(net, cfg, select_seeds(net, None, cfg, rng), rng).omega / n)
    return float(np.mean(fractions))


@pytest.mark.slow
def test_strong_communities_limit_recruitment():
    assert 0.78 <= _community_fraction(1.0) <= 0.92
    assert _community_fraction(0.40) < 0.10
