"""
Shared fixtures for the RDSim test suite.
"""

import numpy as np
import pytest

from rdsim.core.graph import CommunityPartition, build_network
from rdsim.core.netgen import DegreeDistributionSpec, configuration_model, sample_degree_sequence


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow ensemble tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def triangle():
    return build_network([(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def path3():
    return build_network([(0, 1), (1, 2)])


@pytest.fixture
def path10():
    return build_network([(i, i + 1) for i in range(9)])


@pytest.fixture
def ladder_partition():
    """Communities of size 2, 3 and 5 over ten nodes."""
    return CommunityPartition.from_memberships([[0], [0], [1], [1], [1], [2], [2], [2], [2], [2]])


def complete_graph(n, offset=0):
    return [(offset + i, offset + j) for i in range(n) for j in range(i + 1, n)]


@pytest.fixture
def k4():
    return build_network(complete_graph(4))


@pytest.fixture
def two_cliques():
    return build_network(complete_graph(5) + complete_graph(5, offset=5) + [(4, 5)])


@pytest.fixture(scope="module")
def config_net():
    """Configuration-model network on 1000 nodes with the standard degree distribution."""
    rng = np.random.default_rng(2024)
    degrees = sample_degree_sequence(1000, DegreeDistributionSpec(), rng)
    return configuration_model(degrees, rng)
