"""
Reproducible random-number substreams for experiments.

Every random draw in an experiment comes from a stream derived from the
master seed and the position of the work item, never from global state:

    (master_seed, network_index)
          ├── topology   network generation and retries
          └── infection  trait placement
    (master_seed, network_index, simulation_index)
          ├── seeds      seed selection
          ├── walk       the recruitment process
          └── srs        matched simple random samples

Simulation streams do not depend on the response-rate, so cells of one
scenario are matched across the response-rate grid.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class NetworkStreams:
    topology: np.random.Generator
    infection: np.random.Generator


@dataclass(frozen=True)
class SimulationStreams:
    seeds: np.random.Generator
    walk: np.random.Generator
    srs: np.random.Generator


def network_streams(master_seed: int, network_index: int) -> NetworkStreams:
    """Independent generators for building and infecting one network."""
    root = np.random.SeedSequence([master_seed, network_index])
    ss_topology, ss_infection = root.spawn(2)
    return NetworkStreams(
        topology=np.random.default_rng(ss_topology),
        infection=np.random.default_rng(ss_infection),
    )


def simulation_streams(master_seed: int, network_index: int, simulation_index: int) -> SimulationStreams:
    """Independent generators for one simulated recruitment on one network."""
    root = np.random.SeedSequence([master_seed, network_index, simulation_index])
    ss_seeds, ss_walk, ss_srs = root.spawn(3)
    return SimulationStreams(
        seeds=np.random.default_rng(ss_seeds),
        walk=np.random.default_rng(ss_walk),
        srs=np.random.default_rng(ss_srs),
    )


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    """Generator for one-off CLI commands."""
    return np.random.default_rng(seed)
