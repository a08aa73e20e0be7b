"""
RDSim Package
=============

Synthetic social networks with controllable triangles and communities,
respondent-driven sampling (RDS) simulation, the RDSII prevalence estimator
and spectral bottleneck diagnostics.
"""

__version__ = '1.0'

from .core.errors import (
    ConfigError,
    EstimationError,
    GenerationError,
    GraphError,
    ProtocolError,
    RdsimError,
    ResultsError,
    SamplingError,
    SpectralError,
)
from .core.graph import CommunityPartition, Network, build_network, network_summary
from .core.netgen import (
    ClusteredSpec,
    CommunitySpec,
    DegreeDistributionSpec,
    clustered_network,
    community_network,
    configuration_model,
    sample_degree_sequence,
)
from .core.infection import InfectionAssignment, ProtocolSpec, place_infection
from .core.rds import RdsConfig, RdsOutcome, run_rds, select_seeds, tree_stats
from .core.estimators import EnsembleStats, SampleView, rds2_estimate
from .core.spectral import SpectralReport, walk_laplacian_lambda2
from .core.config import ScenarioConfig, load_config, save_config
from .core.experiment import CellResult, ExperimentRunner, run_experiment, summarize

__all__ = [
    'RdsimError',
    'GraphError',
    'GenerationError',
    'ProtocolError',
    'SamplingError',
    'EstimationError',
    'SpectralError',
    'ConfigError',
    'ResultsError',
    'Network',
    'CommunityPartition',
    'build_network',
    'network_summary',
    'DegreeDistributionSpec',
    'ClusteredSpec',
    'CommunitySpec',
    'sample_degree_sequence',
    'configuration_model',
    'clustered_network',
    'community_network',
    'ProtocolSpec',
    'InfectionAssignment',
    'place_infection',
    'RdsConfig',
    'RdsOutcome',
    'select_seeds',
    'run_rds',
    'tree_stats',
    'SampleView',
    'EnsembleStats',
    'rds2_estimate',
    'SpectralReport',
    'walk_laplacian_lambda2',
    'ScenarioConfig',
    'load_config',
    'save_config',
    'CellResult',
    'ExperimentRunner',
    'run_experiment',
    'summarize',
]
