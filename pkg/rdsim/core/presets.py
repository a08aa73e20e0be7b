"""
Named parameter sets for the structural regimes studied with RDSim.
"""

import numpy as np

from .netgen import ClusteredSpec, CommunitySpec, DegreeDistributionSpec

# Degree distribution shared by every synthetic model (mean degree ~7)
DEGREE_PRESETS = {
    "standard": DegreeDistributionSpec(exponent=2.5, cutoff_rate=0.0001, k_min=3),
}

# Triangle regimes of the clustered generator
TRIANGLE_PRESETS = {
    "many-triangles": ClusteredSpec(c0=0.5, alpha=0.3, beta=1.0),
    "few-triangles": ClusteredSpec(c0=0.5, alpha=1.0, beta=1.0),
}

# Community regimes, strongest to weakest; bridges always sit in 5 communities
COMMUNITY_PRESETS = {
    "strong": CommunitySpec(mu=0.0, n_overlap=100, memberships_per_overlap=5),
    "strong-moderate": CommunitySpec(mu=0.0, n_overlap=1000, memberships_per_overlap=5),
    "moderate-weak": CommunitySpec(mu=0.3, n_overlap=100, memberships_per_overlap=5),
    "weak": CommunitySpec(mu=0.3, n_overlap=1000, memberships_per_overlap=5),
}

# Response-rate grids
P_GRIDS = {
    "default": tuple(round(p, 2) for p in np.arange(0.05, 1.0001, 0.05)),
    "realistic": (0.4, 0.5, 0.6),
}

# Synthetic cells: 10 networks x 50 walks; empirical cells: 1 network x 500 walks
REPLICATION_DEFAULTS = {
    "generate": {"networks_per_cell": 10, "sims_per_network": 50},
    "load": {"networks_per_cell": 1, "sims_per_network": 500},
}
