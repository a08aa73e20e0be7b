"""
Core modules for RDSim: graphs, generators, trait placement, RDS simulation,
estimators, spectral diagnostics and the experiment harness.
"""
