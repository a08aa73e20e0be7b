"""
Utility modules for RDSim: random substreams, file formats and console output.
"""
