"""
Exception hierarchy for RDSim.
"""


class RdsimError(Exception):
    """Base class for every error raised by RDSim."""


class GraphError(RdsimError, ValueError):
    """Invalid graph input (empty edge list, unknown node, bad file)."""


class GenerationError(RdsimError):
    """A synthetic network could not be generated from the given specs."""


class ProtocolError(RdsimError, ValueError):
    """Invalid infection protocol request."""


class SamplingError(RdsimError, ValueError):
    """Invalid respondent-driven sampling request (e.g. empty seed pool)."""


class EstimationError(RdsimError, ValueError):
    """Estimator called on inputs where it is undefined."""


class SpectralError(RdsimError, RuntimeError):
    """Spectral analysis failed (disconnected input or no convergence)."""


class ConfigError(RdsimError, ValueError):
    """
    Scenario configuration could not be parsed or validated.

    Attributes:
        field (str): ``section.key`` of the offending entry, if known
        line (int): 1-based line number in the config file, if known
    """

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        location = ""
        if field:
            location = f"{field}"
            if line:
                location += f" (line {line})"
            location += ": "
        super().__init__(f"{location}{message}")


class ResultsError(RdsimError, ValueError):
    """A results file could not be read back."""
