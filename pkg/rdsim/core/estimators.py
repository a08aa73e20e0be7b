"""
RDSII prevalence estimation and ensemble statistics.
"""

import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import EstimationError
from .graph import Network
from .infection import InfectionAssignment
from .rds import RdsOutcome

logger = logging.getLogger("rdsim")


@dataclass(frozen=True, eq=False)
class SampleView:
    """
    Degrees and trait marks of the sampled participants, in recruitment order.

    Attributes:
        degrees (np.ndarray): Reported (true network) degree of each participant
        infected (np.ndarray): Boolean trait mark of each participant
    """

    degrees: np.ndarray
    infected: np.ndarray

    def __post_init__(self):
        degrees = np.asarray(self.degrees, dtype=float)
        infected = np.asarray(self.infected, dtype=bool)
        if len(degrees) != len(infected):
            raise EstimationError(f"{len(degrees)} degrees but {len(infected)} trait marks")
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "infected", infected)

    def __len__(self) -> int:
        return len(self.degrees)

    def head(self, size: int) -> "SampleView":
        """First ``size`` participants."""
        return SampleView(self.degrees[:size], self.infected[:size])


@dataclass(frozen=True)
class EnsembleStats:
    """
    Aggregate statistics over m estimates of one cell.

    Attributes:
        theta (float): Mean estimate
        sigma (float): Population standard deviation of the estimates
        delta (float): Mean absolute error against the true prevalence
        relative_bias (float): delta divided by the true prevalence
        design_effect (float): Var(RDS) / Var(SRS); NaN when undefined
        m (int): Number of estimates
    """

    theta: float
    sigma: float
    delta: float
    relative_bias: float
    design_effect: float
    m: int


class ConvergencePoint(NamedTuple):
    size: int
    theta: float
    sigma: float
    count: int


def rds2_estimate(s: SampleView) -> float:
    """
    Inverse-degree weighted prevalence: sum of 1/k over carriers divided by
    sum of 1/k over the whole sample.

    Raises:
        EstimationError: If the sample is empty or contains a zero degree
    """
    if len(s) == 0:
        raise EstimationError("empty sample")
    if np.any(s.degrees <= 0):
        raise EstimationError("zero degree in sample")
    weights = 1.0 / s.degrees
    return float(weights[s.infected].sum() / weights.sum())


def aggregate_theta(estimates: Sequence[float]) -> Tuple[float, float]:
    """Mean and population standard deviation of the estimates."""
    values = np.asarray(estimates, dtype=float)
    if len(values) == 0:
        raise EstimationError("empty estimate list")
    return float(values.mean()), float(values.std())


def average_bias(estimates: Sequence[float], true_p: float) -> Tuple[float, float]:
    """
    Mean absolute deviation from the true prevalence and its relative form.

    Returns:
        tuple: (delta, delta / true_p)
    """
    values = np.asarray(estimates, dtype=float)
    if len(values) == 0:
        raise EstimationError("empty estimate list")
    if true_p <= 0:
        raise EstimationError(f"true prevalence must be positive, got {true_p}")
    delta = float(np.abs(values - true_p).mean())
    return delta, delta / true_p


def srs_baseline(net: Network, inf: InfectionAssignment, sizes: Sequence[int],
                 rng: np.random.Generator) -> List[float]:
    """
    One uniform without-replacement sample per requested size; returns the
    raw carrier fraction of each.
    """
    n = net.node_count
    if inf.node_count != n:
        raise EstimationError(f"infection covers {inf.node_count} nodes, network has {n}")
    out = []
    for size in sizes:
        size = int(size)
        if size > n:
            raise EstimationError(f"SRS size {size} exceeds N={n}")
        if size < 1:
            raise EstimationError(f"SRS size must be positive, got {size}")
        picked = rng.choice(n, size=size, replace=False)
        out.append(float(inf.infected[picked].mean()))
    return out


def design_effect(rds_estimates: Sequence[float], srs_estimates: Sequence[float]) -> float:
    """Ratio of population variances Var(RDS) / Var(SRS)."""
    rds = np.asarray(rds_estimates, dtype=float)
    srs = np.asarray(srs_estimates, dtype=float)
    if len(rds) < 2 or len(srs) < 2:
        raise EstimationError("design effect needs at least two estimates on each side")
    srs_var = srs.var()
    if srs_var == 0:
        raise EstimationError("zero SRS variance")
    return float(rds.var() / srs_var)


def sample_view(outcome: RdsOutcome, net: Network, inf: InfectionAssignment,
                include_seeds: bool = True) -> SampleView:
    """Build the estimator input from a recruitment outcome."""
    nodes = np.asarray([p.node for p in outcome.participants
                        if include_seeds or p.recruiter is not None], dtype=np.int64)
    return SampleView(degrees=net.degrees[nodes], infected=inf.infected[nodes])


def ensemble_stats(rds_estimates: Sequence[float], srs_estimates: Sequence[float],
                   true_p: float) -> EnsembleStats:
    theta, sigma = aggregate_theta(rds_estimates)
    delta, relative = average_bias(rds_estimates, true_p)
    try:
        de = design_effect(rds_estimates, srs_estimates)
    except EstimationError as e:
        logger.debug(f"Design effect undefined: {e}")
        de = float("nan")
    return EnsembleStats(theta=theta, sigma=sigma, delta=delta, relative_bias=relative,
                         design_effect=de, m=len(rds_estimates))


def convergence_curve(outcomes: Sequence[RdsOutcome], net: Network, inf: InfectionAssignment,
                      sizes: Sequence[int], include_seeds: bool = True) -> List[ConvergencePoint]:
    """
    Estimates on the first S participants for each sample size S.

    Only outcomes that reached S participants contribute; an empty stratum
    is reported with count 0 and NaN statistics.
    """
    sizes = [int(s) for s in sizes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise EstimationError("convergence sizes must be strictly ascending")
    views = [sample_view(o, net, inf, include_seeds) for o in outcomes]
    return curve_from_prefixes([prefix_estimates(v, sizes) for v in views], sizes)


def prefix_estimates(view: SampleView, sizes: Sequence[int]) -> List[Optional[float]]:
    """Estimate on the first S participants for each S; None where the sample is shorter."""
    return [rds2_estimate(view.head(size)) if len(view) >= size else None for size in sizes]


def curve_from_prefixes(prefixes: Sequence[Sequence[Optional[float]]],
                        sizes: Sequence[int]) -> List[ConvergencePoint]:
    """Aggregate per-outcome prefix estimates into one convergence point per size."""
    points = []
    for i, size in enumerate(sizes):
        estimates = [row[i] for row in prefixes if row[i] is not None]
        if estimates:
            theta, sigma = aggregate_theta(estimates)
        else:
            theta, sigma = float("nan"), float("nan")
        points.append(ConvergencePoint(int(size), theta, sigma, len(estimates)))
    return points


def degree_coverage(view: SampleView, net: Network) -> float:
    """
    Mean inverse degree of the sample relative to that of the connected
    population; values below 1 mean low-degree nodes are under-sampled.
    """
    if len(view) == 0:
        raise EstimationError("empty sample")
    population = net.degrees[net.degrees > 0].astype(float)
    return float((1.0 / view.degrees).mean() / (1.0 / population).mean())
