"""
Spectral diagnostics of the random walk that drives recruitment.

The walk evolves by dp/dt = A D^-1 p - p, so its relaxation rate is the
smallest non-zero eigenvalue lambda2 of L = I - A D^-1. L is similar to
I - D^-1/2 A D^-1/2, which is symmetric and is what gets diagonalized.
"""

import logging
from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import SpectralError
from .graph import Network, connected_components

logger = logging.getLogger("rdsim")

BOUND_LABEL = "bound (single-coupon heuristic)"

# Stationary eigenvalue 1 is shifted to 1 - DEFLATION_SHIFT = -2
DEFLATION_SHIFT = 3.0


@dataclass(frozen=True)
class SpectralReport:
    """
    Spectral gap of the walk Laplacian and derived quantities.

    Attributes:
        lambda2 (float): Smallest non-zero eigenvalue of I - A D^-1
        mixing_time (float): 1 / lambda2
        p_min_bound (float): clamp(1 - lambda2, 0, 1)
        iterations (int): Operator applications used by the eigensolver
        residual (float): Norm of the eigenpair residual
        label (str): Nature of the response-rate bound
    """

    lambda2: float
    mixing_time: float
    p_min_bound: float
    iterations: int
    residual: float
    label: str = BOUND_LABEL

    def as_dict(self) -> dict:
        return asdict(self)


def mixing_time(lambda2: float) -> float:
    """Relaxation time scale 1 / lambda2."""
    if lambda2 <= 0:
        raise SpectralError(f"mixing time needs a positive lambda2, got {lambda2}")
    return 1.0 / lambda2


def min_response_rate_bound(lambda2: float) -> float:
    """Response rate p above which 1 - p < lambda2 holds, clamped to [0, 1]."""
    return float(min(1.0, max(0.0, 1.0 - lambda2)))


def _normalized_adjacency(net: Network) -> sp.csr_matrix:
    inv_sqrt = 1.0 / np.sqrt(net.degrees.astype(float))
    scale = sp.diags(inv_sqrt)
    return (scale @ net.to_sparse() @ scale).tocsr()


def _dense_lambda2(net: Network):
    s = _normalized_adjacency(net).toarray()
    values, vectors = np.linalg.eigh(s)
    mu2, x = values[-2], vectors[:, -2]
    residual = float(np.linalg.norm(s @ x - mu2 * x))
    return 1.0 - float(mu2), 0, residual


def walk_laplacian_lambda2(net: Network, tol: float = 1e-10, max_iter: int = 100000) -> SpectralReport:
    """
    Compute lambda2 of the walk Laplacian with implicitly restarted Lanczos.

    The symmetrized operator D^-1/2 A D^-1/2 has the known top eigenvector
    sqrt(k) / |sqrt(k)|, which is deflated so that the largest remaining
    eigenvalue is 1 - lambda2.

    Args:
        net: Connected study network
        tol: Convergence tolerance of the eigensolver
        max_iter: Maximum number of Lanczos restarts

    Returns:
        SpectralReport: lambda2 with mixing time and response-rate bound

    Raises:
        SpectralError: If the network is disconnected or the solver does not converge
    """
    components = connected_components(net)
    if len(components) > 1:
        sizes = ", ".join(str(len(c)) for c in components[:10])
        more = f" (+{len(components) - 10} more)" if len(components) > 10 else ""
        raise SpectralError(f"disconnected network: {len(components)} components of sizes {sizes}{more}")
    n = net.node_count
    if n < 2:
        raise SpectralError("lambda2 needs at least two nodes")

    if n < 4:
        lambda2, iterations, residual = _dense_lambda2(net)
    else:
        s = _normalized_adjacency(net)
        v1 = np.sqrt(net.degrees.astype(float))
        v1 /= np.linalg.norm(v1)
        calls = [0]

        def matvec(x):
            calls[0] += 1
            x = np.ravel(x)
            return s @ x - DEFLATION_SHIFT * v1 * (v1 @ x)

        op = spla.LinearOperator((n, n), matvec=matvec, dtype=float)
        v0 = np.random.default_rng(0).uniform(-1.0, 1.0, n)
        try:
            values, vectors = spla.eigsh(op, k=1, which="LA", tol=tol, maxiter=max_iter, v0=v0)
        except spla.ArpackNoConvergence as e:
            raise SpectralError(f"eigensolver did not converge after {calls[0]} operator applications") from e
        mu2, x = float(values[0]), vectors[:, 0]
        residual = float(np.linalg.norm(matvec(x) - mu2 * x))
        lambda2, iterations = 1.0 - mu2, calls[0] - 1

    logger.info(f"lambda2={lambda2:.6g} on N={n} after {iterations} operator applications")
    tau = mixing_time(lambda2) if lambda2 > 0 else float("inf")
    return SpectralReport(lambda2=lambda2, mixing_time=tau, p_min_bound=min_response_rate_bound(lambda2),
                          iterations=iterations, residual=residual)
