"""
Replicated RDS experiments over a response-rate grid.

For every network index the runner builds (or loads) one network, places
the trait once, and runs ``sims_per_network`` recruitments for every p of
the grid. Network indices are independent work items; results are
gathered and written by the calling process in index order.
"""

import glob
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn

from ..utils import io
from ..utils.console import console, display_success, display_warning, frame_table
from ..utils.rng import network_streams, simulation_streams
from .config import ScenarioConfig
from .errors import ResultsError
from .estimators import (
    EnsembleStats,
    curve_from_prefixes,
    degree_coverage,
    ensemble_stats,
    prefix_estimates,
    rds2_estimate,
    sample_view,
    srs_baseline,
)
from .graph import CommunityPartition, Network
from .infection import InfectionAssignment, place_infection
from .netgen import clustered_network, community_network, configuration_model, sample_degree_sequence
from .rds import histogram, run_rds, select_seeds, tree_stats

logger = logging.getLogger("rdsim")

TREE_SIZE_BIN = 100
WAVE_BIN = 5

SIMULATION_COLUMNS = ["scenario", "p", "network", "simulation", "omega", "trees", "max_wave", "refusals",
                      "termination", "sample_size", "estimate", "srs_estimate", "true_prevalence",
                      "degree_coverage"]
CELL_COLUMNS = ["scenario", "p", "theta", "sigma", "delta", "relative_bias", "design_effect", "m",
                "mean_omega", "true_prevalence", "trees"]
SUMMARY_COLUMNS = ["scenario", "p", "theta", "sigma", "relative_bias", "design_effect", "mean_omega"]


@dataclass(frozen=True)
class CellResult:
    """
    Aggregated outcome of one (scenario, p) cell.

    Attributes:
        scenario_id (str): Scenario name
        p (float): Response rate
        stats (EnsembleStats): Estimator statistics over the cell's m simulations
        tree_sizes (tuple): Histogram (bin starts, counts) of tree sizes, bin 100
        waves (tuple): Histogram (bin starts, counts) of tree depths, bin 5
        mean_omega (float): Mean number of participants
        true_prevalence (float): Realized prevalence P_A
        convergence (list): ConvergencePoint per configured sample size
    """

    scenario_id: str
    p: float
    stats: EnsembleStats
    tree_sizes: Tuple[np.ndarray, np.ndarray]
    waves: Tuple[np.ndarray, np.ndarray]
    mean_omega: float
    true_prevalence: float
    convergence: Tuple = ()

    @property
    def tree_count(self) -> int:
        return int(self.tree_sizes[1].sum())


def build_population(cfg: ScenarioConfig, network_index: int) -> Tuple[Network, Optional[CommunityPartition],
                                                                       InfectionAssignment]:
    """Network, optional partition and trait placement of one network index."""
    streams = network_streams(cfg.master_seed, network_index)
    src = cfg.network
    part = None
    if src.mode == "load":
        net = io.read_edge_list(src.edge_list)
        if src.communities_file:
            part = io.read_communities(src.communities_file, net)
    elif src.model == "community":
        net, part = community_network(src.n, src.degree, src.communities, streams.topology, src.max_retries)
    else:
        degrees = sample_degree_sequence(src.n, src.degree, streams.topology)
        if src.model == "clustered":
            net = clustered_network(degrees, src.triangles, streams.topology)
        else:
            net = configuration_model(degrees, streams.topology)
    inf = place_infection(net, part, cfg.infection, streams.infection)
    return net, part, inf


def run_network(cfg: ScenarioConfig, network_index: int) -> Dict[float, Dict[str, Any]]:
    """
    All simulations of one network index for every p of the grid.

    Returns:
        dict: p -> rows (per-simulation records), tree sizes, waves and prefix estimates
    """
    net, part, inf = build_population(cfg, network_index)
    out: Dict[float, Dict[str, Any]] = {}
    for p in cfg.p_grid:
        rds_cfg = cfg.rds.with_response_rate(p)
        cell: Dict[str, Any] = {"rows": [], "sizes": [], "waves": [], "prefixes": []}
        for sim in range(cfg.sims_per_network):
            streams = simulation_streams(cfg.master_seed, network_index, sim)
            seeds = select_seeds(net, part, rds_cfg, streams.seeds)
            outcome = run_rds(net, rds_cfg, seeds, streams.walk)
            stats = tree_stats(outcome)
            view = sample_view(outcome, net, inf, rds_cfg.include_seeds)
            if len(view):
                estimate = rds2_estimate(view)
                srs = srs_baseline(net, inf, [len(view)], streams.srs)[0]
                coverage = degree_coverage(view, net)
            else:
                estimate = srs = coverage = float("nan")
            cell["rows"].append({
                "scenario": cfg.scenario_id, "p": p, "network": network_index, "simulation": sim,
                "omega": stats.omega, "trees": len(stats.sizes), "max_wave": max(stats.waves),
                "refusals": outcome.refusal_count, "termination": outcome.termination,
                "sample_size": len(view), "estimate": estimate, "srs_estimate": srs,
                "true_prevalence": inf.true_prevalence, "degree_coverage": coverage,
            })
            cell["sizes"].extend(stats.sizes)
            cell["waves"].extend(stats.waves)
            if cfg.convergence_sizes:
                cell["prefixes"].append(prefix_estimates(view, cfg.convergence_sizes))
        out[p] = cell
    logger.info(f"Network {network_index}: N={net.node_count}, E={net.edge_count}, "
                f"{len(cfg.p_grid)} response rates x {cfg.sims_per_network} simulations")
    return out


def _nan_stats(m: int) -> EnsembleStats:
    nan = float("nan")
    return EnsembleStats(theta=nan, sigma=nan, delta=nan, relative_bias=nan, design_effect=nan, m=m)


def _aggregate(cfg: ScenarioConfig, p: float, parts: Sequence[Dict[str, Any]]) -> CellResult:
    rows = [row for part in parts for row in part["rows"]]
    estimates = [r["estimate"] for r in rows if not math.isnan(r["estimate"])]
    srs = [r["srs_estimate"] for r in rows if not math.isnan(r["srs_estimate"])]
    true_p = float(np.mean([r["true_prevalence"] for r in rows]))
    if estimates:
        stats = ensemble_stats(estimates, srs, true_p)
    else:
        logger.warning(f"{cfg.scenario_id} p={p}: no simulation produced a sample for the estimator")
        stats = _nan_stats(0)
    convergence: Tuple = ()
    if cfg.convergence_sizes:
        prefixes = [row for part in parts for row in part["prefixes"]]
        convergence = tuple(curve_from_prefixes(prefixes, cfg.convergence_sizes))
    return CellResult(
        scenario_id=cfg.scenario_id,
        p=p,
        stats=stats,
        tree_sizes=histogram([s for part in parts for s in part["sizes"]], TREE_SIZE_BIN),
        waves=histogram([w for part in parts for w in part["waves"]], WAVE_BIN),
        mean_omega=float(np.mean([r["omega"] for r in rows])),
        true_prevalence=true_p,
        convergence=convergence,
    )


def cells_frame(results: Sequence[CellResult]) -> pd.DataFrame:
    return pd.DataFrame([{
        "scenario": r.scenario_id, "p": r.p, "theta": r.stats.theta, "sigma": r.stats.sigma,
        "delta": r.stats.delta, "relative_bias": r.stats.relative_bias,
        "design_effect": r.stats.design_effect, "m": r.stats.m, "mean_omega": r.mean_omega,
        "true_prevalence": r.true_prevalence, "trees": r.tree_count,
    } for r in results], columns=CELL_COLUMNS)


def _histogram_frame(results: Sequence[CellResult], attr: str) -> pd.DataFrame:
    rows = []
    for r in results:
        starts, counts = getattr(r, attr)
        rows.extend({"p": r.p, "bin_start": int(b), "count": int(c)} for b, c in zip(starts, counts))
    return pd.DataFrame(rows, columns=["p", "bin_start", "count"])


def write_results(cfg: ScenarioConfig, results: Sequence[CellResult], simulations: pd.DataFrame) -> str:
    """Write every CSV of a scenario; returns the scenario directory."""
    target = cfg.scenario_dir
    os.makedirs(target, exist_ok=True)
    io.write_frame(simulations, os.path.join(target, "simulations.csv"))
    io.write_frame(cells_frame(results), os.path.join(target, "cells.csv"))
    io.write_frame(_histogram_frame(results, "tree_sizes"), os.path.join(target, "tree_sizes.csv"))
    io.write_frame(_histogram_frame(results, "waves"), os.path.join(target, "waves.csv"))
    if cfg.convergence_sizes:
        conv = pd.DataFrame([{"p": r.p, **point._asdict()} for r in results for point in r.convergence],
                            columns=["p", "size", "theta", "sigma", "count"])
        io.write_frame(conv, os.path.join(target, "convergence.csv"))
    logger.info(f"Wrote results of {cfg.scenario_id} to {target}")
    return target


class ExperimentRunner:
    """
    Runs a scenario and reports progress on the console.

    Attributes:
        cfg (ScenarioConfig): Scenario to run
        show_progress (bool): Render a progress bar while networks complete
    """

    def __init__(self, cfg: ScenarioConfig, show_progress: bool = False):
        self.cfg = cfg
        self.show_progress = show_progress
        self.simulations: Optional[pd.DataFrame] = None

    def _collect(self) -> List[Dict[float, Dict[str, Any]]]:
        cfg = self.cfg
        indices = range(cfg.networks_per_cell)
        with Progress(
            SpinnerColumn(),
            TextColumn("[bold cyan]{task.description}"),
            BarColumn(),
            TextColumn("{task.completed}/{task.total} networks"),
            TimeElapsedColumn(),
            console=console,
            disable=not self.show_progress,
        ) as progress:
            task = progress.add_task(f"Running {cfg.scenario_id}", total=len(indices))
            if cfg.workers > 1:
                with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                    parts = []
                    for part in pool.map(run_network, [cfg] * len(indices), indices):
                        parts.append(part)
                        progress.advance(task)
            else:
                parts = []
                for i in indices:
                    parts.append(run_network(cfg, i))
                    progress.advance(task)
        return parts

    def run(self, write: bool = True) -> List[CellResult]:
        """
        Run every cell of the scenario.

        Args:
            write (bool): Write the CSV files under ``output_dir/scenario_id``

        Returns:
            list: One CellResult per response rate, in grid order
        """
        cfg = self.cfg
        logger.info(f"Starting scenario {cfg.scenario_id}: {len(cfg.p_grid)} response rates, "
                    f"{cfg.networks_per_cell} networks x {cfg.sims_per_network} simulations, seed {cfg.master_seed}")
        parts = self._collect()
        results = [_aggregate(cfg, p, [part[p] for part in parts]) for p in cfg.p_grid]
        self.simulations = pd.DataFrame([row for p in cfg.p_grid for part in parts for row in part[p]["rows"]],
                                        columns=SIMULATION_COLUMNS)
        if write:
            write_results(cfg, results, self.simulations)
        return results

    def show_results(self, results: Sequence[CellResult]) -> None:
        frame = cells_frame(results)[SUMMARY_COLUMNS]
        console.print(frame_table(f"Scenario {self.cfg.scenario_id}", frame))
        if any(r.stats.m == 0 for r in results):
            display_warning("Some cells produced no estimator sample (seeds excluded and nobody recruited).")
        display_success(f"Results written to {self.cfg.scenario_dir}")


def run_experiment(cfg: ScenarioConfig, write: bool = True, show_progress: bool = False) -> List[CellResult]:
    """Run a scenario; see ``ExperimentRunner.run``."""
    return ExperimentRunner(cfg, show_progress=show_progress).run(write=write)


def summarize(results_dir: str) -> pd.DataFrame:
    """
    Collect every ``cells.csv`` below ``results_dir`` into one table.

    Returns:
        pd.DataFrame: Columns scenario, p, theta, sigma, relative_bias,
        design_effect, mean_omega sorted by (scenario, p)

    Raises:
        ResultsError: If a cells file lacks the expected columns
    """
    frames = []
    for path in sorted(glob.glob(os.path.join(results_dir, "**", "cells.csv"), recursive=True)):
        try:
            frame = pd.read_csv(path, dtype={"scenario": str})
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise ResultsError(f"malformed CSV {path}: {e}") from e
        missing = [c for c in SUMMARY_COLUMNS if c not in frame.columns]
        if missing:
            raise ResultsError(f"malformed CSV {path}: missing columns {', '.join(missing)}")
        frames.append(frame[SUMMARY_COLUMNS])
    if not frames:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)
    table = pd.concat(frames, ignore_index=True)
    return table.sort_values(["scenario", "p"], kind="mergesort").reset_index(drop=True)
