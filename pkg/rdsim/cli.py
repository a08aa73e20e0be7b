#!/usr/bin/env python
"""
Command-line interface for RDSim.
"""

import argparse
import logging
import os
import sys
import traceback
from dataclasses import replace
from typing import Any, Dict, List, Optional

import pandas as pd
from dotenv import load_dotenv

from .core.config import FIELDS, FIELDS_BY_KEY, default_output_dir, load_config, save_config
from .core.errors import ConfigError, RdsimError
from .core.estimators import ensemble_stats, rds2_estimate, sample_view, srs_baseline
from .core.experiment import ExperimentRunner, summarize
from .core.graph import largest_component, network_summary
from .core.infection import PROTOCOLS, ProtocolSpec, place_infection
from .core.netgen import clustered_network, community_network, configuration_model, sample_degree_sequence
from .core.presets import COMMUNITY_PRESETS, DEGREE_PRESETS, TRIANGLE_PRESETS
from .core.rds import SEED_STRATEGIES, RdsConfig, run_rds, select_seeds, tree_stats
from .core.spectral import walk_laplacian_lambda2
from .utils import io
from .utils.console import console, display_error, display_info, display_success, frame_table, mapping_table
from .utils.rng import make_rng

logger = logging.getLogger("rdsim")

LOG_FILE = "rdsim.log"

DEGREE_KEYS = ("exponent", "cutoff_rate", "k_min", "k_max")
TRIANGLE_KEYS = ("c0", "alpha", "beta")
COMMUNITY_KEYS = ("size_exponent", "size_min", "size_max", "mu", "n_overlap", "memberships_per_overlap")


def setup_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(LOG_FILE),
            logging.StreamHandler()
        ]
    )


def _load_network(args):
    net = io.read_edge_list(args.edge_list)
    part = io.read_communities(args.communities, net) if getattr(args, "communities", None) else None
    return net, part


def _given(args, keys) -> Dict[str, Any]:
    return {key: getattr(args, key) for key in keys if getattr(args, key, None) is not None}


def cmd_generate(args) -> int:
    rng = make_rng(args.seed)
    dspec = replace(DEGREE_PRESETS["standard"], **_given(args, DEGREE_KEYS))
    part = None
    if args.model == "community":
        cspec = replace(COMMUNITY_PRESETS[args.community_regime], **_given(args, COMMUNITY_KEYS))
        net, part = community_network(args.n, dspec, cspec, rng, max_retries=args.max_retries)
    else:
        degrees = sample_degree_sequence(args.n, dspec, rng)
        if args.model == "clustered":
            tspec = replace(TRIANGLE_PRESETS[args.triangle_regime], **_given(args, TRIANGLE_KEYS))
            net = clustered_network(degrees, tspec, rng)
        else:
            net = configuration_model(degrees, rng)
    io.write_edge_list(net, args.output)
    if part is not None and args.communities_out:
        io.write_communities(net, part, args.communities_out)
    console.print(mapping_table(f"Generated {args.model} network", network_summary(net, part)))
    display_success(f"Edge list written to {args.output}")
    return 0


def cmd_infect(args) -> int:
    net, part = _load_network(args)
    spec = ProtocolSpec(kind=args.protocol, prevalence=args.prevalence, noise=args.noise)
    inf = place_infection(net, part, spec, make_rng(args.seed))
    io.write_infection(net, inf, args.output)
    display_success(f"{inf.count} of {inf.node_count} nodes carry the trait ({spec.kind}); "
                    f"labels written to {args.output}")
    return 0


def _rds_config(args) -> RdsConfig:
    return RdsConfig(n_seeds=args.n_seeds, coupons=args.coupons, mean_wait=args.mean_wait,
                     response_rate=args.p, sample_cap=args.sample_cap, seed_strategy=args.seed_strategy,
                     per_seed_cap=args.per_seed_cap, small_threshold=args.small_threshold,
                     large_threshold=args.large_threshold, include_seeds=not args.exclude_seeds)


def cmd_simulate(args) -> int:
    net, part = _load_network(args)
    cfg = _rds_config(args)
    rng = make_rng(args.seed)
    seeds = select_seeds(net, part, cfg, rng)
    outcome = run_rds(net, cfg, seeds, rng)
    io.write_outcome(outcome, args.output)
    stats = tree_stats(outcome)
    console.print(mapping_table("Recruitment", {
        "participants": stats.omega,
        "estimator sample": stats.omega if cfg.include_seeds else stats.omega - len(seeds),
        "trees": len(stats.sizes),
        "largest tree": max(stats.sizes),
        "max wave": max(stats.waves),
        "refusals": outcome.refusal_count,
        "termination": outcome.termination,
    }))
    display_success(f"Outcome written to {args.output}")
    return 0


def cmd_estimate(args) -> int:
    net = io.read_edge_list(args.edge_list)
    inf = io.read_infection(args.infection, net)
    rng = make_rng(args.seed)
    estimates, srs = [], []
    for path in args.outcomes:
        view = sample_view(io.read_outcome(path), net, inf, include_seeds=not args.exclude_seeds)
        estimates.append(rds2_estimate(view))
        srs.extend(srs_baseline(net, inf, [len(view)], rng))
    stats = ensemble_stats(estimates, srs, inf.true_prevalence)
    row = pd.DataFrame([vars(stats)])
    if args.output:
        io.write_frame(row, args.output)
    else:
        console.print(row.to_csv(index=False, float_format=io.FLOAT_FORMAT), end="")
    console.print(mapping_table("RDSII ensemble", vars(stats)))
    return 0


def cmd_spectral(args) -> int:
    net = io.read_edge_list(args.edge_list)
    if args.largest_component:
        net = largest_component(net)
    report = walk_laplacian_lambda2(net, tol=args.tol, max_iter=args.max_iter)
    row = pd.DataFrame([report.as_dict()])
    if args.output:
        io.write_frame(row, args.output)
    else:
        console.print(row.to_csv(index=False, float_format=io.FLOAT_FORMAT), end="")
    console.print(mapping_table("Walk Laplacian", report.as_dict()))
    return 0


def _overrides(args) -> Dict[str, Dict[str, str]]:
    out: Dict[str, Dict[str, str]] = {}
    for f in FIELDS:
        value = getattr(args, f.key, None)
        if value is not None:
            out.setdefault(f.section, {})[f.key] = value
    return out


def cmd_experiment(args) -> int:
    cfg = load_config(args.config, overrides=_overrides(args))
    if args.save_config:
        save_config(cfg, args.save_config)
        display_info(f"Scenario saved to {args.save_config}")
    runner = ExperimentRunner(cfg, show_progress=not args.no_progress)
    results = runner.run()
    runner.show_results(results)
    return 0


def cmd_summarize(args) -> int:
    results_dir = args.results_dir or default_output_dir()
    table = summarize(results_dir)
    if args.output:
        io.write_frame(table, args.output)
        display_success(f"Summary of {len(table)} cells written to {args.output}")
    else:
        console.print(frame_table(f"Summary of {results_dir}", table, max_rows=len(table) or 1))
    return 0


def cmd_stats(args) -> int:
    net, part = _load_network(args)
    console.print(mapping_table(f"Network {os.path.basename(args.edge_list)}", network_summary(net, part)))
    return 0


def _add_network_input(parser: argparse.ArgumentParser, communities: bool = True) -> None:
    parser.add_argument("edge_list", help="Edge-list file")
    if communities:
        parser.add_argument("--communities", help="Community-label file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdsim", description="Respondent-driven sampling simulator")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    parser.add_argument("--quiet", action="store_true", help="Warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="Generate a synthetic network")
    p.add_argument("--model", choices=["configuration", "clustered", "community"], default="configuration")
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--triangle-regime", choices=sorted(TRIANGLE_PRESETS), default="many-triangles")
    p.add_argument("--community-regime", choices=list(COMMUNITY_PRESETS), default="strong")
    p.add_argument("--max-retries", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.add_argument("--output", required=True, help="Edge-list file to write")
    p.add_argument("--communities-out", help="Community-label file to write (community model)")
    for key in DEGREE_KEYS + TRIANGLE_KEYS + COMMUNITY_KEYS:
        f = FIELDS_BY_KEY[key]
        p.add_argument(f.flag, dest=f.key, type=f.parse, help=f"{f.help} (overrides the named regime)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("infect", help="Place the study trait on a network")
    _add_network_input(p)
    p.add_argument("--protocol", choices=PROTOCOLS, default="RI", type=str.upper)
    p.add_argument("--prevalence", type=float, default=0.25)
    p.add_argument("--noise", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--output", required=True, help="Infection label file to write")
    p.set_defaults(func=cmd_infect)

    p = sub.add_parser("simulate", help="Simulate one RDS recruitment")
    _add_network_input(p)
    p.add_argument("--p", type=float, default=1.0, help="Response rate")
    p.add_argument("--n-seeds", type=int, default=10)
    p.add_argument("--coupons", type=int, default=3)
    p.add_argument("--mean-wait", type=float, default=5.0)
    p.add_argument("--sample-cap", type=int)
    p.add_argument("--seed-strategy", choices=SEED_STRATEGIES, default="uniform")
    p.add_argument("--per-seed-cap", type=int, default=50)
    p.add_argument("--small-threshold", type=int, default=RdsConfig.small_threshold,
                   help=FIELDS_BY_KEY["small_threshold"].help)
    p.add_argument("--large-threshold", type=int, default=RdsConfig.large_threshold,
                   help=FIELDS_BY_KEY["large_threshold"].help)
    p.add_argument("--exclude-seeds", action="store_true", help="Leave seeds out of the estimator sample")
    p.add_argument("--seed", type=int)
    p.add_argument("--output", required=True, help="Outcome CSV to write")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="RDSII estimates of recorded outcomes")
    _add_network_input(p, communities=False)
    p.add_argument("--infection", required=True, help="Infection label file")
    p.add_argument("outcomes", nargs="+", help="Outcome CSV files")
    p.add_argument("--exclude-seeds", action="store_true")
    p.add_argument("--seed", type=int, help="Seed of the matched SRS baseline")
    p.add_argument("--output", help="One-row CSV to write")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("spectral", help="Spectral gap of the walk Laplacian")
    _add_network_input(p, communities=False)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=100000)
    p.add_argument("--largest-component", action="store_true", help="Analyse the largest component only")
    p.add_argument("--output", help="One-row CSV to write")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("experiment", help="Run a replicated scenario")
    p.add_argument("--config", help="Scenario INI file")
    p.add_argument("--save-config", help="Write the effective scenario to this file")
    p.add_argument("--no-progress", action="store_true")
    for f in FIELDS:
        p.add_argument(f.flag, dest=f.key, help=f"{f.help} [{f.name}]")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("summarize", help="Collect cell results into one table")
    p.add_argument("results_dir", nargs="?", help="Results directory (default $RDSIM_OUTPUT_DIR)")
    p.add_argument("--output", help="CSV to write")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("stats", help="Summary statistics of an edge list")
    _add_network_input(p)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the RDSim CLI."""
    load_dotenv()
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose, args.quiet)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        console.print("\n[yellow]Interrupted.[/yellow]")
        return 130
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        display_error("Configuration error", str(e))
        return 2
    except RdsimError as e:
        logger.error(f"{type(e).__name__}: {e}")
        logger.debug(traceback.format_exc())
        display_error(str(e))
        return 1
    except OSError as e:
        logger.error(f"I/O error: {e}")
        display_error("I/O error", str(e))
        return 1
    except Exception as e:
        logger.error(f"Fatal error: {str(e)}")
        logger.error(traceback.format_exc())
        display_error(f"Unexpected error: {e}", f"Check {LOG_FILE} for more details.")
        return 1


if __name__ == "__main__":
    sys.exit(main())
