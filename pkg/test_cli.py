import pandas as pd
import pytest

from rdsim.cli import build_parser, main


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("RDSIM_OUTPUT_DIR", str(tmp_path / "results"))
    return tmp_path


def test_generate_and_stats(workdir):
    assert main(["generate", "--model", "community", "--n", "1000", "--seed", "1", "--output", "net.txt",
                 "--communities-out", "comm.txt"]) == 0
    assert (workdir / "net.txt").exists()
    assert (workdir / "comm.txt").exists()
    assert main(["stats", "net.txt", "--communities", "comm.txt"]) == 0


def test_pipeline_from_infection_to_estimate(workdir):
    assert main(["generate", "--n", "500", "--seed", "2", "--output", "net.txt"]) == 0
    assert main(["infect", "net.txt", "--protocol", "pri", "--seed", "3", "--output", "inf.txt"]) == 0
    for i in range(3):
        assert main(["simulate", "net.txt", "--p", "0.8", "--sample-cap", "80", "--seed", str(i),
                     "--output", f"run{i}.csv"]) == 0
    assert main(["estimate", "net.txt", "--infection", "inf.txt", "run0.csv", "run1.csv", "run2.csv",
                 "--seed", "4", "--output", "estimate.csv"]) == 0
    row = pd.read_csv(workdir / "estimate.csv")
    assert row.loc[0, "m"] == 3
    assert 0.0 <= row.loc[0, "theta"] <= 1.0


def test_spectral_of_largest_component(workdir):
    (workdir / "edges.txt").write_text("0 1\n1 2\n2 3\n3 0\n0 2\n7 8\n")
    assert main(["spectral", "edges.txt", "--largest-component", "--output", "gap.csv"]) == 0
    row = pd.read_csv(workdir / "gap.csv")
    assert row.loc[0, "lambda2"] > 0
    assert row.loc[0, "label"] == "bound (single-coupon heuristic)"


def test_spectral_of_disconnected_network_fails(workdir):
    (workdir / "edges.txt").write_text("0 1\n2 3\n")
    assert main(["spectral", "edges.txt"]) == 1


def test_experiment_and_summarize(workdir):
    argv = ["experiment", "--no-progress", "--scenario-id", "cli", "--n", "200", "--networks-per-cell", "1",
            "--sims-per-network", "2", "--p-grid", "0.5,1.0", "--sample-cap", "40", "--save-config", "used.ini"]
    assert main(argv) == 0
    assert (workdir / "results" / "cli" / "cells.csv").exists()
    assert "networks_per_cell = 1" in (workdir / "used.ini").read_text()
    assert main(["summarize", "--output", "summary.csv"]) == 0
    assert len(pd.read_csv(workdir / "summary.csv")) == 2


def test_experiment_from_saved_config(workdir):
    (workdir / "s.ini").write_text("[scenario]\nscenario_id = saved\nnetworks_per_cell = 1\n"
                                   "sims_per_network = 1\np_grid = 1.0\n[network]\nn = 150\n")
    assert main(["experiment", "--no-progress", "--config", "s.ini"]) == 0
    assert (workdir / "results" / "saved" / "simulations.csv").exists()


def test_bad_config_exits_with_two(workdir):
    (workdir / "bad.ini").write_text("[rds]\ncoupons = many\n")
    assert main(["experiment", "--no-progress", "--config", "bad.ini"]) == 2


def test_empty_graph_exits_with_one(workdir):
    (workdir / "empty.txt").write_text("# nothing\n")
    assert main(["stats", "empty.txt"]) == 1


def test_missing_file_exits_with_one(workdir):
    assert main(["stats", "missing.txt"]) == 1


def test_every_config_key_has_a_flag():
    parser = build_parser()
    args = parser.parse_args(["experiment", "--mean-wait", "2", "--community-regime", "weak"])
    assert args.mean_wait == "2"
    assert args.community_regime == "weak"


def test_generate_parameter_flags_override_the_regime(workdir):
    args = build_parser().parse_args(["generate", "--output", "x.txt", "--exponent", "3.1", "--k-max", "none",
                                      "--n-overlap", "20", "--mu", "0.2", "--c0", "0.4"])
    assert args.exponent == 3.1
    assert args.k_max is None
    assert args.n_overlap == 20
    assert args.mu == 0.2
    assert args.c0 == 0.4
    assert args.size_min is None

    assert main(["generate", "--model", "community", "--n", "400", "--seed", "5", "--size-min", "20",
                 "--size-max", "80", "--n-overlap", "40", "--memberships-per-overlap", "3",
                 "--output", "net.txt", "--communities-out", "comm.txt"]) == 0
    labels = [line.split() for line in (workdir / "comm.txt").read_text().splitlines()
              if line.strip() and not line.startswith("#")]
    assert len(labels) == 400
    assert sum(len(row) - 1 for row in labels) == 400 + 40 * 2


def test_generate_rejects_invalid_parameters(workdir):
    assert main(["generate", "--n", "200", "--exponent", "0.5", "--output", "net.txt"]) == 1
    assert main(["generate", "--model", "clustered", "--n", "200", "--beta", "0.5", "--output", "net.txt"]) == 1


def test_simulate_threshold_and_seed_flags(workdir):
    args = build_parser().parse_args(["simulate", "net.txt", "--output", "o.csv"])
    assert (args.small_threshold, args.large_threshold, args.exclude_seeds) == (200, 500, False)

    assert main(["generate", "--model", "community", "--n", "400", "--seed", "6", "--size-min", "20",
                 "--size-max", "80", "--n-overlap", "40", "--memberships-per-overlap", "3",
                 "--output", "net.txt", "--communities-out", "comm.txt"]) == 0
    assert main(["simulate", "net.txt", "--communities", "comm.txt", "--seed-strategy", "small-community",
                 "--small-threshold", "81", "--large-threshold", "60", "--exclude-seeds", "--sample-cap", "60",
                 "--seed", "7", "--output", "run.csv"]) == 0
    assert (workdir / "run.csv").exists()
