import pytest

from rdsim.core.config import FIELDS, load_config, save_config
from rdsim.core.errors import ConfigError
from rdsim.core.presets import COMMUNITY_PRESETS, P_GRIDS

SCENARIO = """\
[scenario]
scenario_id = strong-si
master_seed = 7
networks_per_cell = 2
sims_per_network = 3
p_grid = 0.5, 1.0
convergence_sizes = 10, 50

[network]
model = community
n = 500
community_regime = strong
size_min = 20
size_max = 100
n_overlap = 20

[infection]
protocol = SI
prevalence = 0.25

[rds]
sample_cap = 100
include_seeds = false
"""


def write(tmp_path, text, name="scenario.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_scenario_file_is_parsed(tmp_path):
    cfg = load_config(write(tmp_path, SCENARIO))
    assert cfg.scenario_id == "strong-si"
    assert cfg.m == 6
    assert cfg.p_grid == (0.5, 1.0)
    assert cfg.convergence_sizes == (10, 50)
    assert cfg.network.model == "community"
    assert cfg.network.communities.n_overlap == 20
    assert cfg.network.communities.mu == COMMUNITY_PRESETS["strong"].mu
    assert cfg.infection.kind == "SI"
    assert cfg.rds.sample_cap == 100
    assert cfg.rds.include_seeds is False
    assert cfg.rds.coupons == 3


def test_defaults_without_a_file(monkeypatch):
    monkeypatch.delenv("RDSIM_OUTPUT_DIR", raising=False)
    cfg = load_config()
    assert cfg.network.mode == "generate"
    assert cfg.network.model == "configuration"
    assert cfg.networks_per_cell == 10 and cfg.sims_per_network == 50
    assert cfg.rds.sample_cap == 500
    assert cfg.p_grid == P_GRIDS["default"]
    assert cfg.output_dir == "./rdsim-results"


def test_output_dir_from_environment(monkeypatch):
    monkeypatch.setenv("RDSIM_OUTPUT_DIR", "/tmp/elsewhere")
    assert load_config().output_dir == "/tmp/elsewhere"


def test_saved_config_loads_back_equal(tmp_path):
    cfg = load_config(write(tmp_path, SCENARIO))
    out = str(tmp_path / "saved.ini")
    save_config(cfg, out)
    assert load_config(out) == cfg


def test_loaded_networks_use_empirical_replication(tmp_path):
    cfg = load_config(overrides={"network": {"source": "load", "edge_list": "net.txt"}})
    assert cfg.networks_per_cell == 1
    assert cfg.sims_per_network == 500
    assert not cfg.network.has_partition


def test_overrides_replace_file_values(tmp_path):
    cfg = load_config(write(tmp_path, SCENARIO), overrides={"rds": {"sample_cap": "none"}})
    assert cfg.rds.sample_cap is None


def test_invalid_value_reports_key_and_line(tmp_path):
    path = write(tmp_path, "[scenario]\nscenario_id = x\n\n[rds]\ncoupons = three\n")
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.field == "rds.coupons"
    assert info.value.line == 5
    assert str(info.value).startswith("rds.coupons (line 5):")


def test_unknown_key(tmp_path):
    path = write(tmp_path, "[rds]\ncoupon_count = 3\n")
    with pytest.raises(ConfigError, match="unknown key") as info:
        load_config(path)
    assert info.value.line == 2


def test_unknown_section(tmp_path):
    with pytest.raises(ConfigError, match="unknown section"):
        load_config(write(tmp_path, "[plots]\nwidth = 3\n"))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(str(tmp_path / "nope.ini"))


def test_community_protocol_needs_labels(tmp_path):
    path = write(tmp_path, "[network]\nmodel = configuration\n[infection]\nprotocol = BRI\n")
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.field == "infection.protocol"
    assert info.value.line == 4


def test_community_seed_strategy_needs_labels():
    with pytest.raises(ConfigError, match="needs community labels"):
        load_config(overrides={"rds": {"seed_strategy": "small-community"}})


def test_loaded_network_with_labels_allows_community_protocols():
    cfg = load_config(overrides={"network": {"source": "load", "edge_list": "e.txt", "communities_file": "c.txt"},
                                 "infection": {"protocol": "SI"}})
    assert cfg.network.has_partition


@pytest.mark.parametrize("section, key, value", [
    ("scenario", "p_grid", "0.5, 1.2"),
    ("scenario", "networks_per_cell", "0"),
    ("scenario", "scenario_id", "bad id/"),
    ("scenario", "convergence_sizes", "50, 10"),
    ("network", "source", "download"),
    ("network", "model", "lattice"),
    ("network", "beta", "0.5"),
    ("network", "community_regime", "medium"),
    ("infection", "prevalence", "1.5"),
    ("rds", "response_rate", "0.5"),
    ("rds", "mean_wait", "-1"),
])
def test_rejected_values(section, key, value):
    with pytest.raises(ConfigError):
        load_config(overrides={section: {key: value}})


def test_load_source_needs_edge_list():
    with pytest.raises(ConfigError, match="network.edge_list"):
        load_config(overrides={"network": {"source": "load"}})


def test_field_keys_are_unique():
    keys = [f.key for f in FIELDS]
    assert len(keys) == len(set(keys))
