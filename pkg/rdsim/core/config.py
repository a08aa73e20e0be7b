"""
Scenario configuration: INI files whose keys mirror the flags of
``rdsim experiment``.

    [scenario]   id, seeds, replication, response-rate grid, output
    [network]    generate a synthetic model or load an edge list
    [infection]  trait placement protocol
    [rds]        recruitment parameters
"""

import configparser
import logging
import os
import re
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Mapping, NamedTuple, Optional, Tuple

from .errors import ConfigError, RdsimError
from .infection import ProtocolSpec
from .netgen import ClusteredSpec, CommunitySpec, DegreeDistributionSpec
from .presets import COMMUNITY_PRESETS, DEGREE_PRESETS, P_GRIDS, REPLICATION_DEFAULTS, TRIANGLE_PRESETS
from .rds import SEED_STRATEGIES, RdsConfig

logger = logging.getLogger("rdsim")

DEFAULT_OUTPUT_DIR = "./rdsim-results"
MODELS = ("configuration", "clustered", "community")
SOURCES = ("generate", "load")


def default_output_dir() -> str:
    return os.environ.get("RDSIM_OUTPUT_DIR", DEFAULT_OUTPUT_DIR)


def _optional_int(text: str) -> Optional[int]:
    if text.strip().lower() in ("", "none", "unlimited"):
        return None
    return int(text)


def _bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _float_list(text: str) -> Tuple[float, ...]:
    if text.strip() in P_GRIDS:
        return P_GRIDS[text.strip()]
    return tuple(float(x) for x in re.split(r"[,\s]+", text.strip()) if x)


def _int_list(text: str) -> Tuple[int, ...]:
    return tuple(int(x) for x in re.split(r"[,\s]+", text.strip()) if x)


class Field(NamedTuple):
    section: str
    key: str
    parse: Callable[[str], Any]
    help: str

    @property
    def name(self) -> str:
        return f"{self.section}.{self.key}"

    @property
    def flag(self) -> str:
        return "--" + self.key.replace("_", "-")


# Key names are unique across sections so each one maps to a single CLI flag.
FIELDS: List[Field] = [
    Field("scenario", "scenario_id", str, "Name of the scenario (output subdirectory)"),
    Field("scenario", "master_seed", int, "Master seed of every random stream"),
    Field("scenario", "networks_per_cell", int, "Networks per response-rate cell"),
    Field("scenario", "sims_per_network", int, "RDS simulations per network"),
    Field("scenario", "p_grid", _float_list, "Response rates (comma list or preset: default, realistic)"),
    Field("scenario", "output_dir", str, "Results directory (default $RDSIM_OUTPUT_DIR)"),
    Field("scenario", "workers", int, "Worker processes (1 = run in this process)"),
    Field("scenario", "convergence_sizes", _int_list, "Sample sizes of the convergence curve"),
    Field("network", "source", str, "generate or load"),
    Field("network", "model", str, "configuration, clustered or community"),
    Field("network", "n", int, "Number of nodes of generated networks"),
    Field("network", "degree_preset", str, "Named degree distribution"),
    Field("network", "exponent", float, "Degree power-law exponent"),
    Field("network", "cutoff_rate", float, "Exponential degree cutoff rate"),
    Field("network", "k_min", int, "Smallest degree"),
    Field("network", "k_max", _optional_int, "Largest degree (default N-1)"),
    Field("network", "triangle_regime", str, "Named triangle regime (many-triangles, few-triangles)"),
    Field("network", "c0", float, "Clustering amplitude"),
    Field("network", "alpha", float, "Clustering decay exponent"),
    Field("network", "beta", float, "Assortativity knob (only 1.0)"),
    Field("network", "community_regime", str, "Named community regime (strong, ..., weak)"),
    Field("network", "size_exponent", float, "Community-size power-law exponent"),
    Field("network", "size_min", int, "Smallest community"),
    Field("network", "size_max", int, "Largest community"),
    Field("network", "mu", float, "Rewiring probability of bridge-node links"),
    Field("network", "n_overlap", int, "Number of bridge nodes"),
    Field("network", "memberships_per_overlap", int, "Communities per bridge node"),
    Field("network", "max_retries", int, "Attempts to obtain a connected community network"),
    Field("network", "edge_list", str, "Edge-list file (source = load)"),
    Field("network", "communities_file", str, "Community-label file (source = load)"),
    Field("infection", "protocol", str, "RI, PI, PRI, SI, BI, SRI or BRI"),
    Field("infection", "prevalence", float, "Fraction of carriers"),
    Field("infection", "noise", float, "Fraction of carriers redistributed (protocol default if unset)"),
    Field("rds", "n_seeds", int, "Seeds per simulation"),
    Field("rds", "coupons", int, "Coupons per participant"),
    Field("rds", "mean_wait", float, "Mean waiting time"),
    Field("rds", "sample_cap", _optional_int, "Stop at this many participants (none = unlimited)"),
    Field("rds", "seed_strategy", str, ", ".join(SEED_STRATEGIES)),
    Field("rds", "per_seed_cap", int, "Recruits per tree in sequential-restart mode"),
    Field("rds", "small_threshold", int, "Small-community threshold"),
    Field("rds", "large_threshold", int, "Large-community threshold"),
    Field("rds", "include_seeds", _bool, "Include seeds in the estimator sample"),
]

FIELDS_BY_NAME = {f.name: f for f in FIELDS}
FIELDS_BY_KEY = {f.key: f for f in FIELDS}


@dataclass(frozen=True)
class NetworkSource:
    """
    Where the networks of a scenario come from.

    Attributes:
        mode (str): ``generate`` or ``load``
        model (str): configuration, clustered or community (generate only)
        n (int): Node count of generated networks
        degree (DegreeDistributionSpec): Degree distribution
        triangles (ClusteredSpec): Clustered-generator parameters
        communities (CommunitySpec): Community-generator parameters
        max_retries (int): Attempts for a connected community network
        edge_list (str): Edge-list path (load only)
        communities_file (str): Optional community-label path (load only)
    """

    mode: str = "generate"
    model: str = "configuration"
    n: int = 10000
    degree: DegreeDistributionSpec = field(default_factory=lambda: DEGREE_PRESETS["standard"])
    triangles: ClusteredSpec = field(default_factory=lambda: TRIANGLE_PRESETS["many-triangles"])
    communities: CommunitySpec = field(default_factory=lambda: COMMUNITY_PRESETS["strong"])
    max_retries: int = 100
    edge_list: Optional[str] = None
    communities_file: Optional[str] = None

    @property
    def has_partition(self) -> bool:
        if self.mode == "load":
            return self.communities_file is not None
        return self.model == "community"


@dataclass(frozen=True)
class ScenarioConfig:
    """
    One experiment: a network source, a protocol, RDS parameters and a
    response-rate grid, replicated networks_per_cell x sims_per_network times.
    """

    scenario_id: str = "scenario"
    network: NetworkSource = field(default_factory=NetworkSource)
    infection: ProtocolSpec = field(default_factory=ProtocolSpec)
    rds: RdsConfig = field(default_factory=lambda: RdsConfig(sample_cap=500))
    networks_per_cell: int = 10
    sims_per_network: int = 50
    p_grid: Tuple[float, ...] = P_GRIDS["default"]
    master_seed: int = 0
    output_dir: str = DEFAULT_OUTPUT_DIR
    workers: int = 1
    convergence_sizes: Tuple[int, ...] = ()

    @property
    def m(self) -> int:
        return self.networks_per_cell * self.sims_per_network

    @property
    def scenario_dir(self) -> str:
        return os.path.join(self.output_dir, self.scenario_id)


def _key_lines(path: str) -> Dict[str, int]:
    """Map ``section.key`` to the 1-based line defining it."""
    lines: Dict[str, int] = {}
    section = ""
    with open(path, "r", encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            stripped = line.strip()
            header = re.match(r"^\[([^\]]+)\]$", stripped)
            if header:
                section = header.group(1).strip().lower()
                lines.setdefault(section, number)
                continue
            entry = re.match(r"^([A-Za-z0-9_\-]+)\s*[=:]", stripped)
            if entry and section:
                lines[f"{section}.{entry.group(1).lower().replace('-', '_')}"] = number
    return lines


def parse_values(raw: Mapping[str, Mapping[str, str]],
                 lines: Optional[Mapping[str, int]] = None) -> Dict[str, Dict[str, Any]]:
    """
    Convert raw string values per section into typed values.

    Raises:
        ConfigError: On unknown sections or keys and unparsable values
    """
    lines = lines or {}
    typed: Dict[str, Dict[str, Any]] = {}
    for section, entries in raw.items():
        if section not in {f.section for f in FIELDS}:
            raise ConfigError(f"unknown section [{section}]", field=section, line=lines.get(section))
        for key, text in entries.items():
            key = key.replace("-", "_")
            name = f"{section}.{key}"
            spec = FIELDS_BY_NAME.get(name)
            if spec is None:
                raise ConfigError("unknown key", field=name, line=lines.get(name))
            try:
                typed.setdefault(section, {})[key] = spec.parse(text)
            except ValueError as e:
                raise ConfigError(f"invalid value {text!r} ({e})", field=name, line=lines.get(name)) from e
    return typed


def _pick(values: Mapping[str, Any], *keys: str) -> Dict[str, Any]:
    return {k: values[k] for k in keys if k in values}


def _preset(table: Mapping[str, Any], name: str, fieldname: str, lines: Mapping[str, int]):
    if name not in table:
        raise ConfigError(f"unknown preset {name!r}; expected one of {', '.join(table)}",
                          field=fieldname, line=lines.get(fieldname))
    return table[name]


def build_scenario(values: Mapping[str, Mapping[str, Any]],
                   lines: Optional[Mapping[str, int]] = None) -> ScenarioConfig:
    """
    Assemble and validate a ScenarioConfig from typed section values.

    Raises:
        ConfigError: Naming ``section.key`` (and the line, when known) of the offending entry
    """
    lines = lines or {}
    scen = dict(values.get("scenario", {}))
    net = dict(values.get("network", {}))
    inf = dict(values.get("infection", {}))
    rds = dict(values.get("rds", {}))

    mode = net.get("source", "generate")
    if mode not in SOURCES:
        raise ConfigError(f"expected one of {', '.join(SOURCES)}", field="network.source",
                          line=lines.get("network.source"))
    model = net.get("model", "configuration")
    if model not in MODELS:
        raise ConfigError(f"expected one of {', '.join(MODELS)}", field="network.model",
                          line=lines.get("network.model"))

    def section_error(section: str, e: Exception) -> ConfigError:
        return ConfigError(str(e), field=section, line=lines.get(section))

    try:
        degree = _preset(DEGREE_PRESETS, net.get("degree_preset", "standard"), "network.degree_preset", lines)
        degree = replace(degree, **_pick(net, "exponent", "cutoff_rate", "k_min", "k_max"))
        triangles = _preset(TRIANGLE_PRESETS, net.get("triangle_regime", "many-triangles"),
                            "network.triangle_regime", lines)
        triangles = replace(triangles, **_pick(net, "c0", "alpha", "beta"))
        communities = _preset(COMMUNITY_PRESETS, net.get("community_regime", "strong"),
                              "network.community_regime", lines)
        communities = replace(communities, **_pick(net, "size_exponent", "size_min", "size_max", "mu",
                                                   "n_overlap", "memberships_per_overlap"))
    except ConfigError:
        raise
    except RdsimError as e:
        raise section_error("network", e) from e

    source = NetworkSource(mode=mode, model=model, n=net.get("n", 10000), degree=degree, triangles=triangles,
                           communities=communities, max_retries=net.get("max_retries", 100),
                           edge_list=net.get("edge_list"), communities_file=net.get("communities_file"))
    if mode == "load" and not source.edge_list:
        raise ConfigError("required when source = load", field="network.edge_list",
                          line=lines.get("network.source"))
    if mode == "generate" and source.n < 2:
        raise ConfigError("need at least two nodes", field="network.n", line=lines.get("network.n"))

    try:
        protocol = ProtocolSpec(kind=inf.get("protocol", "RI"), **_pick(inf, "prevalence", "noise"))
    except RdsimError as e:
        raise section_error("infection", e) from e
    if protocol.needs_partition and not source.has_partition:
        raise ConfigError(f"protocol {protocol.kind} needs community labels",
                          field="infection.protocol", line=lines.get("infection.protocol"))

    try:
        rds_cfg = RdsConfig(**{"sample_cap": 500, **_pick(rds, "n_seeds", "coupons", "mean_wait", "sample_cap",
                                                           "seed_strategy", "per_seed_cap", "small_threshold",
                                                           "large_threshold", "include_seeds")})
    except RdsimError as e:
        raise section_error("rds", e) from e
    if rds_cfg.seed_strategy in ("small-community", "large-community") and not source.has_partition:
        raise ConfigError(f"seed strategy {rds_cfg.seed_strategy} needs community labels",
                          field="rds.seed_strategy", line=lines.get("rds.seed_strategy"))

    replication = REPLICATION_DEFAULTS[mode]
    cfg = ScenarioConfig(
        scenario_id=scen.get("scenario_id", "scenario"),
        network=source,
        infection=protocol,
        rds=rds_cfg,
        networks_per_cell=scen.get("networks_per_cell", replication["networks_per_cell"]),
        sims_per_network=scen.get("sims_per_network", replication["sims_per_network"]),
        p_grid=tuple(scen.get("p_grid", P_GRIDS["default"])),
        master_seed=scen.get("master_seed", 0),
        output_dir=scen.get("output_dir") or default_output_dir(),
        workers=scen.get("workers", 1),
        convergence_sizes=tuple(scen.get("convergence_sizes", ())),
    )
    _validate(cfg, lines)
    return cfg


def _validate(cfg: ScenarioConfig, lines: Mapping[str, int]) -> None:
    def fail(name: str, message: str):
        raise ConfigError(message, field=name, line=lines.get(name))

    if not re.match(r"^[A-Za-z0-9_.\-]+$", cfg.scenario_id):
        fail("scenario.scenario_id", "use letters, digits, '.', '_' or '-' only")
    if cfg.networks_per_cell < 1:
        fail("scenario.networks_per_cell", "must be at least 1")
    if cfg.sims_per_network < 1:
        fail("scenario.sims_per_network", "must be at least 1")
    if cfg.workers < 1:
        fail("scenario.workers", "must be at least 1")
    if not cfg.p_grid:
        fail("scenario.p_grid", "empty response-rate grid")
    if any(not 0.0 <= p <= 1.0 for p in cfg.p_grid):
        fail("scenario.p_grid", "response rates must lie in [0, 1]")
    sizes = cfg.convergence_sizes
    if any(s < 1 for s in sizes) or any(b <= a for a, b in zip(sizes, sizes[1:])):
        fail("scenario.convergence_sizes", "sizes must be positive and strictly ascending")


def read_raw(path: str) -> Tuple[Dict[str, Dict[str, str]], Dict[str, int]]:
    """Raw string values per section and the line of every key."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"malformed config file {path}: {e}") from e
    raw = {s.lower(): dict(parser.items(s)) for s in parser.sections()}
    return raw, _key_lines(path)


def load_config(path: Optional[str] = None,
                overrides: Optional[Mapping[str, Mapping[str, str]]] = None) -> ScenarioConfig:
    """
    Load a scenario file.

    Args:
        path (str, optional): INI file with [scenario], [network], [infection] and [rds] sections
        overrides (dict, optional): Raw values per section that replace those of the file

    Returns:
        ScenarioConfig: Validated configuration

    Raises:
        ConfigError: If the file is missing, malformed or fails validation
    """
    raw: Dict[str, Dict[str, str]] = {}
    lines: Dict[str, int] = {}
    if path:
        logger.info(f"Loading scenario config from {path}")
        raw, lines = read_raw(path)
    for section, entries in (overrides or {}).items():
        for key in entries:
            lines.pop(f"{section}.{key}", None)
        raw.setdefault(section, {}).update(entries)
    return build_scenario(parse_values(raw, lines), lines)


def _format(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (tuple, list)):
        return ", ".join(_format(v) for v in value)
    return str(value)


def config_values(cfg: ScenarioConfig) -> Dict[str, Dict[str, Any]]:
    """Typed section values that rebuild ``cfg`` through ``build_scenario``."""
    src = cfg.network
    network: Dict[str, Any] = {"source": src.mode}
    if src.mode == "generate":
        network.update(model=src.model, n=src.n, exponent=src.degree.exponent,
                       cutoff_rate=src.degree.cutoff_rate, k_min=src.degree.k_min, k_max=src.degree.k_max)
        if src.model == "clustered":
            network.update(c0=src.triangles.c0, alpha=src.triangles.alpha, beta=src.triangles.beta)
        if src.model == "community":
            c = src.communities
            network.update(size_exponent=c.size_exponent, size_min=c.size_min, size_max=c.size_max, mu=c.mu,
                           n_overlap=c.n_overlap, memberships_per_overlap=c.memberships_per_overlap,
                           max_retries=src.max_retries)
    else:
        network["edge_list"] = src.edge_list
        if src.communities_file:
            network["communities_file"] = src.communities_file
    r = cfg.rds
    values = {
        "scenario": {"scenario_id": cfg.scenario_id, "master_seed": cfg.master_seed,
                     "networks_per_cell": cfg.networks_per_cell, "sims_per_network": cfg.sims_per_network,
                     "p_grid": cfg.p_grid, "output_dir": cfg.output_dir, "workers": cfg.workers},
        "network": network,
        "infection": {"protocol": cfg.infection.kind, "prevalence": cfg.infection.prevalence,
                      "noise": cfg.infection.noise},
        "rds": {"n_seeds": r.n_seeds, "coupons": r.coupons, "mean_wait": r.mean_wait, "sample_cap": r.sample_cap,
                "seed_strategy": r.seed_strategy, "per_seed_cap": r.per_seed_cap,
                "small_threshold": r.small_threshold, "large_threshold": r.large_threshold,
                "include_seeds": r.include_seeds},
    }
    if cfg.convergence_sizes:
        values["scenario"]["convergence_sizes"] = cfg.convergence_sizes
    return values


def save_config(cfg: ScenarioConfig, path: str) -> None:
    """Write ``cfg`` as an INI file that ``load_config`` reads back to an equal config."""
    parser = configparser.ConfigParser(interpolation=None)
    for section, entries in config_values(cfg).items():
        parser[section] = {k: _format(v) for k, v in entries.items()}
    with open(path, "w", encoding="utf-8") as f:
        parser.write(f)
    logger.info(f"Saved scenario config to {path}")
