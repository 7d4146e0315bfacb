"""Run configuration: INI-style ``[section]`` / ``key = value`` files.

Sections: scenario, channel, qos, environment, agent, baselines, run. Every
key is optional; anything left out takes the default shown in
``configs/paper.ini``. Unknown sections or keys are errors.
"""

from __future__ import annotations

import configparser
import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path

from .baselines import AnnealConfig, SmoothOptConfig
from .channel import ChannelParams
from .ddpg import AgentConfig
from .mdp_env import EnvConfig
from .network_eval import QoSParams
from .scenario import AreaConfig, UserDistribution

log = logging.getLogger(__name__)

EXPERIMENTS = ("train", "evaluate", "sweep-density", "compare-distributions")
SOLVERS = ("drl", "anneal", "smooth", "fixed", "oracle")


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name
        self.message = message


@dataclass(frozen=True)
class ScenarioConfig:
    num_users: int = 24
    num_uavs: int = 2
    area: AreaConfig = AreaConfig()
    distribution: UserDistribution = UserDistribution()
    num_slots: int = 100
    warm_start: bool = True
    # where UAVs sit before the first slot (and every slot when warm_start is off)
    initial_layout: str = "center"


@dataclass(frozen=True)
class BaselineConfig:
    solvers: tuple[str, ...] = ("drl", "anneal", "smooth", "fixed")
    fixed_layout: str = "center"
    anneal: AnnealConfig = AnnealConfig()
    smooth: SmoothOptConfig = SmoothOptConfig()
    grid_resolution: int = 41


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioConfig = ScenarioConfig()
    channel: ChannelParams = ChannelParams()
    qos: QoSParams = QoSParams()
    environment: EnvConfig = EnvConfig()
    agent: AgentConfig = AgentConfig()
    baselines: BaselineConfig = BaselineConfig()
    experiment: str = "evaluate"
    out_dir: str = "runs/default"
    seed: int = 0
    # zero every wall-clock column so repeated runs give byte-identical files
    reproducible: bool = False
    k_values: tuple[int, ...] = (4, 8, 16, 24)
    checkpoint: str | None = None


def _bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _ints(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.replace(",", " ").split())


def _words(s: str) -> tuple[str, ...]:
    return tuple(x for x in s.replace(",", " ").split())


def _points(s: str) -> tuple[tuple[float, float], ...]:
    # "x1 y1; x2 y2"
    pts = []
    for chunk in s.split(";"):
        if chunk.strip():
            x, y = (float(v) for v in chunk.replace(",", " ").split())
            pts.append((x, y))
    return tuple(pts)


def _opt_float(s: str):
    return None if s.strip().lower() in ("", "none", "auto") else float(s)


def _opt_str(s: str):
    return None if s.strip().lower() in ("", "none") else s.strip()


# section -> key -> (target path inside RunConfig, parser)
SCHEMA: dict[str, dict[str, tuple[str, object]]] = {
    "scenario": {
        "num_users": ("scenario.num_users", int),
        "num_uavs": ("scenario.num_uavs", int),
        "width_m": ("scenario.area.width_m", float),
        "height_m": ("scenario.area.height_m", float),
        "uav_altitude_m": ("scenario.area.uav_altitude_m", float),
        "distribution": ("scenario.distribution.kind", str),
        "gaussian_centers": ("scenario.distribution.gaussian_centers", _points),
        "gaussian_sigma_m": ("scenario.distribution.gaussian_sigma_m", _opt_float),
        "num_slots": ("scenario.num_slots", int),
        "warm_start": ("scenario.warm_start", _bool),
        "initial_layout": ("scenario.initial_layout", str),
    },
    "channel": {f.name: (f"channel.{f.name}", float) for f in dataclasses.fields(ChannelParams)},
    "qos": {
        "rate_threshold_bpshz": ("qos.rate_threshold_bpshz", float),
        "comm_radius_m": ("qos.comm_radius_m", float),
    },
    "environment": {
        "a_max": ("environment.a_max", float),
        "epochs": ("environment.epochs", int),
        "reward_baseline": ("environment.reward_baseline", str),
        "pretrain": ("environment.pretrain", _bool),
    },
    "agent": {
        "gamma": ("agent.gamma", float),
        "batch_size": ("agent.batch_size", int),
        "sync_period": ("agent.sync_period", int),
        "episodes": ("agent.episodes", int),
        "actor_lr": ("agent.actor_lr", float),
        "critic_lr": ("agent.critic_lr", float),
        "buffer_capacity": ("agent.buffer_capacity", int),
        "hidden_sizes": ("agent.hidden_sizes", _ints),
        "noise_start": ("agent.noise_start", float),
        "noise_end": ("agent.noise_end", float),
        "pretrain_episodes": ("agent.pretrain_episodes", int),
        "reward_scale": ("agent.reward_scale", float),
        "warmup": ("agent.warmup", lambda s: None if s.strip().lower() in ("", "none") else int(s)),
        "normalize_states": ("agent.normalize_states", _bool),
        "updates_per_step": ("agent.updates_per_step", int),
    },
    "baselines": {
        "solvers": ("baselines.solvers", _words),
        "fixed_layout": ("baselines.fixed_layout", str),
        "grid_resolution": ("baselines.grid_resolution", int),
        "anneal_initial_temperature": ("baselines.anneal.initial_temperature", _opt_float),
        "anneal_cooling": ("baselines.anneal.cooling", float),
        "anneal_iterations": ("baselines.anneal.iterations", int),
        "anneal_step_sigma_m": ("baselines.anneal.step_sigma_m", float),
        "smooth_rate_sharpness": ("baselines.smooth.rate_sharpness", float),
        "smooth_dist_sharpness": ("baselines.smooth.dist_sharpness", float),
        "smooth_sharpness_start": ("baselines.smooth.sharpness_start", float),
        "smooth_step_m": ("baselines.smooth.step_m", float),
        "smooth_max_iter": ("baselines.smooth.max_iter", int),
        "smooth_restarts": ("baselines.smooth.restarts", int),
    },
    "run": {
        "experiment": ("experiment", str),
        "out_dir": ("out_dir", str),
        "seed": ("seed", int),
        "reproducible": ("reproducible", _bool),
        "k_values": ("k_values", _ints),
        "checkpoint": ("checkpoint", _opt_str),
    },
}

ALIASES = {("scenario", "k"): "num_users", ("scenario", "p"): "num_uavs"}


def _tree(obj) -> dict:
    """Dataclass -> nested dict of field values (dataclass children stay nested)."""
    out = {}
    for f in dataclasses.fields(obj):
        val = getattr(obj, f.name)
        out[f.name] = _tree(val) if dataclasses.is_dataclass(val) else val
    return out


def _build(cls, values: dict, prefix: str):
    kwargs = {}
    hints = {f.name: f for f in dataclasses.fields(cls)}
    defaults = cls()
    for name, val in values.items():
        child = getattr(defaults, name)
        if isinstance(val, dict) and dataclasses.is_dataclass(child):
            kwargs[name] = _build(type(child), val, f"{prefix}{name}.")
        else:
            kwargs[name] = val
    assert set(kwargs) <= set(hints)
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as exc:
        msg = str(exc)
        field_name = next((n for n in kwargs if msg.startswith(n) or f" {n}" in msg), None)
        raise ConfigError(f"{prefix}{field_name}" if field_name else prefix.rstrip("."), msg) from None


def _set(tree: dict, path: str, value) -> None:
    *parents, leaf = path.split(".")
    node = tree
    for p in parents:
        node = node[p]
    node[leaf] = value


def _get(tree: dict, path: str):
    node = tree
    for p in path.split("."):
        node = node[p]
    return node


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError("file", str(exc).replace("\n", " ")) from None
    tree = _tree(RunConfig())
    given = set()
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(section, f"unknown section [{section}]")
        for key, raw in parser.items(section):
            key = ALIASES.get((section, key), key)
            if key not in SCHEMA[section]:
                raise ConfigError(f"{section}.{key}", "unknown key")
            path, conv = SCHEMA[section][key]
            try:
                value = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{section}.{key}", f"cannot parse {raw!r}: {exc}") from None
            _set(tree, path, value)
            given.add((section, key))
    if tree["scenario"]["distribution"]["kind"] == "uniform":
        for k in ("gaussian_centers", "gaussian_sigma_m"):
            if ("scenario", k) in given:
                raise ConfigError(f"scenario.{k}", "only valid with distribution = gaussian")
    for section, keys in SCHEMA.items():
        for key, (path, _) in keys.items():
            if (section, key) not in given:
                log.info("default %s.%s = %r", section, key, _get(tree, path))
    cfg = _build(RunConfig, tree, "")
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    sc = cfg.scenario
    if sc.num_users < 0:
        raise ConfigError("scenario.num_users", "must be >= 0")
    if sc.num_uavs < 1:
        raise ConfigError("scenario.num_uavs", "must be >= 1")
    if sc.num_slots < 1:
        raise ConfigError("scenario.num_slots", "must be >= 1")
    if sc.initial_layout not in ("center", "corners"):
        raise ConfigError("scenario.initial_layout", "must be center or corners")
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError("run.experiment", f"must be one of {', '.join(EXPERIMENTS)}")
    bad = [s for s in cfg.baselines.solvers if s not in SOLVERS]
    if bad or not cfg.baselines.solvers:
        raise ConfigError("baselines.solvers", f"must be a non-empty subset of {', '.join(SOLVERS)}")
    if cfg.baselines.fixed_layout not in ("center", "corners"):
        raise ConfigError("baselines.fixed_layout", "must be center or corners")
    if cfg.baselines.grid_resolution < 1:
        raise ConfigError("baselines.grid_resolution", "must be >= 1")
    if not cfg.k_values or min(cfg.k_values) < 0:
        raise ConfigError("run.k_values", "must be a non-empty list of counts >= 0")


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("file", f"config file not found: {path}")
    return parse_config(path.read_text(), source=str(path))


def with_overrides(cfg: RunConfig, **changes) -> RunConfig:
    """Copy of ``cfg`` with dotted-path overrides: ``with_overrides(cfg, **{"scenario.num_users": 8})``."""
    tree = _tree(cfg)
    for path, value in changes.items():
        _set(tree, path.replace("__", "."), value)
    out = _build(RunConfig, tree, "")
    validate(out)
    return out


__all__ = [
    "BaselineConfig", "ConfigError", "RunConfig", "ScenarioConfig",
    "load_config", "parse_config", "with_overrides",
]
