"""One JSON run configuration: paper-anchored defaults, file merge, flag overrides."""

import copy
import json

from .datagen import ScenarioRanges
from .episode import EpisodeConfig
from .gcn import TrainConfig
from .jamfield import DisruptionPolicy, JammerField
from .swarm import ControlGains, SwarmConfig


class ConfigError(ValueError):
    """Bad configuration file or values; maps to CLI exit code 2."""


DEFAULTS = {
    "physics": {
        "n": 6,
        "comm_range_d": 20.0,
        "spacing_rs": 24.0,
        "v_max": 5.0,
        "a_max": 2.0,
        "dt": 0.1,
        "target": [180.0, 180.0],
        "arrive_radius": 5.0,
        "gains": {
            "cohesion": 0.05,
            "alignment": 0.5,
            "goal": 0.3,
            "damping": 0.6,
            "repulsion": 400.0,
            "repulsion_tangent": 40.0,
        },
    },
    "jammer": {
        "pos_x": 100.0,
        "pos_y": 100.0,
        "k": 1.0,
        "decay_a": 0.9,
        "p_tau": 0.5,
    },
    "scenario": {
        "arena": [[0.0, 200.0], [0.0, 200.0]],
        "a_range": [0.85, 0.98],
        "jammer_region": [[50.0, 150.0], [50.0, 150.0]],
        "speed_range": [0.0, 5.0],
    },
    "train": {
        "batch_size": 32,
        "learning_rate": 0.001,
        "epochs": 1000,
        "layers": 2,
        "hidden": 64,
        "val_fraction": 0.1,
        "seed": 0,
        "beta1": 0.9,
        "beta2": 0.999,
        "eps": 1e-8,
    },
    "episode": {
        "model_path": None,
        "start": [20.0, 20.0],
        "replan_interval": 1.0,
        "snapshot_interval": 10.0,
        "timeout": 300.0,
        "seed": 0,
        "inflation": 1.5,
        "margin": 10.0,
        "formation_spacing": 16.0,
    },
}


def _merge(base, override, path):
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown config key {'.'.join(path + [key])!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(
                    f"config key {'.'.join(path + [key])!r} must be an object")
            _merge(base[key], value, path + [key])
        else:
            base[key] = value


def load_config(path=None):
    """Resolved config: defaults deep-merged with the optional file; unknown keys rejected."""
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            with open(path) as f:
                doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
        if not isinstance(doc, dict):
            raise ConfigError("config file must contain a JSON object")
        _merge(cfg, doc, [])
    if cfg["train"]["layers"] != 2:
        raise ConfigError("only 2 graph-convolution layers are supported")
    return cfg


def _wrap(section):
    def decorator(fn):
        def inner(cfg, **overrides):
            try:
                return fn(cfg, **overrides)
            except (ValueError, TypeError, KeyError) as e:
                if isinstance(e, ConfigError):
                    raise
                raise ConfigError(f"bad {section} config: {e}") from e
        return inner
    return decorator


@_wrap("physics")
def swarm_config_from(cfg):
    phys = cfg["physics"]
    return SwarmConfig(
        n=int(phys["n"]),
        comm_range_d=float(phys["comm_range_d"]),
        spacing_rs=float(phys["spacing_rs"]),
        v_max=float(phys["v_max"]),
        a_max=float(phys["a_max"]),
        dt=float(phys["dt"]),
        target=tuple(float(v) for v in phys["target"]),
        gains=ControlGains(**{k: float(v) for k, v in phys["gains"].items()}),
        arrive_radius=float(phys["arrive_radius"]),
    )


@_wrap("jammer")
def jammer_from(cfg):
    jam = cfg["jammer"]
    fld = JammerField(float(jam["pos_x"]), float(jam["pos_y"]),
                      k=float(jam["k"]), decay_a=float(jam["decay_a"]))
    return fld, DisruptionPolicy(float(jam["p_tau"]))


@_wrap("scenario")
def ranges_from(cfg):
    return ScenarioRanges.from_dict(cfg["scenario"])


@_wrap("train")
def train_config_from(cfg, **overrides):
    tr = dict(cfg["train"])
    tr.pop("layers")
    for key, value in overrides.items():
        if value is not None:
            tr[key] = value
    return TrainConfig(
        batch_size=int(tr["batch_size"]),
        learning_rate=float(tr["learning_rate"]),
        epochs=int(tr["epochs"]),
        val_fraction=float(tr["val_fraction"]),
        seed=int(tr["seed"]),
        hidden=int(tr["hidden"]),
        beta1=float(tr["beta1"]),
        beta2=float(tr["beta2"]),
        eps=float(tr["eps"]),
    )


@_wrap("episode")
def episode_config_from(cfg, **overrides):
    ep = dict(cfg["episode"])
    for key, value in overrides.items():
        if value is not None:
            ep[key] = value
    fld, policy = jammer_from(cfg)
    return EpisodeConfig(
        swarm=swarm_config_from(cfg),
        jammer=fld,
        policy=policy,
        model_path=ep["model_path"],
        start=tuple(float(v) for v in ep["start"]),
        replan_interval=float(ep["replan_interval"]),
        snapshot_interval=float(ep["snapshot_interval"]),
        timeout=float(ep["timeout"]),
        seed=int(ep["seed"]),
        inflation=float(ep["inflation"]),
        margin=float(ep["margin"]),
        formation_spacing=float(ep["formation_spacing"]),
    )
