"""Closed-loop mission: periodic jammer re-prediction, avoidance steering, logging."""

import json
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .datagen import FORMATION_JITTER_M, triangular_lattice
from .gcn import load_model, predict
from .graph import encode_swarm
from .jamfield import DisruptionPolicy, JammerField, critical_radius, probability
from .swarm import (
    DangerDisk,
    SwarmConfig,
    UavState,
    avoidance_accel,
    flocking_accel,
    step,
    swarm_metrics,
)

LOG_VERSION = 1
OUTCOMES = ("success", "disruption_failure", "timeout")

# While any UAV sits inside the alert radius the swarm loosens its spacing
# spring by this factor so it can spread around the disk.
DANGER_COHESION_SCALE = 0.25
# Regressor output for the decay constant is clamped here before the
# critical-radius logarithm, which is undefined outside (0, 1).
PRED_A_CLAMP = (0.5, 0.999)
# Exponential smoothing weight for successive predictions.
PRED_EMA_WEIGHT = 0.5


@dataclass
class EpisodeConfig:
    swarm: SwarmConfig = dc_field(default_factory=SwarmConfig)
    jammer: JammerField = dc_field(default_factory=lambda: JammerField(100.0, 100.0))
    policy: DisruptionPolicy = dc_field(default_factory=DisruptionPolicy)
    model_path: str | None = None
    start: tuple = (20.0, 20.0)
    replan_interval: float = 1.0
    snapshot_interval: float = 10.0
    timeout: float = 300.0
    seed: int = 0
    inflation: float = 1.5
    margin: float = 10.0
    # Initial lattice spacing; must keep the formation inside comm range so
    # the swarm starts connected (the cruise spacing spring then takes over).
    formation_spacing: float = 16.0

    def __post_init__(self):
        dt = self.swarm.dt
        if self.replan_interval < dt:
            raise ValueError("replan_interval must be >= dt")
        for name in ("replan_interval", "snapshot_interval"):
            val = getattr(self, name)
            ratio = val / dt
            if abs(ratio - round(ratio)) > 1e-9:
                raise ValueError(f"{name} must be a multiple of dt")
        if self.timeout <= 0.0:
            raise ValueError("timeout must be positive")

    def to_dict(self):
        return {
            "physics": {
                "n": self.swarm.n,
                "comm_range_d": self.swarm.comm_range_d,
                "spacing_rs": self.swarm.spacing_rs,
                "v_max": self.swarm.v_max,
                "a_max": self.swarm.a_max,
                "dt": self.swarm.dt,
                "target": list(self.swarm.target),
                "arrive_radius": self.swarm.arrive_radius,
                "gains": {
                    "cohesion": self.swarm.gains.cohesion,
                    "alignment": self.swarm.gains.alignment,
                    "goal": self.swarm.gains.goal,
                    "damping": self.swarm.gains.damping,
                    "repulsion": self.swarm.gains.repulsion,
                    "repulsion_tangent": self.swarm.gains.repulsion_tangent,
                },
            },
            "jammer": {
                "pos_x": self.jammer.pos_x, "pos_y": self.jammer.pos_y,
                "k": self.jammer.k, "decay_a": self.jammer.decay_a,
                "p_tau": self.policy.p_tau,
            },
            "episode": {
                "model_path": self.model_path,
                "start": list(self.start),
                "replan_interval": self.replan_interval,
                "snapshot_interval": self.snapshot_interval,
                "timeout": self.timeout,
                "seed": self.seed,
                "inflation": self.inflation,
                "margin": self.margin,
                "formation_spacing": self.formation_spacing,
            },
        }


@dataclass
class TrajectoryLog:
    """Per-tick mission records plus the terminal outcome."""

    config: dict
    ticks: list = dc_field(default_factory=list)
    outcome: str | None = None
    t_final: float | None = None

    def write_jsonl(self, path):
        if self.outcome is None:
            raise ValueError("cannot write an unfinished log")
        with open(path, "w") as f:
            f.write(json.dumps({"version": LOG_VERSION, "config": self.config}) + "\n")
            for tick in self.ticks:
                f.write(json.dumps(tick) + "\n")
            f.write(json.dumps({"outcome": self.outcome,
                                "t_final": self.t_final}) + "\n")

    @classmethod
    def read_jsonl(cls, path):
        with open(path) as f:
            lines = [json.loads(line) for line in f if line.strip()]
        if not lines or lines[0].get("version") != LOG_VERSION:
            raise ValueError(f"not a version-{LOG_VERSION} trajectory log: {path}")
        log = cls(config=lines[0]["config"])
        for rec in lines[1:]:
            if "outcome" in rec:
                log.outcome = rec["outcome"]
                log.t_final = rec["t_final"]
            else:
                log.ticks.append(rec)
        return log


def detect_danger(swarm, disk):
    """True iff any operational UAV is at or inside the disk's alert radius."""
    center = np.asarray(disk.center, dtype=float)
    return any(
        not u.disrupted
        and float(np.linalg.norm(u.pos - center)) <= disk.alert_radius
        for u in swarm
    )


def _initial_swarm(cfg, rng):
    base = triangular_lattice(cfg.swarm.n, cfg.formation_spacing)
    jitter = rng.uniform(-FORMATION_JITTER_M, FORMATION_JITTER_M,
                         size=(cfg.swarm.n, 2))
    pos = np.asarray(cfg.start, dtype=float) + base + jitter
    return [UavState(i, pos[i], np.zeros(2)) for i in range(cfg.swarm.n)]


def _edge_list(swarm, d):
    edges = []
    for i in range(len(swarm)):
        for j in range(i + 1, len(swarm)):
            if swarm[i].disrupted or swarm[j].disrupted:
                continue
            if float(np.linalg.norm(swarm[i].pos - swarm[j].pos)) < d:
                edges.append([i, j])
    return edges


def _tick_record(t, swarm, cfg, pred, r_hat, true_r_tau, edges, danger):
    return {
        "t": t,
        "uavs": [
            {
                "pos": [float(u.pos[0]), float(u.pos[1])],
                "vel": [float(u.vel[0]), float(u.vel[1])],
                "p": probability(cfg.jammer, u.pos),
                "disrupted": bool(u.disrupted),
            }
            for u in swarm
        ],
        "pred": {"xj": float(pred[0]), "yj": float(pred[1]),
                 "a": float(pred[2]), "r_tau": float(r_hat)},
        "true": {"xj": cfg.jammer.pos_x, "yj": cfg.jammer.pos_y,
                 "a": cfg.jammer.decay_a, "r_tau": float(true_r_tau)},
        "edges": edges,
        "danger": bool(danger),
    }


def run_episode(cfg, model=None):
    """Run one mission to success, disruption failure, or timeout.

    Every replan interval the swarm is encoded, the model re-predicts the
    jammer, predictions are exponentially smoothed, and the danger disk is
    rebuilt from the clamped decay estimate. Every dt the swarm flies
    flocking control plus (under danger) potential-field avoidance. Success
    needs every UAV within the arrival radius, a connected graph, and no
    disruptions; any disruption fails the mission immediately.
    """
    if model is None:
        if cfg.model_path is None:
            raise ValueError("run_episode needs a model or a model_path")
        model = load_model(cfg.model_path)

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    swarm = _initial_swarm(cfg, rng)
    true_r_tau = critical_radius(cfg.jammer, cfg.policy)

    jammer_xy = np.array([cfg.jammer.pos_x, cfg.jammer.pos_y])
    if min(float(np.linalg.norm(u.pos - jammer_xy)) for u in swarm) <= true_r_tau:
        raise ValueError("initial formation starts inside the true disruption disk")
    if not swarm_metrics(swarm, cfg.swarm).connected:
        raise ValueError("initial formation is not connected")

    dt = cfg.swarm.dt
    replan_every = round(cfg.replan_interval / dt)
    target = np.asarray(cfg.swarm.target, dtype=float)
    log = TrajectoryLog(config=cfg.to_dict())

    smoothed = None
    disk = None
    k = 0
    while True:
        t = k * dt
        if k % replan_every == 0:
            raw = predict(model, encode_swarm(swarm, cfg.jammer,
                                              cfg.swarm.comm_range_d))
            smoothed = raw if smoothed is None else (
                (1.0 - PRED_EMA_WEIGHT) * smoothed + PRED_EMA_WEIGHT * raw)
            a_hat = float(np.clip(smoothed[2], *PRED_A_CLAMP))
            r_hat = critical_radius(
                JammerField(float(smoothed[0]), float(smoothed[1]),
                            k=1.0, decay_a=a_hat),
                cfg.policy)
            disk = DangerDisk((float(smoothed[0]), float(smoothed[1])),
                              r_hat, cfg.inflation, cfg.margin)
        danger = detect_danger(swarm, disk)
        log.ticks.append(_tick_record(
            t, swarm, cfg, (disk.center[0], disk.center[1],
                            float(np.clip(smoothed[2], *PRED_A_CLAMP))),
            disk.radius, true_r_tau, _edge_list(swarm, cfg.swarm.comm_range_d),
            danger))

        if any(u.disrupted for u in swarm):
            outcome = "disruption_failure"
            break
        metrics = swarm_metrics(swarm, cfg.swarm)
        arrived = all(
            float(np.linalg.norm(u.pos - target)) <= cfg.swarm.arrive_radius
            for u in swarm)
        if arrived and metrics.connected:
            outcome = "success"
            break
        if t >= cfg.timeout - 1e-9:
            outcome = "timeout"
            break

        accels = flocking_accel(
            swarm, cfg.swarm,
            cohesion_scale=DANGER_COHESION_SCALE if danger else 1.0)
        if danger:
            for i, uav in enumerate(swarm):
                if not uav.disrupted:
                    accels[i] = accels[i] + avoidance_accel(uav, disk, cfg.swarm)
        swarm = step(swarm, accels, cfg.jammer, cfg.policy, cfg.swarm)
        k += 1

    log.outcome = outcome
    log.t_final = k * dt
    return log


@dataclass(frozen=True)
class EpisodeSummary:
    outcome: str
    t_final: float
    min_margin: float
    final_connected: bool


def episode_outcome(log):
    """Summary of a finished log: outcome, time, worst clearance, final connectivity.

    min_margin is the minimum over all ticks and UAVs of (distance to the true
    jammer - true critical radius); positive iff no UAV ever entered the disk.
    """
    if log.outcome is None or log.t_final is None or not log.ticks:
        raise ValueError("truncated log: missing ticks or terminal record")
    if log.outcome not in OUTCOMES:
        raise ValueError(f"unknown outcome {log.outcome!r}")

    min_margin = math.inf
    for tick in log.ticks:
        true = tick["true"]
        center = np.array([true["xj"], true["yj"]])
        for uav in tick["uavs"]:
            d = float(np.linalg.norm(np.asarray(uav["pos"]) - center))
            min_margin = min(min_margin, d - true["r_tau"])

    last = log.ticks[-1]
    n = len(last["uavs"])
    active = [i for i in range(n) if not last["uavs"][i]["disrupted"]]
    if not active:
        final_connected = False
    else:
        # BFS over the logged edge list, restricted to operational UAVs.
        adj = {i: [] for i in active}
        for i, j in last["edges"]:
            if i in adj and j in adj:
                adj[i].append(j)
                adj[j].append(i)
        seen = {active[0]}
        frontier = [active[0]]
        while frontier:
            cur = frontier.pop()
            for nxt in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        final_connected = len(seen) == len(active)

    return EpisodeSummary(log.outcome, float(log.t_final), float(min_margin),
                          final_connected)
