"""Seeded scenario sampling and labeled JSONL dataset generation."""

import json
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .graph import GraphSnapshot, build_adjacency, build_features
from .jamfield import DisruptionPolicy, JammerField, critical_radius
from .swarm import SwarmConfig, UavState

FORMATION_JITTER_M = 2.0
MAX_REJECTS = 100
DATASET_VERSION = 1


def _check_interval(name, lo, hi):
    if not lo < hi:
        raise ValueError(f"{name} must be a nonempty interval, got [{lo}, {hi}]")


@dataclass(frozen=True)
class ScenarioRanges:
    """Sampling ranges for random scenes: arena, decay constant, jammer box, speed."""

    arena: tuple = ((0.0, 200.0), (0.0, 200.0))
    a_range: tuple = (0.85, 0.98)
    jammer_region: tuple = ((50.0, 150.0), (50.0, 150.0))
    speed_range: tuple = (0.0, 5.0)

    def __post_init__(self):
        for axis in (0, 1):
            _check_interval(f"arena[{axis}]", *self.arena[axis])
            _check_interval(f"jammer_region[{axis}]", *self.jammer_region[axis])
            if (self.jammer_region[axis][0] < self.arena[axis][0]
                    or self.jammer_region[axis][1] > self.arena[axis][1]):
                raise ValueError("jammer_region must lie inside the arena")
        lo, hi = self.a_range
        if not (0.0 < lo < hi < 1.0):
            raise ValueError(f"a_range must be strictly inside (0, 1), got {self.a_range}")
        if not (0.0 <= self.speed_range[0] < self.speed_range[1]):
            raise ValueError(f"bad speed_range {self.speed_range}")

    def to_dict(self):
        return {
            "arena": [list(self.arena[0]), list(self.arena[1])],
            "a_range": list(self.a_range),
            "jammer_region": [list(self.jammer_region[0]), list(self.jammer_region[1])],
            "speed_range": list(self.speed_range),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            arena=(tuple(d["arena"][0]), tuple(d["arena"][1])),
            a_range=tuple(d["a_range"]),
            jammer_region=(tuple(d["jammer_region"][0]), tuple(d["jammer_region"][1])),
            speed_range=tuple(d["speed_range"]),
        )


@dataclass(frozen=True)
class Sample:
    """One labeled training record: raw snapshot plus (xj, yj, a)."""

    snapshot: GraphSnapshot
    label: np.ndarray
    meta: dict = dc_field(default_factory=dict)


def triangular_lattice(n, spacing):
    """n points on a triangular lattice (rows of 1, 2, 3, ...), centered on zero."""
    pts = []
    row = 0
    while len(pts) < n:
        y = -row * spacing * math.sqrt(3.0) / 2.0
        for c in range(row + 1):
            pts.append(((c - row / 2.0) * spacing, y))
            if len(pts) == n:
                break
        row += 1
    pts = np.asarray(pts, dtype=float)
    return pts - pts.mean(axis=0)


def sample_scenario(seed, ranges=None, swarm_cfg=None, policy=None):
    """Seeded random scene: jammer field plus an operational swarm placement.

    The jammer and decay constant are uniform in their ranges with k fixed at 1.
    The swarm is a jittered triangular lattice around a uniform centroid, all
    UAVs sharing one heading and speed. Scenes that would start any UAV inside
    the disruption disk are rejected and redrawn, up to MAX_REJECTS tries.
    """
    ranges = ranges if ranges is not None else ScenarioRanges()
    swarm_cfg = swarm_cfg if swarm_cfg is not None else SwarmConfig()
    policy = policy if policy is not None else DisruptionPolicy()
    rng = np.random.Generator(np.random.PCG64(seed))
    base = triangular_lattice(swarm_cfg.n, swarm_cfg.spacing_rs)

    for _ in range(MAX_REJECTS):
        jx = rng.uniform(*ranges.jammer_region[0])
        jy = rng.uniform(*ranges.jammer_region[1])
        a = rng.uniform(*ranges.a_range)
        centroid = np.array([rng.uniform(*ranges.arena[0]),
                             rng.uniform(*ranges.arena[1])])
        jitter = rng.uniform(-FORMATION_JITTER_M, FORMATION_JITTER_M,
                             size=(swarm_cfg.n, 2))
        pos = centroid + base + jitter
        heading = rng.uniform(0.0, 2.0 * math.pi)
        speed = rng.uniform(*ranges.speed_range)
        vel = speed * np.array([math.cos(heading), math.sin(heading)])

        fld = JammerField(jx, jy, k=1.0, decay_a=a)
        r_tau = critical_radius(fld, policy)
        dists = np.linalg.norm(pos - np.array([jx, jy]), axis=1)
        if dists.min() > r_tau:
            swarm = [UavState(i, pos[i], vel.copy()) for i in range(swarm_cfg.n)]
            return fld, swarm
    raise ValueError(
        f"ranges incompatible: no operational placement found in {MAX_REJECTS} tries")


def make_sample(seed, ranges=None, swarm_cfg=None, policy=None):
    """Sample one scenario and encode it as a labeled snapshot."""
    swarm_cfg = swarm_cfg if swarm_cfg is not None else SwarmConfig()
    fld, swarm = sample_scenario(seed, ranges, swarm_cfg, policy)
    positions = [u.pos for u in swarm]
    snapshot = GraphSnapshot(
        build_adjacency(positions, [False] * len(swarm), swarm_cfg.comm_range_d),
        build_features(swarm, fld),
    )
    label = np.array([fld.pos_x, fld.pos_y, fld.decay_a])
    return Sample(snapshot, label, {"scenario_seed": int(seed)})


def _sample_record(sample):
    return {
        "adjacency": sample.snapshot.adjacency.astype(int).tolist(),
        "features": np.asarray(sample.snapshot.features).tolist(),
        "label": {"xj": float(sample.label[0]), "yj": float(sample.label[1]),
                  "a": float(sample.label[2])},
        "meta": {"scenario_seed": int(sample.meta["scenario_seed"])},
    }


def generate_dataset(n_samples, seed, out_path, ranges=None, swarm_cfg=None,
                     policy=None, start=0):
    """Write a header line plus n_samples JSONL records to out_path.

    Sample i (counting from start) is drawn with scenario seed seed + i, so
    shards generated with disjoint index ranges concatenate to the single-run
    output line for line.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    ranges = ranges if ranges is not None else ScenarioRanges()
    swarm_cfg = swarm_cfg if swarm_cfg is not None else SwarmConfig()
    policy = policy if policy is not None else DisruptionPolicy()
    header = {
        "version": DATASET_VERSION,
        "n": int(n_samples),
        "seed": int(seed),
        "ranges": {
            **ranges.to_dict(),
            "p_tau": policy.p_tau,
            "n_uavs": swarm_cfg.n,
            "comm_range_d": swarm_cfg.comm_range_d,
            "spacing_rs": swarm_cfg.spacing_rs,
            "jitter_m": FORMATION_JITTER_M,
        },
    }
    with open(out_path, "w") as f:
        f.write(json.dumps(header) + "\n")
        for i in range(start, start + n_samples):
            sample = make_sample(seed + i, ranges, swarm_cfg, policy)
            f.write(json.dumps(_sample_record(sample)) + "\n")
    return out_path


def load_dataset(path):
    """Read a dataset file back into (header, list of Samples)."""
    samples = []
    with open(path) as f:
        header = json.loads(f.readline())
        if header.get("version") != DATASET_VERSION:
            raise ValueError(f"unsupported dataset version in {path}")
        for line in f:
            if not line.strip():
                continue
            rec = json.loads(line)
            snapshot = GraphSnapshot(
                np.asarray(rec["adjacency"], dtype=np.int64),
                np.asarray(rec["features"], dtype=float),
            )
            label = np.array([rec["label"]["xj"], rec["label"]["yj"],
                              rec["label"]["a"]])
            samples.append(Sample(snapshot, label, dict(rec.get("meta", {}))))
    return header, samples
