"""Double-integrator swarm: flocking control, danger-disk avoidance, disruption freeze."""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .jamfield import is_disrupted


@dataclass(frozen=True)
class ControlGains:
    """Flocking and avoidance gains; all must be nonnegative."""

    cohesion: float = 0.05
    alignment: float = 0.5
    goal: float = 0.3
    damping: float = 0.6
    repulsion: float = 400.0
    repulsion_tangent: float = 40.0

    def __post_init__(self):
        for name in ("cohesion", "alignment", "goal", "damping",
                     "repulsion", "repulsion_tangent"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"gain {name} must be >= 0")


@dataclass
class UavState:
    """One UAV: index, planar position/velocity, and the sticky disruption flag."""

    uid: int
    pos: np.ndarray
    vel: np.ndarray
    disrupted: bool = False

    def __post_init__(self):
        self.pos = np.asarray(self.pos, dtype=float).reshape(2)
        self.vel = np.asarray(self.vel, dtype=float).reshape(2)


@dataclass(frozen=True)
class SwarmConfig:
    n: int = 6
    comm_range_d: float = 20.0
    spacing_rs: float = 24.0
    v_max: float = 5.0
    a_max: float = 2.0
    dt: float = 0.1
    target: tuple = (180.0, 180.0)
    gains: ControlGains = dc_field(default_factory=ControlGains)
    arrive_radius: float = 5.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("swarm needs at least 2 UAVs")
        if self.spacing_rs <= 0.0:
            raise ValueError("spacing_rs must be positive")
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.comm_range_d <= 0.0 or self.v_max <= 0.0 or self.a_max <= 0.0:
            raise ValueError("comm_range_d, v_max and a_max must be positive")


@dataclass(frozen=True)
class DangerDisk:
    """Predicted disruption disk, inflated + buffered for avoidance control."""

    center: tuple
    radius: float
    inflation: float = 1.5
    margin: float = 10.0

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("disk radius must be positive")
        if self.inflation < 1.0:
            raise ValueError("inflation must be >= 1")

    @property
    def avoid_radius(self):
        return self.radius * self.inflation

    @property
    def alert_radius(self):
        return self.radius * self.inflation + self.margin


def clamp_norm(vec, max_norm):
    """Scale vec down to max_norm if it is longer; otherwise return it unchanged."""
    v = np.asarray(vec, dtype=float)
    n = float(np.linalg.norm(v))
    if n > max_norm:
        return v * (max_norm / n)
    return v


def flocking_accel(swarm, cfg, cohesion_scale=1.0):
    """Per-UAV flocking acceleration: spacing spring + alignment + goal - damping.

    Neighbors are the non-disrupted UAVs strictly within comm range. With no
    neighbors only the goal and damping terms act. Each result is clamped to
    a_max; disrupted UAVs get zero. cohesion_scale weakens the spring while
    the swarm is dispersing around a danger disk.
    """
    n = len(swarm)
    pos = np.array([u.pos for u in swarm], dtype=float)
    vel = np.array([u.vel for u in swarm], dtype=float)
    down = np.array([u.disrupted for u in swarm], dtype=bool)
    target = np.asarray(cfg.target, dtype=float)
    g = cfg.gains

    diff = pos[None, :, :] - pos[:, None, :]   # diff[i, j] = p_j - p_i
    dist = np.linalg.norm(diff, axis=-1)

    acc = np.zeros((n, 2))
    for i in range(n):
        if down[i]:
            continue
        a = g.goal * (target - pos[i]) - g.damping * vel[i]
        nbrs = [j for j in range(n)
                if j != i and not down[j] and dist[i, j] < cfg.comm_range_d]
        if nbrs:
            spring = np.zeros(2)
            for j in nbrs:
                if dist[i, j] == 0.0:
                    raise ValueError(
                        f"UAVs {i} and {j} coincide; separation direction undefined")
                spring += (1.0 - cfg.spacing_rs / dist[i, j]) * diff[i, j]
            a += cohesion_scale * g.cohesion * spring
            a += g.alignment * (vel[nbrs].mean(axis=0) - vel[i])
        acc[i] = clamp_norm(a, cfg.a_max)
    return acc


def avoidance_accel(state, disk, cfg):
    """Inverse potential-field repulsion from a danger disk, with a tangential slide.

    Zero at or beyond the alert radius. Inside, the radial push grows as the UAV
    nears the center and a tangential component (the perpendicular that points
    more toward the target, counterclockwise on ties) steers it around instead
    of stalling head-on. Clamped to a_max.
    """
    if state.disrupted:
        raise ValueError("avoidance is undefined for a disrupted UAV")
    center = np.asarray(disk.center, dtype=float)
    delta = state.pos - center
    rho = float(np.linalg.norm(delta))
    rho0 = disk.alert_radius
    if rho == 0.0:
        raise ValueError("UAV at the predicted jammer center; direction undefined")
    if rho >= rho0:
        return np.zeros(2)
    u_rad = delta / rho
    t_ccw = np.array([-u_rad[1], u_rad[0]])
    to_target = np.asarray(cfg.target, dtype=float) - state.pos
    u_tan = t_ccw if float(t_ccw @ to_target) >= float(-t_ccw @ to_target) else -t_ccw
    gap = 1.0 / rho - 1.0 / rho0
    g = cfg.gains
    a = g.repulsion * gap / rho ** 2 * u_rad + g.repulsion_tangent * gap * u_tan
    return clamp_norm(a, cfg.a_max)


def step(swarm, accels, field, policy, cfg):
    """Advance one tick with semi-implicit Euler, then apply the disruption freeze.

    v <- clamp(v + a*dt, v_max); p <- p + v*dt. A UAV whose new position falls
    inside the disruption disk freezes permanently with zero velocity.
    Disrupted UAVs skip integration entirely.
    """
    acc = np.asarray(accels, dtype=float)
    if acc.shape != (len(swarm), 2):
        raise ValueError(f"expected {len(swarm)} accelerations, got shape {acc.shape}")
    if not np.all(np.isfinite(acc)):
        raise ValueError("non-finite acceleration")
    out = []
    for uav, a in zip(swarm, acc):
        if uav.disrupted:
            out.append(UavState(uav.uid, uav.pos.copy(), np.zeros(2), True))
            continue
        v = clamp_norm(uav.vel + a * cfg.dt, cfg.v_max)
        p = uav.pos + v * cfg.dt
        if is_disrupted(field, policy, p):
            out.append(UavState(uav.uid, p, np.zeros(2), True))
        else:
            out.append(UavState(uav.uid, p, v, False))
    return out


@dataclass(frozen=True)
class SwarmMetrics:
    connected: bool
    min_pairwise_dist: float
    max_dist_to_target: float
    any_disrupted: bool


def swarm_metrics(swarm, cfg):
    """Connectivity of the operational comm graph plus distance summaries."""
    pos = np.array([u.pos for u in swarm], dtype=float)
    down = np.array([u.disrupted for u in swarm], dtype=bool)
    target = np.asarray(cfg.target, dtype=float)

    n = len(swarm)
    if n >= 2:
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        iu = np.triu_indices(n, k=1)
        min_pair = float(dist[iu].min())
    else:
        dist = np.zeros((n, n))
        min_pair = math.inf

    active = [i for i in range(n) if not down[i]]
    if not active:
        connected = False
    else:
        # Union-find over operational UAVs with edges strictly inside comm range.
        parent = {i: i for i in active}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for ai in range(len(active)):
            for bi in range(ai + 1, len(active)):
                i, j = active[ai], active[bi]
                if dist[i, j] < cfg.comm_range_d:
                    parent[find(i)] = find(j)
        connected = len({find(i) for i in active}) == 1

    return SwarmMetrics(
        connected=connected,
        min_pairwise_dist=min_pair,
        max_dist_to_target=float(np.linalg.norm(pos - target, axis=1).max()),
        any_disrupted=bool(down.any()),
    )
