"""Graph encoding of one swarm instant: adjacency, node features, normalization."""

from dataclasses import dataclass

import numpy as np

from .jamfield import probability, probability_rate

N_FEATURES = 6  # x, y, vx, vy, p, dp/dt
N_LABELS = 3    # jammer x, jammer y, decay constant

# Columns with below-this standard deviation are left unscaled when fitting,
# so a constant column standardizes to zeros instead of dividing by ~0.
_MIN_STD = 1e-12


@dataclass(frozen=True)
class GraphSnapshot:
    """Binary adjacency plus per-UAV feature rows for a single instant."""

    adjacency: np.ndarray  # (n, n) symmetric binary, zero diagonal
    features: np.ndarray   # (n, 6)

    def __post_init__(self):
        adj = np.asarray(self.adjacency)
        feats = np.asarray(self.features)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {adj.shape}")
        if feats.shape != (adj.shape[0], N_FEATURES):
            raise ValueError(
                f"features must be ({adj.shape[0]}, {N_FEATURES}), got {feats.shape}"
            )


def build_adjacency(positions, disrupted, d):
    """Binary adjacency: 1 iff distinct, both operational, strictly closer than d."""
    pos = np.asarray(positions, dtype=float)
    down = np.asarray(disrupted, dtype=bool)
    if d <= 0:
        raise ValueError("communication range must be positive")
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    adj = (dist < d).astype(np.int64)
    np.fill_diagonal(adj, 0)
    up = ~down
    adj = adj * (up[:, None] & up[None, :])
    return adj


def build_features(swarm, field):
    """Stack one (x, y, vx, vy, p, dp/dt) row per UAV.

    Disrupted UAVs contribute their frozen position with a zero rate; their
    velocity is already pinned at zero by the dynamics.
    """
    rows = np.empty((len(swarm), N_FEATURES), dtype=float)
    for i, uav in enumerate(swarm):
        p = probability(field, uav.pos)
        if uav.disrupted:
            rate = 0.0
        else:
            rate = probability_rate(field, uav.pos, uav.vel)
        rows[i] = (uav.pos[0], uav.pos[1], uav.vel[0], uav.vel[1], p, rate)
    return rows


def encode_swarm(swarm, field, d):
    """Snapshot of the swarm as seen by the predictor: adjacency + raw features."""
    positions = [uav.pos for uav in swarm]
    disrupted = [uav.disrupted for uav in swarm]
    return GraphSnapshot(build_adjacency(positions, disrupted, d),
                         build_features(swarm, field))


def normalize_adjacency(adjacency):
    """Symmetric self-loop normalization D^{-1/2} (A + I) D^{-1/2}."""
    a = np.asarray(adjacency, dtype=float)
    a_loop = a + np.eye(a.shape[0])
    d_inv_sqrt = 1.0 / np.sqrt(a_loop.sum(axis=1))
    return a_loop * d_inv_sqrt[:, None] * d_inv_sqrt[None, :]


@dataclass(frozen=True)
class Normalizer:
    """Frozen per-column affine scaling for features and labels."""

    feature_shift: np.ndarray  # (6,)
    feature_scale: np.ndarray  # (6,)
    label_shift: np.ndarray    # (3,)
    label_scale: np.ndarray    # (3,)

    def __post_init__(self):
        for name, size in (("feature", N_FEATURES), ("label", N_LABELS)):
            shift = np.asarray(getattr(self, name + "_shift"), dtype=float)
            scale = np.asarray(getattr(self, name + "_scale"), dtype=float)
            if shift.shape != (size,) or scale.shape != (size,):
                raise ValueError(f"{name} shift/scale must have shape ({size},)")
            if np.any(scale <= 0.0):
                raise ValueError(f"{name} scales must be strictly positive")
            object.__setattr__(self, name + "_shift", shift)
            object.__setattr__(self, name + "_scale", scale)

    @classmethod
    def fit(cls, feature_rows, labels):
        """Per-column mean/std from the training split; constant columns scale 1."""
        feats = np.asarray(feature_rows, dtype=float).reshape(-1, N_FEATURES)
        labs = np.asarray(labels, dtype=float).reshape(-1, N_LABELS)
        f_std = feats.std(axis=0)
        l_std = labs.std(axis=0)
        return cls(
            feature_shift=feats.mean(axis=0),
            feature_scale=np.where(f_std > _MIN_STD, f_std, 1.0),
            label_shift=labs.mean(axis=0),
            label_scale=np.where(l_std > _MIN_STD, l_std, 1.0),
        )

    def to_dict(self):
        return {
            "feature_shift": self.feature_shift.tolist(),
            "feature_scale": self.feature_scale.tolist(),
            "label_shift": self.label_shift.tolist(),
            "label_scale": self.label_scale.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            feature_shift=np.asarray(d["feature_shift"], dtype=float),
            feature_scale=np.asarray(d["feature_scale"], dtype=float),
            label_shift=np.asarray(d["label_shift"], dtype=float),
            label_scale=np.asarray(d["label_scale"], dtype=float),
        )


def standardize(snapshot, normalizer):
    """Snapshot with features shifted/scaled per column; adjacency untouched."""
    feats = (snapshot.features - normalizer.feature_shift) / normalizer.feature_scale
    return GraphSnapshot(snapshot.adjacency, feats)


def standardize_label(label, normalizer):
    return (np.asarray(label, dtype=float) - normalizer.label_shift) / normalizer.label_scale


def destandardize_label(label, normalizer):
    """Inverse of standardize_label: back to (jammer x, jammer y, decay constant)."""
    return np.asarray(label, dtype=float) * normalizer.label_scale + normalizer.label_shift
