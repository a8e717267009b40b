"""UAV swarm anti-jamming: jamming field model, graph encoding, GCN prediction,
flocking control with danger-disk avoidance, and closed-loop missions."""

from .jamfield import (
    DisruptionPolicy,
    JammerField,
    critical_radius,
    is_disrupted,
    probability,
    probability_rate,
)
from .swarm import (
    ControlGains,
    DangerDisk,
    SwarmConfig,
    SwarmMetrics,
    UavState,
    avoidance_accel,
    flocking_accel,
    step,
    swarm_metrics,
)
from .graph import (
    GraphSnapshot,
    Normalizer,
    build_adjacency,
    build_features,
    destandardize_label,
    encode_swarm,
    normalize_adjacency,
    standardize,
    standardize_label,
)
from .gcn import (
    GcnModel,
    NonFiniteLossError,
    TrainConfig,
    backward,
    evaluate,
    forward,
    init_model,
    load_model,
    loss,
    predict,
    save_model,
    train,
)
from .datagen import (
    Sample,
    ScenarioRanges,
    generate_dataset,
    load_dataset,
    make_sample,
    sample_scenario,
    triangular_lattice,
)
from .episode import (
    EpisodeConfig,
    EpisodeSummary,
    TrajectoryLog,
    detect_danger,
    episode_outcome,
    run_episode,
)

__version__ = "0.1.0"
