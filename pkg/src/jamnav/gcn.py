"""Two-layer graph-convolution regressor: forward, analytic backprop, Adam, training."""

import json
import math
from dataclasses import dataclass, field as dc_field, asdict

import numpy as np

from .graph import (
    N_FEATURES,
    N_LABELS,
    Normalizer,
    destandardize_label,
    normalize_adjacency,
    standardize,
    standardize_label,
)

PARAM_NAMES = ("w1", "b1", "w2", "b2", "w_out", "b_out")

# Evaluation strata on the strongest per-node disruption probability in a sample.
P_BUCKETS = (
    ("[0,0.01)", 0.0, 0.01),
    ("[0.01,0.1)", 0.01, 0.1),
    ("[0.1,1]", 0.1, 1.0 + 1e-12),
)


class NonFiniteLossError(RuntimeError):
    """Training hit a NaN/inf loss; carries the epoch where it happened."""

    def __init__(self, epoch):
        super().__init__(f"non-finite loss at epoch {epoch}")
        self.epoch = epoch


@dataclass
class TrainConfig:
    batch_size: int = 32
    learning_rate: float = 0.001
    epochs: int = 1000
    val_fraction: float = 0.1
    seed: int = 0
    hidden: int = 64
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction must be in (0, 1)")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.hidden < 1:
            raise ValueError("hidden width must be >= 1")


@dataclass
class GcnModel:
    """Weights of two graph-conv layers plus the pooled readout head."""

    w1: np.ndarray       # (6, H)
    b1: np.ndarray       # (H,)
    w2: np.ndarray       # (H, H)
    b2: np.ndarray       # (H,)
    w_out: np.ndarray    # (H, 3)
    b_out: np.ndarray    # (3,)
    normalizer: Normalizer
    seed: int = 0
    train_config: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        h = self.w1.shape[1]
        shapes = {
            "w1": (N_FEATURES, h), "b1": (h,),
            "w2": (h, h), "b2": (h,),
            "w_out": (h, N_LABELS), "b_out": (N_LABELS,),
        }
        for name, want in shapes.items():
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != want:
                raise ValueError(f"{name} must have shape {want}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
            setattr(self, name, arr)

    @property
    def hidden(self):
        return self.w1.shape[1]

    def params(self):
        """Live views of the weight arrays, in the fixed update order."""
        return {name: getattr(self, name) for name in PARAM_NAMES}


def _glorot(rng, fan_in, fan_out):
    bound = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


def init_model(hidden, normalizer, rng, seed=0, train_config=None):
    """Glorot-uniform weights (fixed draw order w1, w2, w_out), zero biases."""
    w1 = _glorot(rng, N_FEATURES, hidden)
    w2 = _glorot(rng, hidden, hidden)
    w_out = _glorot(rng, hidden, N_LABELS)
    return GcnModel(
        w1=w1, b1=np.zeros(hidden),
        w2=w2, b2=np.zeros(hidden),
        w_out=w_out, b_out=np.zeros(N_LABELS),
        normalizer=normalizer, seed=seed,
        train_config=dict(train_config or {}),
    )


def forward(model, snapshot):
    """Graph-level prediction for one standardized snapshot.

    H1 = relu(A_hat X W1 + b1); H2 = relu(A_hat H1 W2 + b2);
    readout = column mean of H2, then the linear head. Returns a 3-vector
    in standardized label space.
    """
    a_hat = normalize_adjacency(snapshot.adjacency)
    x = np.asarray(snapshot.features, dtype=float)
    h1 = np.maximum(a_hat @ x @ model.w1 + model.b1, 0.0)
    h2 = np.maximum(a_hat @ h1 @ model.w2 + model.b2, 0.0)
    return h2.mean(axis=0) @ model.w_out + model.b_out


def predict(model, raw_snapshot):
    """Standardize a raw snapshot, run forward, return the raw-unit 3-vector."""
    out = forward(model, standardize(raw_snapshot, model.normalizer))
    return destandardize_label(out, model.normalizer)


def loss(pred, label):
    """Mean squared error over the three output components."""
    p = np.asarray(pred, dtype=float)
    y = np.asarray(label, dtype=float)
    if p.shape != y.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {y.shape}")
    return float(np.mean((p - y) ** 2))


# ---------------------------------------------------------------------------
# Batched kernel. All samples in a batch share the node count, so the whole
# batch runs as stacked (B, n, .) tensors through BLAS.
# ---------------------------------------------------------------------------


def _stack_standardized(snapshots, labels_std):
    ns = {np.asarray(s.features).shape[0] for s in snapshots}
    if len(ns) != 1:
        raise ValueError("all snapshots in a batch must share the node count")
    a_hat = np.stack([normalize_adjacency(s.adjacency) for s in snapshots])
    x = np.stack([np.asarray(s.features, dtype=float) for s in snapshots])
    return a_hat, a_hat @ x, np.asarray(labels_std, dtype=float)


def _batch_forward(params, a_hat, ax):
    z1 = ax @ params["w1"] + params["b1"]
    h1 = np.maximum(z1, 0.0)
    ah1 = a_hat @ h1
    z2 = ah1 @ params["w2"] + params["b2"]
    h2 = np.maximum(z2, 0.0)
    g = h2.mean(axis=1)
    yhat = g @ params["w_out"] + params["b_out"]
    return z1, ah1, z2, g, yhat


def _batch_loss(params, a_hat, ax, y):
    yhat = _batch_forward(params, a_hat, ax)[4]
    return float(np.mean((yhat - y) ** 2))


def _batch_loss_grads(params, a_hat, ax, y):
    """Loss and exact gradients of the mean batch loss for every parameter.

    Reverse-mode chain rule through the head, mean pooling, relu (subgradient
    0 at 0) and both graph convolutions; the normalized adjacency is a
    constant per sample.
    """
    z1, ah1, z2, g, yhat = _batch_forward(params, a_hat, ax)
    nb, n_nodes, h = z1.shape
    resid = yhat - y
    total = float(np.mean(resid ** 2))

    dyhat = (2.0 / (resid.size)) * resid                      # (B, 3)
    db_out = dyhat.sum(axis=0)
    dw_out = g.T @ dyhat
    dg = dyhat @ params["w_out"].T                            # (B, H)
    dz2 = (dg[:, None, :] / n_nodes) * (z2 > 0.0)             # (B, n, H)
    dw2 = ah1.reshape(-1, h).T @ dz2.reshape(-1, h)
    db2 = dz2.sum(axis=(0, 1))
    dh1 = (a_hat @ dz2) @ params["w2"].T                      # A_hat symmetric
    dz1 = dh1 * (z1 > 0.0)
    dw1 = ax.reshape(-1, N_FEATURES).T @ dz1.reshape(-1, h)
    db1 = dz1.sum(axis=(0, 1))

    grads = {"w1": dw1, "b1": db1, "w2": dw2, "b2": db2,
             "w_out": dw_out, "b_out": db_out}
    return total, grads


def batch_loss(model, snapshots, labels_std):
    """Mean loss of a batch of standardized snapshots (used by gradient checks)."""
    if not snapshots:
        raise ValueError("empty batch")
    a_hat, ax, y = _stack_standardized(snapshots, labels_std)
    return _batch_loss(model.params(), a_hat, ax, y)


def backward(model, snapshots, labels_std):
    """Exact analytic gradients of the mean batch loss, same shapes as the weights."""
    if not snapshots:
        raise ValueError("empty batch")
    a_hat, ax, y = _stack_standardized(snapshots, labels_std)
    return _batch_loss_grads(model.params(), a_hat, ax, y)[1]


class _AdamState:
    """Adaptive moment estimation with bias correction."""

    def __init__(self, params, beta1, beta2, eps):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def update(self, params, grads, lr):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for k in PARAM_NAMES:
            gr = grads[k]
            self.m[k] = b1 * self.m[k] + (1.0 - b1) * gr
            self.v[k] = b2 * self.v[k] + (1.0 - b2) * gr * gr
            m_hat = self.m[k] / (1.0 - b1 ** self.t)
            v_hat = self.v[k] / (1.0 - b2 ** self.t)
            params[k] -= lr * m_hat / (np.sqrt(v_hat) + self.eps)


def _stack_samples(samples, normalizer):
    snaps = [standardize(s.snapshot, normalizer) for s in samples]
    labels = np.stack([standardize_label(s.label, normalizer) for s in samples])
    return _stack_standardized(snaps, labels)


def train(dataset, cfg):
    """Deterministic seeded training; returns the model and the per-epoch curve.

    The split, the weight init and every batch shuffle all derive from one
    seeded generator, so identical (dataset, cfg) reproduce bit-identical
    weights and losses. The normalizer is fitted on the training split only.
    """
    if not dataset:
        raise ValueError("empty dataset")
    n_total = len(dataset)
    if n_total < cfg.batch_size / (1.0 - cfg.val_fraction):
        raise ValueError(
            f"dataset of {n_total} too small for batch_size={cfg.batch_size} "
            f"at val_fraction={cfg.val_fraction}")

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    perm = rng.permutation(n_total)
    n_val = math.ceil(cfg.val_fraction * n_total)
    train_samples = [dataset[i] for i in perm[:n_total - n_val]]
    val_samples = [dataset[i] for i in perm[n_total - n_val:]]

    normalizer = Normalizer.fit(
        np.concatenate([np.asarray(s.snapshot.features) for s in train_samples]),
        np.stack([np.asarray(s.label) for s in train_samples]),
    )
    model = init_model(cfg.hidden, normalizer, rng,
                       seed=cfg.seed, train_config=asdict(cfg))

    tr_a, tr_ax, tr_y = _stack_samples(train_samples, normalizer)
    va_a, va_ax, va_y = _stack_samples(val_samples, normalizer)

    params = model.params()
    adam = _AdamState(params, cfg.beta1, cfg.beta2, cfg.eps)
    n_train = len(train_samples)
    curve = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n_train)
        running = 0.0
        for lo in range(0, n_train, cfg.batch_size):
            sel = order[lo:lo + cfg.batch_size]
            batch_mse, grads = _batch_loss_grads(
                params, tr_a[sel], tr_ax[sel], tr_y[sel])
            if not math.isfinite(batch_mse):
                raise NonFiniteLossError(epoch)
            adam.update(params, grads, cfg.learning_rate)
            running += batch_mse * len(sel)
        train_loss = running / n_train
        val_loss = _batch_loss(params, va_a, va_ax, va_y)
        if not math.isfinite(val_loss):
            raise NonFiniteLossError(epoch)
        curve.append((epoch, train_loss, val_loss))
    return model, curve


def evaluate(model, dataset):
    """Raw-unit error metrics, overall and stratified by the strongest node P.

    mse_overall averages squared error over all three destandardized outputs;
    position_rmse_m is the root mean squared planar distance to the true
    jammer; a_mae is the mean absolute decay-constant error. Strata with no
    samples are omitted from the buckets map.
    """
    if not dataset:
        raise ValueError("empty dataset")
    a_hat, ax, _ = _stack_samples(dataset, model.normalizer)
    yhat_std = _batch_forward(model.params(), a_hat, ax)[4]
    pred = destandardize_label(yhat_std, model.normalizer)
    labels = np.stack([np.asarray(s.label, dtype=float) for s in dataset])
    max_p = np.array([float(np.asarray(s.snapshot.features)[:, 4].max())
                      for s in dataset])

    def metrics(mask):
        p, y = pred[mask], labels[mask]
        pos_err2 = np.sum((p[:, :2] - y[:, :2]) ** 2, axis=1)
        return {
            "n": int(mask.sum()),
            "mse_overall": float(np.mean((p - y) ** 2)),
            "position_rmse_m": float(np.sqrt(pos_err2.mean())),
            "a_mae": float(np.abs(p[:, 2] - y[:, 2]).mean()),
        }

    report = metrics(np.ones(len(dataset), dtype=bool))
    report["buckets"] = {}
    for name, lo, hi in P_BUCKETS:
        mask = (max_p >= lo) & (max_p < hi)
        if mask.any():
            report["buckets"][name] = metrics(mask)
    return report


def save_model(model, path):
    """Single JSON document with architecture, normalizer, weights and provenance."""
    doc = {
        "arch": {"hidden": model.hidden, "layers": 2},
        "normalizer": model.normalizer.to_dict(),
        "weights": {name: getattr(model, name).tolist() for name in PARAM_NAMES},
        "seed": model.seed,
        "train_config": model.train_config,
    }
    with open(path, "w") as f:
        json.dump(doc, f)
        f.write("\n")


def load_model(path):
    with open(path) as f:
        doc = json.load(f)
    weights = doc["weights"]
    model = GcnModel(
        **{name: np.asarray(weights[name], dtype=float) for name in PARAM_NAMES},
        normalizer=Normalizer.from_dict(doc["normalizer"]),
        seed=int(doc.get("seed", 0)),
        train_config=dict(doc.get("train_config", {})),
    )
    if doc["arch"] != {"hidden": model.hidden, "layers": 2}:
        raise ValueError(f"unsupported architecture {doc['arch']}")
    return model
