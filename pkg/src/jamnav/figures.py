"""Matplotlib rendering of mission snapshots and training curves to SVG files."""

import csv
import math
import os

from matplotlib.figure import Figure
from matplotlib.lines import Line2D
from matplotlib.patches import Circle

P_CONTOUR_LEVELS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
UAV_DOT_RADIUS = 1.2
SCENE_PAD = 10.0


def _contour_radius(p, k, a):
    if p >= k:
        return None
    return math.log(p / k) / math.log(a)


def scene_bounds(log):
    """Fixed axis box covering every UAV position, the target, and the jamming field."""
    xs, ys = [], []
    for tick in log.ticks:
        for uav in tick["uavs"]:
            xs.append(uav["pos"][0])
            ys.append(uav["pos"][1])
    jam = log.config["jammer"]
    k, a = jam["k"], jam["decay_a"]
    reach = max((_contour_radius(p, k, a) or 0.0) for p in P_CONTOUR_LEVELS)
    xs += [jam["pos_x"] - reach, jam["pos_x"] + reach]
    ys += [jam["pos_y"] - reach, jam["pos_y"] + reach]
    tx, ty = log.config["physics"]["target"]
    xs.append(tx)
    ys.append(ty)
    return (min(xs) - SCENE_PAD, max(xs) + SCENE_PAD,
            min(ys) - SCENE_PAD, max(ys) + SCENE_PAD)


def render_scene(tick, config, out_path, bounds):
    """One mission snapshot as SVG.

    Elements carry stable gid attributes so downstream checks can count them:
    p-contour-*, true-disk, pred-circle, comm-link-i-j, uav-marker-i,
    target-marker.
    """
    fig = Figure(figsize=(7.0, 7.0))
    ax = fig.add_subplot(1, 1, 1)
    jam = config["jammer"]
    true = tick["true"]

    for p in P_CONTOUR_LEVELS:
        r = _contour_radius(p, jam["k"], jam["decay_a"])
        if r is None or r <= 0.0:
            continue
        ring = Circle((true["xj"], true["yj"]), r, fill=False,
                      edgecolor="black", linewidth=0.6, alpha=0.5)
        ring.set_gid(f"p-contour-{p:g}")
        ax.add_patch(ring)

    disk = Circle((true["xj"], true["yj"]), true["r_tau"],
                  facecolor="black", edgecolor="black")
    disk.set_gid("true-disk")
    ax.add_patch(disk)

    pred = tick["pred"]
    pred_ring = Circle((pred["xj"], pred["yj"]), pred["r_tau"], fill=False,
                       edgecolor="red", linewidth=1.4)
    pred_ring.set_gid("pred-circle")
    ax.add_patch(pred_ring)

    uavs = tick["uavs"]
    for i, j in tick["edges"]:
        link = Line2D([uavs[i]["pos"][0], uavs[j]["pos"][0]],
                      [uavs[i]["pos"][1], uavs[j]["pos"][1]],
                      color="blue", linewidth=0.9)
        link.set_gid(f"comm-link-{i}-{j}")
        ax.add_line(link)

    for i, uav in enumerate(uavs):
        dot = Circle(tuple(uav["pos"]), UAV_DOT_RADIUS,
                     facecolor="dimgray" if uav["disrupted"] else "red",
                     edgecolor="none")
        dot.set_gid(f"uav-marker-{i}")
        ax.add_patch(dot)

    tx, ty = config["physics"]["target"]
    goal = Circle((tx, ty), config["physics"]["arrive_radius"], fill=False,
                  edgecolor="green", linewidth=1.4)
    goal.set_gid("target-marker")
    ax.add_patch(goal)

    ax.set_xlim(bounds[0], bounds[1])
    ax.set_ylim(bounds[2], bounds[3])
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title(f"t = {tick['t']:.1f} s" + ("  (danger)" if tick["danger"] else ""))
    fig.savefig(out_path, format="svg")


def select_snapshot_ticks(log, snapshot_every):
    """Tick records whose time is a whole multiple of the snapshot interval."""
    chosen = []
    for tick in log.ticks:
        ratio = tick["t"] / snapshot_every
        if abs(ratio - round(ratio)) < 1e-6:
            chosen.append(tick)
    return chosen


def render_trajectory(log, out_dir, snapshot_every=10.0):
    """Write one scene SVG per snapshot interval; returns the file paths."""
    if not log.ticks:
        raise ValueError("trajectory log has no tick records")
    if snapshot_every <= 0.0:
        raise ValueError("snapshot interval must be positive")
    os.makedirs(out_dir, exist_ok=True)
    bounds = scene_bounds(log)
    paths = []
    for idx, tick in enumerate(select_snapshot_ticks(log, snapshot_every)):
        path = os.path.join(out_dir, f"snapshot_{idx:03d}.svg")
        render_scene(tick, log.config, path, bounds)
        paths.append(path)
    return paths


def render_loss_curve(csv_path, out_path):
    """Training/validation loss curves from the train command's CSV."""
    epochs, train_loss, val_loss = [], [], []
    with open(csv_path) as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != ["epoch", "train_loss", "val_loss"]:
            raise ValueError(f"unexpected loss CSV header: {reader.fieldnames}")
        for row in reader:
            epochs.append(int(row["epoch"]))
            train_loss.append(float(row["train_loss"]))
            val_loss.append(float(row["val_loss"]))

    fig = Figure(figsize=(7.0, 4.5))
    ax = fig.add_subplot(1, 1, 1)
    tl, = ax.plot(epochs, train_loss, color="tab:blue", label="training")
    tl.set_gid("train-loss-line")
    vl, = ax.plot(epochs, val_loss, color="tab:orange", label="validation")
    vl.set_gid("val-loss-line")
    if train_loss and min(min(train_loss), min(val_loss)) > 0.0:
        ax.set_yscale("log")
    ax.set_xlabel("epoch")
    ax.set_ylabel("loss (standardized MSE)")
    ax.legend()
    fig.savefig(out_path, format="svg")
    return out_path
