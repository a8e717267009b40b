"""Command-line interface: gen-data, train, eval, simulate, plot."""

import argparse
import json
import os
import sys

from .config import (
    ConfigError,
    episode_config_from,
    jammer_from,
    load_config,
    ranges_from,
    swarm_config_from,
    train_config_from,
)
from .datagen import generate_dataset, load_dataset
from .episode import TrajectoryLog, episode_outcome, run_episode
from .figures import render_loss_curve, render_trajectory
from .gcn import NonFiniteLossError, evaluate, load_model, save_model, train

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NONFINITE = 4
EXIT_DISRUPTED = 5
EXIT_TIMEOUT = 6

_OUTCOME_EXIT = {"success": EXIT_OK, "disruption_failure": EXIT_DISRUPTED,
                 "timeout": EXIT_TIMEOUT}


def _emit(summary):
    # stdout carries exactly one machine-readable line; diagnostics go to stderr.
    print(json.dumps(summary))


def _load_input(loader, path, what):
    try:
        return loader(path)
    except (ValueError, KeyError) as e:
        raise _MalformedInput(f"malformed {what} {path}: {e}") from e


class _MalformedInput(RuntimeError):
    pass


def cmd_gen_data(args):
    cfg = load_config(args.config)
    generate_dataset(
        args.n, args.seed, args.out,
        ranges=ranges_from(cfg),
        swarm_cfg=swarm_config_from(cfg),
        policy=jammer_from(cfg)[1],
    )
    _emit({"command": "gen-data", "n": args.n, "seed": args.seed, "out": args.out})
    return EXIT_OK


def cmd_train(args):
    cfg = load_config(args.config)
    tcfg = train_config_from(
        cfg, epochs=args.epochs, batch_size=args.batch_size,
        learning_rate=args.lr, seed=args.seed, hidden=args.hidden)
    _, samples = _load_input(load_dataset, args.data, "dataset")
    model, curve = train(samples, tcfg)
    save_model(model, args.out_model)
    with open(args.loss_csv, "w") as f:
        f.write("epoch,train_loss,val_loss\n")
        for epoch, tr, va in curve:
            f.write(f"{epoch},{tr!r},{va!r}\n")
    final = curve[-1] if curve else (0, None, None)
    _emit({
        "command": "train", "epochs": tcfg.epochs, "seed": tcfg.seed,
        "final_train_loss": final[1], "final_val_loss": final[2],
        "model": args.out_model, "loss_csv": args.loss_csv,
    })
    return EXIT_OK


def cmd_eval(args):
    load_config(args.config)
    model = _load_input(load_model, args.model, "model")
    _, samples = _load_input(load_dataset, args.data, "dataset")
    report = evaluate(model, samples)
    with open(args.report, "w") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
    _emit({
        "command": "eval", "report": args.report, "n": report["n"],
        "mse_overall": report["mse_overall"],
        "position_rmse_m": report["position_rmse_m"],
        "a_mae": report["a_mae"],
        "buckets": sorted(report["buckets"]),
    })
    return EXIT_OK


def cmd_simulate(args):
    cfg = load_config(args.config)
    ecfg = episode_config_from(cfg, model_path=args.model, seed=args.seed)
    if ecfg.model_path is None:
        raise ConfigError("simulate needs --model or episode.model_path")
    model = _load_input(load_model, ecfg.model_path, "model")
    log = run_episode(ecfg, model=model)
    log.write_jsonl(args.out_traj)
    summary = episode_outcome(log)
    _emit({
        "command": "simulate", "outcome": summary.outcome,
        "t_final": summary.t_final, "min_margin": summary.min_margin,
        "final_connected": summary.final_connected, "traj": args.out_traj,
    })
    return _OUTCOME_EXIT[summary.outcome]


def cmd_plot(args):
    load_config(args.config)
    log = _load_input(TrajectoryLog.read_jsonl, args.traj, "trajectory log")
    try:
        paths = render_trajectory(log, args.out_dir, args.snapshot_every)
    except ValueError as e:
        raise _MalformedInput(str(e)) from e
    loss_path = None
    if args.loss_csv is not None:
        loss_path = os.path.join(args.out_dir, "loss_curve.svg")
        try:
            render_loss_curve(args.loss_csv, loss_path)
        except ValueError as e:
            raise _MalformedInput(str(e)) from e
    _emit({
        "command": "plot", "snapshots": len(paths), "out_dir": args.out_dir,
        "loss_curve": loss_path,
    })
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="jamnav",
        description="UAV swarm anti-jamming: dataset generation, model training, "
                    "closed-loop simulation and plotting.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a labeled JSONL dataset")
    p.add_argument("--n", type=int, required=True, help="number of samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="run config JSON")
    p.add_argument("--out", required=True, help="output JSONL path")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train the jammer predictor")
    p.add_argument("--data", required=True, help="dataset JSONL")
    p.add_argument("--out-model", required=True, help="model JSON path")
    p.add_argument("--loss-csv", required=True, help="per-epoch loss CSV path")
    p.add_argument("--config")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float, dest="lr")
    p.add_argument("--seed", type=int)
    p.add_argument("--hidden", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report", required=True, help="metrics JSON path")
    p.add_argument("--config")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="run one closed-loop mission")
    p.add_argument("--model", help="model JSON (overrides episode.model_path)")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out-traj", required=True, help="trajectory JSONL path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plot", help="render mission snapshots (and loss curve) as SVG")
    p.add_argument("--traj", required=True, help="trajectory JSONL")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--snapshot-every", type=float, default=10.0,
                   help="seconds between snapshots (default 10)")
    p.add_argument("--loss-csv", help="also render this loss CSV")
    p.add_argument("--config")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFiniteLossError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NONFINITE
    except _MalformedInput as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
