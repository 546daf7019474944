"""Command-line entry point: train / eval / sweep / report."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .harness import eval_checkpoint, report_runs, sweep, train, write_report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gems", description="population-based game solver experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run a config across seeds")
    p_train.add_argument("--config", required=True)
    p_train.add_argument("--seeds", default=None, help='overrides config, e.g. "0..4" or "0,2,5"')
    p_train.add_argument("--out", default=None)
    p_train.add_argument("--solver", default=None, choices=["gems", "psro", "double_oracle"])
    p_train.add_argument("--iters", type=int, default=None)

    p_eval = sub.add_parser("eval", help="recompute metrics from a checkpoint")
    p_eval.add_argument("--checkpoint", required=True)

    p_sweep = sub.add_parser("sweep", help="grid over the config's sweep keys")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--seeds", default=None)
    p_sweep.add_argument("--out", default=None)

    p_report = sub.add_parser("report", help="aggregate per-seed CSVs (mean +- std, *_last, *_auc)")
    p_report.add_argument("--dir", required=True, help="directory containing seed*.csv files")
    return parser


def _apply_overrides(cfg, args):
    updates = {}
    if getattr(args, "seeds", None) is not None:
        updates["seeds"] = args.seeds
    if getattr(args, "out", None) is not None:
        updates["out"] = args.out
    if getattr(args, "solver", None) is not None:
        updates["solver"] = args.solver
    if getattr(args, "iters", None) is not None:
        updates["iterations"] = args.iters
    return cfg.override(**updates) if updates else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            cfg = _apply_overrides(load_config(args.config), args)
            paths = train(cfg, cfg.out)
            for p in paths:
                print(p)
            print(f"wrote {len(paths)} seed CSVs + aggregate to {cfg.out}")
            return 0
        if args.command == "eval":
            result = eval_checkpoint(args.checkpoint)
            print(json.dumps(result))
            return 0 if result["match"] else 1
        if args.command == "sweep":
            cfg = _apply_overrides(load_config(args.config), args)
            written = sweep(cfg, cfg.out)
            for p in written:
                print(p)
            return 0
        if args.command == "report":
            run_dir = Path(args.dir)
            paths = sorted(run_dir.glob("seed*.csv"))
            if not paths:
                print(f"no seed*.csv files under {run_dir}", file=sys.stderr)
                return 1
            result = report_runs(paths)
            write_report(result, run_dir)
            for key, stat in result["summary"].items():
                print(f"{key}: {stat['mean']:.6f} +- {stat['std']:.6f}")
            print(f"report written to {run_dir / 'report.json'}")
            return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
