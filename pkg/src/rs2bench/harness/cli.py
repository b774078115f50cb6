"""Command line: ``rs2bench run ...`` and ``rs2bench oracle --task pyramid``."""

from __future__ import annotations

import argparse
import logging
import sys

from rs2bench.envs import reach_table
from rs2bench.harness.config import METHODS, TASKS, ConfigError, parse_config
from rs2bench.harness.metrics import greedy_window_average
from rs2bench.harness.runner import run_all


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rs2bench")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train one method on one task over several seeds")
    run.add_argument("--config", help="key = value file; flags override it")
    run.add_argument("--task", choices=TASKS)
    run.add_argument("--method", choices=METHODS)
    run.add_argument("--episodes", type=int)
    run.add_argument("--seeds", help="comma-separated, e.g. 0,1,2")
    run.add_argument("--aleph-g", type=float, dest="aleph_g")
    run.add_argument("--goal", help="easy, hard, or explicit x,y (pyramid only)")
    run.add_argument("--out", help="output directory for CSV files")
    run.add_argument("--jobs", type=int, help="worker processes for seeds")
    run.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override any other config key, repeatable",
    )
    run.add_argument("-v", "--verbose", action="store_true")

    oracle = sub.add_parser("oracle", help="print the exact random-reach table")
    oracle.add_argument("--task", choices=("pyramid",), required=True)
    oracle.add_argument("--depth", type=int, default=6)
    return parser


def _cmd_run(args) -> int:
    overrides = {
        k: getattr(args, k)
        for k in ("task", "method", "episodes", "seeds", "aleph_g", "goal", "out", "jobs")
    }
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    cfg = parse_config(args.config, overrides)
    results = run_all(cfg)
    for r in results:
        avgs = greedy_window_average(r.metrics, cfg.eval_episodes, cfg.eval_window)
        last = f"{avgs[-1][1]:.3f}" if avgs else "n/a"
        print(f"seed {r.seed}: {len(r.metrics)} episodes, greedy avg {last}")
    if cfg.out:
        print(f"wrote CSV files to {cfg.out}")
    return 0


def _cmd_oracle(args) -> int:
    table = reach_table(args.depth, 2)
    size = args.depth + 1
    print("random-reach probability of each terminal (row x, column y)")
    for x in range(size):
        print(" ".join(f"{float(table[(x, y)]):.12f}" for y in range(size)))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_oracle(args)
    except (ConfigError, OSError, ValueError, RuntimeError) as exc:
        print(f"rs2bench: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
