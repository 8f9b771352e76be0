"""Command line interface.

Subcommands: train, test, suite, render. Scenarios are given as preset
names (c1..c4, default) or paths to JSON scenario files. Log verbosity
comes from the SOFTMANIP_LOG environment variable (debug, info, warning,
error; default info).
"""

import argparse
import logging
import os
import sys

from .errors import ConfigurationError, PolicyFileError, TrainingDiverged
from .harness import run_render, run_suite, run_test, run_train
from .scenario import PRESET_NAMES, load_scenario


def _configure_logging():
    level_name = os.environ.get("SOFTMANIP_LOG", "info").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        print(f"unknown SOFTMANIP_LOG level {level_name!r}, using INFO", file=sys.stderr)
        level = logging.INFO
    logging.basicConfig(level=level,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="softmanip",
        description="Train and evaluate a visual-servo Q-learning agent "
                    "on a simulated deformable sheet.")
    sub = parser.add_subparsers(dest="command", required=True)

    scenario_help = f"preset name ({', '.join(PRESET_NAMES)}) or scenario JSON path"

    p = sub.add_parser("train", help="train a policy on one scenario")
    p.add_argument("--scenario", required=True, help=scenario_help)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("test", help="greedy rollout of a stored policy")
    p.add_argument("--scenario", required=True, help=scenario_help)
    p.add_argument("--policy", required=True, help="policy file from train")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--dump-frames", action="store_true",
                   help="write one PPM frame per action")

    p = sub.add_parser("suite", help="train and test all presets across seeds")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seeds", type=int, default=10, help="seeds per scenario (default 10)")

    p = sub.add_parser("render", help="render a scenario's initial scene")
    p.add_argument("--scenario", required=True, help=scenario_help)
    p.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv=None) -> int:
    _configure_logging()
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "train":
            arts = run_train(load_scenario(args.scenario), args.out)
            print(f"policy: {arts.policy_file}")
            print(f"logs:   {arts.training_csv}, {arts.episodes_csv}")
        elif args.command == "test":
            arts = run_test(load_scenario(args.scenario), args.policy,
                            args.out, dump_frames=args.dump_frames)
            print(f"error curve: {arts.testing_csv}")
            if arts.frames_dir is not None:
                print(f"frames:      {arts.frames_dir}")
        elif args.command == "suite":
            if args.seeds < 1:
                raise ConfigurationError("--seeds must be at least 1")
            results = run_suite(args.out, seeds=args.seeds)
            for name in dict.fromkeys(r.scenario for r in results):
                rows = [r for r in results if r.scenario == name]
                wins = sum(r.success for r in rows)
                print(f"{name}: {wins}/{len(rows)} successful seeds")
            print(f"summary: {args.out}/summary.csv")
        elif args.command == "render":
            path = run_render(load_scenario(args.scenario), args.out)
            print(f"frame: {path}")
    except (ConfigurationError, PolicyFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TrainingDiverged as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
