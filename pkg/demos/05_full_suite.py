"""Measure success rates across every bundled task.

Trains and tests each of the four presets over a range of seeds and
prints the per-task tallies. Ten seeds reproduces the release numbers
and takes about seven minutes; the default two seeds gives a quick
taste.
"""

import argparse
from pathlib import Path

from softmanip import run_suite


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=2,
                        help="seeds per task (10 for the release numbers)")
    parser.add_argument("--out", default="demo_output/full_suite")
    args = parser.parse_args()

    print(f"running 4 tasks x {args.seeds} seeds; this trains "
          f"{4 * args.seeds} policies from scratch...")
    results = run_suite(Path(args.out), seeds=args.seeds)

    print("\nper-run outcomes:")
    for r in results:
        if r.error is not None:
            line = f"aborted ({r.error})"
        else:
            line = (f"{r.final_error_px:7.2f} px "
                    f"{'success' if r.success else 'missed '}")
        print(f"  {r.scenario} seed {r.seed}: {line}  [{r.wall_seconds:.1f} s]")

    print("\nper-task tallies:")
    for name in ("c1", "c2", "c3", "c4"):
        rows = [r for r in results if r.scenario == name]
        print(f"  {name}: {sum(r.success for r in rows)}/{len(rows)} seeds reached the goal")
    print(f"\nartifacts and summary.csv under {args.out}")


if __name__ == "__main__":
    main()
