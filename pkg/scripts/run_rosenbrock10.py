#!/usr/bin/env python3
"""Compare the surrogate loop against random search on the 10-D Rosenbrock
problem (3 integer + 7 continuous variables).

Writes one trace CSV per (algorithm, seed) pair plus a summary.csv with
per-iteration statistics. Defaults match the acceptance settings: 30 seeds
and a budget of 124 evaluations (24 initial samples + 100 iterations).

    python3 scripts/run_rosenbrock10.py --seeds 30 --output results/rosenbrock10
"""

import argparse
import sys

from mvrsm.cli import ExperimentConfig, run_experiment


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=30, help="run seeds 0..n-1 (default 30)")
    parser.add_argument("--budget", type=int, default=124, help="evaluations per run (default 124)")
    parser.add_argument(
        "--output", default="results/rosenbrock10", help="directory for traces and summary"
    )
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    config = ExperimentConfig(
        algorithms=("mvrsm", "rs"),
        budget=args.budget,
        seeds=tuple(range(args.seeds)),
        output_dir=args.output,
        benchmark="rosenbrock10",
    )
    result = run_experiment(config)
    return 2 if result["failures"] else 0


if __name__ == "__main__":
    sys.exit(main())
