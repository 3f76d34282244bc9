"""Experiment harness and command line interface.

Subcommands:

``run <config.json>``
    Run every (algorithm, seed) pair from the config, write one trace CSV
    per run plus a summary CSV. The MVRSM_OUTPUT_DIR environment variable
    overrides the config's output_dir.
``summarize <dir>``
    Recompute the summary from the trace files already in a directory.

The config is a JSON object; see ``ExperimentConfig`` for the fields.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .boxmin import BoxMinConfig
from .driver import (
    OptimizerConfig,
    read_trace_csv,
    run_mvrsm,
    run_random_search,
)
from .errors import (
    ConfigError,
    LengthMismatchError,
    MvrsmError,
    ObjectiveFailureError,
)
from .objectives import (
    DEFAULT_NOISE_HIGH,
    BENCHMARKS,
    NoisyObjective,
    ackley,
    make_benchmark,
    rosenbrock,
)
from .space import SearchSpace, VariableSpec

__all__ = ["ExperimentConfig", "load_config", "run_experiment", "summarize_directory", "main"]

OUTPUT_DIR_ENV = "MVRSM_OUTPUT_DIR"
NOISE_STREAM_TAG = 0x5EED  # separates the objective's noise stream from the driver's
ALGORITHMS = {"mvrsm": run_mvrsm, "rs": run_random_search}
RAW_OBJECTIVES = {"ackley": ackley, "rosenbrock": rosenbrock}

SUMMARY_COLUMNS = [
    "iter",
    "algo",
    "mean_best",
    "std_best",
    "min_best",
    "max_best",
    "mean_step_seconds",
]


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description.

    Either ``benchmark`` names a registered problem, or ``space`` (list of
    {kind, lower, upper} records) plus ``objective`` ({name, scale?}) define
    a custom one.
    """

    algorithms: tuple[str, ...]
    budget: int
    seeds: tuple[int, ...]
    output_dir: str
    benchmark: str | None = None
    space: SearchSpace | None = None
    objective: dict | None = None
    init_samples: int = 24
    noise_high: float = DEFAULT_NOISE_HIGH
    boxmin_max_iters: int = 20


def load_config(path) -> ExperimentConfig:
    """Parse and validate a JSON config file; errors carry file positions."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return _validate_config(raw, str(path))


def _fail(where: str, message: str):
    raise ConfigError(f"{where}: {message}")


def _validate_config(raw: dict, where: str) -> ExperimentConfig:
    known = {
        "benchmark",
        "space",
        "objective",
        "algorithms",
        "budget",
        "init_samples",
        "seeds",
        "output_dir",
        "noise",
        "boxmin_max_iters",
    }
    for key in raw:
        if key not in known:
            _fail(where, f"unknown key {key!r}")

    benchmark = raw.get("benchmark")
    space = None
    objective = None
    if benchmark is not None:
        if benchmark not in BENCHMARKS:
            _fail(where, f"unknown benchmark {benchmark!r}; available: {sorted(BENCHMARKS)}")
        if "space" in raw or "objective" in raw:
            _fail(where, "give either 'benchmark' or 'space'+'objective', not both")
    else:
        if "space" not in raw or "objective" not in raw:
            _fail(where, "need 'benchmark', or 'space' together with 'objective'")
        space = _parse_space(raw["space"], where)
        objective = _parse_objective(raw["objective"], where)

    algorithms = raw.get("algorithms", ["mvrsm", "rs"])
    if not isinstance(algorithms, list) or not algorithms:
        _fail(where, "'algorithms' must be a non-empty list")
    for algo in algorithms:
        if algo not in ALGORITHMS:
            _fail(where, f"unknown algorithm {algo!r}; available: {sorted(ALGORITHMS)}")

    budget = raw.get("budget")
    if not isinstance(budget, int) or budget < 1:
        _fail(where, "'budget' must be a positive integer")
    init_samples = raw.get("init_samples", 24)
    if not isinstance(init_samples, int) or init_samples < 1:
        _fail(where, "'init_samples' must be a positive integer")
    if budget < init_samples:
        _fail(where, f"budget {budget} is smaller than init_samples {init_samples}")

    seeds = raw.get("seeds")
    if not isinstance(seeds, list) or not seeds or not all(isinstance(s, int) for s in seeds):
        _fail(where, "'seeds' must be a non-empty list of integers")
    if len(set(seeds)) != len(seeds):
        _fail(where, "'seeds' must not repeat")

    output_dir = raw.get("output_dir")
    if not isinstance(output_dir, str) or not output_dir:
        _fail(where, "'output_dir' must be a non-empty string")

    noise = raw.get("noise", DEFAULT_NOISE_HIGH)
    if not isinstance(noise, (int, float)) or noise < 0:
        _fail(where, "'noise' must be a number >= 0")

    boxmin_max_iters = raw.get("boxmin_max_iters", 20)
    if not isinstance(boxmin_max_iters, int) or boxmin_max_iters < 1:
        _fail(where, "'boxmin_max_iters' must be a positive integer")

    return ExperimentConfig(
        algorithms=tuple(algorithms),
        budget=budget,
        seeds=tuple(seeds),
        output_dir=output_dir,
        benchmark=benchmark,
        space=space,
        objective=objective,
        init_samples=init_samples,
        noise_high=float(noise),
        boxmin_max_iters=boxmin_max_iters,
    )


def _parse_space(entries, where: str) -> SearchSpace:
    if not isinstance(entries, list) or not entries:
        _fail(where, "'space' must be a non-empty list of {kind, lower, upper} records")
    specs = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or set(entry) != {"kind", "lower", "upper"}:
            _fail(where, f"space[{i}]: need exactly the keys kind, lower, upper")
        specs.append(VariableSpec(entry["kind"], entry["lower"], entry["upper"]))
    try:
        return SearchSpace(tuple(specs))
    except MvrsmError as exc:
        raise ConfigError(f"{where}: invalid space: {exc}") from exc


def _parse_objective(entry, where: str) -> dict:
    if not isinstance(entry, dict) or "name" not in entry:
        _fail(where, "'objective' must be an object with a 'name'")
    if entry["name"] not in RAW_OBJECTIVES:
        _fail(where, f"unknown objective {entry['name']!r}; available: {sorted(RAW_OBJECTIVES)}")
    extra = set(entry) - {"name", "scale"}
    if extra:
        _fail(where, f"'objective' has unknown keys {sorted(extra)}")
    scale = entry.get("scale", 1.0)
    if not isinstance(scale, (int, float)) or scale <= 0:
        _fail(where, "'objective.scale' must be a positive number")
    return {"name": entry["name"], "scale": float(scale)}


# -- running -------------------------------------------------------------------


def _problem(config: ExperimentConfig, seed: int):
    """Fresh (space, objective) pair for one run; the noise stream is seeded
    from the run seed so reruns of the same config are reproducible."""
    noise_rng = np.random.default_rng([seed, NOISE_STREAM_TAG])
    if config.benchmark is not None:
        return make_benchmark(config.benchmark, rng=noise_rng, noise_high=config.noise_high)
    space = config.space
    name, scale = config.objective["name"], config.objective["scale"]
    if name == "ackley":
        base = lambda p: ackley(space.declared_values(p))
    else:
        base = lambda p: rosenbrock(space.declared_values(p), scale=scale)
    return space, NoisyObjective(base, rng=noise_rng, noise_high=config.noise_high)


def _atomic_write(path: Path, write_fn) -> None:
    """Write via a temp file in the same directory, then rename into place."""
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    os.close(fd)
    try:
        write_fn(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_experiment(config: ExperimentConfig, out=None) -> dict:
    """Execute all (algorithm, seed) runs, write traces and a summary.

    A run whose objective fails is recorded and skipped; the other runs
    still execute. Returns {'traces': paths, 'summary': path, 'failures': [...]}.
    """
    out = sys.stdout if out is None else out
    out_dir = Path(os.environ.get(OUTPUT_DIR_ENV) or config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    trace_paths: list[Path] = []
    failures: list[dict] = []
    for algo in config.algorithms:
        for seed in config.seeds:
            space, objective = _problem(config, seed)
            run_config = OptimizerConfig(
                budget=config.budget,
                init_samples=config.init_samples,
                rng_seed=seed,
                boxmin=BoxMinConfig(max_iters=config.boxmin_max_iters),
            )
            path = out_dir / f"{algo}_seed{seed}.csv"
            try:
                trace = ALGORITHMS[algo](objective, space, run_config)
            except ObjectiveFailureError as exc:
                failures.append({"algo": algo, "seed": seed, "error": str(exc)})
                print(f"FAILED {algo} seed {seed}: {exc}", file=out)
                continue
            _atomic_write(path, trace.write_csv)
            trace_paths.append(path)
            print(f"wrote {path} (final best {trace.records[-1].best_y:.6g})", file=out)

    summary_path = out_dir / "summary.csv"
    # header-only summary when every run failed; the failures are the result
    rows = _summary_rows(trace_paths) if trace_paths else []
    _atomic_write(summary_path, lambda tmp: _write_summary(tmp, rows))
    print(f"wrote {summary_path}", file=out)
    return {"traces": trace_paths, "summary": summary_path, "failures": failures}


def _summary_rows(trace_paths) -> list[dict]:
    """Per-iteration best-so-far statistics per algorithm, plus mean step time."""
    by_algo: dict[str, list[dict]] = {}
    for path in trace_paths:
        name = Path(path).name
        if "_seed" not in name:
            raise LengthMismatchError(f"trace file name {name!r} lacks an '_seed' tag")
        by_algo.setdefault(name.split("_seed")[0], []).append(read_trace_csv(path))
    if not by_algo:
        raise LengthMismatchError("no trace files to summarize")

    rows: list[dict] = []
    for algo in sorted(by_algo):
        traces = by_algo[algo]
        lengths = {len(t["best_y"]) for t in traces}
        if len(lengths) != 1:
            raise LengthMismatchError(f"{algo}: unequal trace lengths {sorted(lengths)}")
        best = np.stack([t["best_y"] for t in traces])  # runs x iters
        steps = np.stack([t["step_seconds"] for t in traces])
        n = best.shape[0]
        # sample standard deviation (n-1); a single run has no spread
        std = np.std(best, axis=0, ddof=1) if n > 1 else np.zeros(best.shape[1])
        for i in range(best.shape[1]):
            rows.append(
                {
                    "iter": i + 1,
                    "algo": algo,
                    "mean_best": float(np.mean(best[:, i])),
                    "std_best": float(std[i]),
                    "min_best": float(np.min(best[:, i])),
                    "max_best": float(np.max(best[:, i])),
                    "mean_step_seconds": float(np.mean(steps[:, i])),
                }
            )
    return rows


def _write_summary(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def summarize_directory(directory, out=None) -> Path:
    """Rebuild summary.csv from the trace CSVs found in ``directory``."""
    out = sys.stdout if out is None else out
    directory = Path(directory)
    traces = sorted(p for p in directory.glob("*_seed*.csv"))
    rows = _summary_rows(traces)
    summary_path = directory / "summary.csv"
    _atomic_write(summary_path, lambda tmp: _write_summary(tmp, rows))
    print(f"wrote {summary_path}", file=out)
    return summary_path


# -- entry point ---------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mvrsm", description="mixed-variable surrogate optimization experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_parser = sub.add_parser("run", help="run the experiment described by a config file")
    run_parser.add_argument("config", help="path to a JSON config")
    sum_parser = sub.add_parser("summarize", help="recompute summary.csv for a directory")
    sum_parser.add_argument("directory", help="directory holding *_seed*.csv traces")
    args = parser.parse_args(argv)

    try:
        if args.command == "run":
            result = run_experiment(load_config(args.config))
            return 2 if result["failures"] else 0
        summarize_directory(args.directory)
        return 0
    except (ConfigError, LengthMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
