"""Optimization driver: run loops, ask/tell session, and run traces.

One iteration of the surrogate loop is: evaluate the objective at the
current point, fold the observation into the least squares fit, descend the
surrogate from the best point seen so far (optionally from the just-evaluated
point), round the integer block, and perturb the result to get the next point.
The first ``init_samples`` evaluations are uniform draws that only feed the
fit; the loop then starts from the best of them.

Per-iteration ``step_seconds`` measures the algorithm's own work and never
includes objective evaluation time.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .boxmin import BoxMinConfig, minimize
from .errors import ObjectiveFailureError, ProtocolViolationError
from .explore import perturb_continuous, perturb_integer
from .space import MixedPoint, SearchSpace
from .surrogate import build_surrogate

__all__ = [
    "OptimizerConfig",
    "TraceRecord",
    "RunTrace",
    "MvrsmOptimizer",
    "run_mvrsm",
    "run_random_search",
    "read_trace_csv",
]

Objective = Callable[[MixedPoint], float]


@dataclass(frozen=True)
class OptimizerConfig:
    budget: int
    init_samples: int = 24
    rng_seed: int = 0
    boxmin: BoxMinConfig = BoxMinConfig()
    descent_start: Literal["current", "best"] = "best"

    def __post_init__(self):
        if self.init_samples < 1:
            raise ValueError(f"init_samples must be >= 1, got {self.init_samples}")
        if self.budget < self.init_samples:
            raise ValueError(
                f"budget {self.budget} is smaller than init_samples {self.init_samples}"
            )
        if self.descent_start not in ("current", "best"):
            raise ValueError(f"unknown descent_start {self.descent_start!r}")


@dataclass(frozen=True, eq=False)
class TraceRecord:
    index: int  # 1-based evaluation number
    point: MixedPoint
    y: float
    best_y: float
    best_point: MixedPoint
    step_seconds: float


@dataclass
class RunTrace:
    records: list[TraceRecord] = field(default_factory=list)
    aborted: bool = False

    def __len__(self) -> int:
        return len(self.records)

    def best_y_curve(self) -> np.ndarray:
        return np.array([r.best_y for r in self.records])

    def y_values(self) -> np.ndarray:
        return np.array([r.y for r in self.records])

    def step_seconds(self) -> np.ndarray:
        return np.array([r.step_seconds for r in self.records])

    # -- export ------------------------------------------------------------

    def write_csv(self, path) -> None:
        """Columns: iter, y, best_y, step_seconds, then the flattened
        coordinates (continuous block xc*, then integer block xd*)."""
        if not self.records:
            raise ValueError("refusing to write an empty trace")
        first = self.records[0].point
        header = (
            ["iter", "y", "best_y", "step_seconds"]
            + [f"xc{i}" for i in range(len(first.xc))]
            + [f"xd{i}" for i in range(len(first.xd))]
        )
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for r in self.records:
                writer.writerow(
                    [r.index, repr(r.y), repr(r.best_y), repr(r.step_seconds)]
                    + [repr(float(v)) for v in r.point.flatten()]
                )

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    def to_dict(self) -> dict:
        return {
            "aborted": self.aborted,
            "records": [
                {
                    "iter": r.index,
                    "y": r.y,
                    "best_y": r.best_y,
                    "step_seconds": r.step_seconds,
                    "xc": r.point.xc.tolist(),
                    "xd": r.point.xd.tolist(),
                    "best_xc": r.best_point.xc.tolist(),
                    "best_xd": r.best_point.xd.tolist(),
                }
                for r in self.records
            ],
        }


def read_trace_csv(path) -> dict[str, np.ndarray]:
    """Load a trace CSV into arrays: iter, y, best_y, step_seconds, coords."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in row] for row in body])
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValueError(f"malformed trace file {path}")
    return {
        "iter": data[:, 0].astype(int),
        "y": data[:, 1],
        "best_y": data[:, 2],
        "step_seconds": data[:, 3],
        "coords": data[:, 4:],
    }


class MvrsmOptimizer:
    """Ask/tell interface to the surrogate loop.

    ``ask`` proposes the next point to evaluate; ``tell`` feeds the observed
    value back and advances the model. Strict alternation is enforced. A
    plain loop over ask/evaluate/tell reproduces ``run_mvrsm`` exactly for
    the same seed, because ``run_mvrsm`` is that loop.
    """

    def __init__(self, space: SearchSpace, config: OptimizerConfig):
        self.space = space
        self.config = config
        self._rng = np.random.default_rng(config.rng_seed)
        self.model = build_surrogate(space, self._rng)
        self.trace = RunTrace()
        self._pending: MixedPoint | None = None
        self._told = 0
        self._ask_seconds = 0.0
        self._current: MixedPoint | None = None
        self._best_y = np.inf
        self._best_point: MixedPoint | None = None

    def ask(self) -> MixedPoint:
        if self._pending is not None:
            raise ProtocolViolationError("ask() called again before tell()")
        tic = time.perf_counter()
        if self._told < self.config.init_samples:
            point = self.space.uniform_sample(self._rng)
        else:
            point = self._current
        self._ask_seconds = time.perf_counter() - tic
        self._pending = point
        return point

    def tell(self, point: MixedPoint, y: float) -> None:
        if self._pending is None:
            raise ProtocolViolationError("tell() called without a pending ask()")
        y = float(y)
        tic = time.perf_counter()

        self.model.rls.update(self.model.features(point.flatten()), y)
        if y < self._best_y:
            self._best_y = y
            self._best_point = point

        index = self._told + 1
        if index == self.config.init_samples:
            self._current = self._best_point
        elif index > self.config.init_samples:
            start = point if self.config.descent_start == "current" else self._best_point
            result = minimize(self.model, self.space, start, self.config.boxmin)
            proposal = self.space.project(result.point)
            self._current = MixedPoint(
                perturb_continuous(self.space, proposal.xc, self._rng),
                perturb_integer(self.space, proposal.xd, self._rng),
            )

        step = time.perf_counter() - tic + self._ask_seconds
        self.trace.records.append(
            TraceRecord(index, point, y, self._best_y, self._best_point, step)
        )
        self._told = index
        self._pending = None
        self._ask_seconds = 0.0


def run_mvrsm(objective: Objective, space: SearchSpace, config: OptimizerConfig) -> RunTrace:
    """Run the surrogate loop for ``config.budget`` evaluations."""
    optimizer = MvrsmOptimizer(space, config)
    _drive(optimizer.ask, optimizer.tell, optimizer.trace, objective, config.budget)
    return optimizer.trace


def run_random_search(
    objective: Objective, space: SearchSpace, config: OptimizerConfig
) -> RunTrace:
    """Baseline: ``config.budget`` independent uniform draws."""
    rng = np.random.default_rng(config.rng_seed)
    trace = RunTrace()
    best_y = np.inf
    best_point = None
    for index in range(1, config.budget + 1):
        tic = time.perf_counter()
        point = space.uniform_sample(rng)
        step = time.perf_counter() - tic
        y = _evaluate(objective, point, trace)
        tic = time.perf_counter()
        if y < best_y:
            best_y, best_point = y, point
        trace.records.append(
            TraceRecord(index, point, y, best_y, best_point, step + time.perf_counter() - tic)
        )
    return trace


def _drive(ask, tell, trace, objective, budget: int) -> None:
    for _ in range(budget):
        point = ask()
        y = _evaluate(objective, point, trace)
        tell(point, y)


def _evaluate(objective: Objective, point: MixedPoint, trace: RunTrace) -> float:
    try:
        y = float(objective(point))
    except Exception as exc:
        trace.aborted = True
        raise ObjectiveFailureError(f"objective raised: {exc}", trace=trace) from exc
    if not np.isfinite(y):
        trace.aborted = True
        raise ObjectiveFailureError(f"objective returned non-finite value {y!r}", trace=trace)
    return y
