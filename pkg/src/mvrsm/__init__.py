"""Surrogate-based optimization of expensive noisy objectives over mixed
continuous/integer domains.

The model is a piecewise-linear sum of rectified affine units built so that
its strict local minima take exact integer values in the integer variables;
coefficients are fitted online by recursive least squares, candidate points
come from box-constrained descent on the model followed by a randomized
exploration step.
"""

from .boxmin import BoxMinConfig, BoxMinResult, minimize
from .driver import (
    MvrsmOptimizer,
    OptimizerConfig,
    RunTrace,
    TraceRecord,
    run_mvrsm,
    run_random_search,
)
from .errors import MvrsmError
from .objectives import NoisyObjective, ackley, make_benchmark, rosenbrock
from .space import MixedPoint, SearchSpace, VariableSpec
from .surrogate import (
    AffineUnit,
    ReluSurrogate,
    build_surrogate,
    enumerate_vertices,
)

__version__ = "0.1.0"

__all__ = [
    "AffineUnit",
    "BoxMinConfig",
    "BoxMinResult",
    "MixedPoint",
    "MvrsmError",
    "MvrsmOptimizer",
    "NoisyObjective",
    "OptimizerConfig",
    "ReluSurrogate",
    "RunTrace",
    "SearchSpace",
    "TraceRecord",
    "VariableSpec",
    "ackley",
    "build_surrogate",
    "enumerate_vertices",
    "make_benchmark",
    "minimize",
    "rosenbrock",
    "run_mvrsm",
    "run_random_search",
    "__version__",
]
