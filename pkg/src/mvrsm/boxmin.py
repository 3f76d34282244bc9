"""Box-constrained local descent on the surrogate.

A limited-memory quasi-Newton loop (two-loop recursion) with backtracking
line search; every trial point is clipped into the box, so iterates never
leave it, and only strictly decreasing steps are accepted, so the result
never exceeds the start value. The integer block is treated as relaxed
(continuous) here; the driver rounds afterwards.

The surrogate is piecewise linear, and iterates land exactly on kinks: every
point with integer-valued integer coordinates sits on the kink of half the
integer units at once. There the averaged subgradient can point uphill along
every coordinate it claims is downhill, so the line search judges trial steps
by the model's exact one-sided directional derivative, and when no
quasi-Newton direction is a true descent direction the loop falls back to the
steepest feasible coordinate move (the natural escape on a surface whose
kinks are mostly axis-aligned).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteError
from .space import MixedPoint, SearchSpace
from .surrogate import ReluSurrogate

__all__ = ["BoxMinConfig", "BoxMinResult", "minimize"]

ARMIJO_C1 = 1e-4
MAX_BACKTRACKS = 30
CURVATURE_EPS = 1e-10


@dataclass(frozen=True)
class BoxMinConfig:
    max_iters: int = 20
    memory: int = 5
    grad_tol: float = 1e-8
    step_tol: float = 1e-12

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.memory < 1:
            raise ValueError(f"memory must be >= 1, got {self.memory}")


@dataclass(frozen=True, eq=False)
class BoxMinResult:
    point: MixedPoint
    value: float
    iterations: int


def minimize(
    model: ReluSurrogate,
    space: SearchSpace,
    start: MixedPoint,
    config: BoxMinConfig = BoxMinConfig(),
) -> BoxMinResult:
    """Descend the surrogate from ``start``, staying inside the box."""
    lower, upper = space.lower, space.upper
    x = np.clip(start.flatten(), lower, upper)
    f = model.value(x)
    g = model.gradient(x)
    _check_finite(f, g)

    pairs: deque[tuple[np.ndarray, np.ndarray]] = deque(maxlen=config.memory)
    iterations = 0

    for _ in range(config.max_iters):
        # projected gradient: the component of -g that can actually move x
        proj_grad = x - np.clip(x - g, lower, upper)
        if np.linalg.norm(proj_grad) < config.grad_tol:
            break
        iterations += 1

        step = None
        for direction, alpha in _candidates(model, x, g, pairs, lower, upper):
            step = _line_search(
                model, x, f, direction, alpha, lower, upper, config.step_tol
            )
            if step is not None:
                break
        if step is None:
            break
        x_new, f_new, step_norm = step

        g_new = model.gradient(x_new)
        _check_finite(f_new, g_new)
        s, y = x_new - x, g_new - g
        sy = float(s @ y)
        if sy > CURVATURE_EPS * np.linalg.norm(s) * np.linalg.norm(y):
            pairs.append((s, y))
        x, f, g = x_new, f_new, g_new
        if step_norm < config.step_tol:
            break

    return BoxMinResult(point=space.unflatten(x), value=f, iterations=iterations)


def _candidates(model, x, g, pairs, lower, upper):
    """Trial directions with initial step sizes, best first.

    Quasi-Newton (then steepest descent) directions are screened by their
    exact one-sided slope; when neither truly descends, the steepest feasible
    coordinate move is offered, sized to reach its bound in one step.
    """
    direction = _two_loop(g, pairs)
    norm_d = float(np.linalg.norm(direction))
    if norm_d > 0.0 and model.directional_derivative(x, direction) < 0.0:
        # unit trial step once curvature pairs scale the direction; before
        # that, a unit-length steepest descent step
        yield direction, 1.0 if pairs else 1.0 / norm_d
    if pairs:
        norm_g = float(np.linalg.norm(g))
        if norm_g > 0.0 and model.directional_derivative(x, -g) < 0.0:
            yield -g, 1.0 / norm_g

    ascent, descent = model.axis_derivatives(x)
    ascent = np.where(x < upper, ascent, np.inf)
    descent = np.where(x > lower, descent, np.inf)
    slopes = np.minimum(ascent, descent)
    i = int(np.argmin(slopes))
    if np.isfinite(slopes[i]) and slopes[i] < 0.0:
        sign = 1.0 if ascent[i] <= descent[i] else -1.0
        coord = np.zeros_like(x)
        coord[i] = sign
        room = (upper[i] - x[i]) if sign > 0.0 else (x[i] - lower[i])
        yield coord, float(room)


def _line_search(model, x, f, direction, alpha, lower, upper, step_tol):
    """Backtrack until a trial point passes sufficient decrease, or give up.

    The decrease test compares against the exact one-sided slope along the
    clipped step, so a step that the averaged gradient calls downhill but the
    model's kink structure makes uphill is rejected at face value.
    """
    for _ in range(MAX_BACKTRACKS):
        x_new = np.clip(x + alpha * direction, lower, upper)
        step = x_new - x
        step_norm = float(np.linalg.norm(step))
        if step_norm < step_tol:
            return None
        f_new = model.value(x_new)
        _check_finite(f_new, None)
        predicted = model.directional_derivative(x, step)
        if predicted < 0.0 and f_new <= f + ARMIJO_C1 * predicted:
            return x_new, f_new, step_norm
        alpha *= 0.5
    return None


def _two_loop(g: np.ndarray, pairs) -> np.ndarray:
    """Implicit product -H g from the stored curvature pairs."""
    q = g.copy()
    if not pairs:
        return -q
    alphas = []
    for s, y in reversed(pairs):
        rho = 1.0 / (y @ s)
        a = rho * (s @ q)
        q -= a * y
        alphas.append((a, rho, s, y))
    s_last, y_last = pairs[-1]
    q *= (s_last @ y_last) / (y_last @ y_last)
    for a, rho, s, y in reversed(alphas):
        b = rho * (y @ q)
        q += (a - b) * s
    return -q


def _check_finite(f: float, g: np.ndarray | None) -> None:
    if not np.isfinite(f):
        raise NonFiniteError("surrogate value is not finite")
    if g is not None and not np.all(np.isfinite(g)):
        raise NonFiniteError("surrogate gradient is not finite")
