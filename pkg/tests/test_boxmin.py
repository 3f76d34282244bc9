"""Tests for the box-constrained descent loop."""

import numpy as np
import pytest

from mvrsm.boxmin import BoxMinConfig, BoxMinResult, minimize
from mvrsm.errors import NonFiniteError
from mvrsm.space import MixedPoint, SearchSpace, VariableSpec
from mvrsm.surrogate import AffineUnit, ReluSurrogate, build_surrogate


def golden_section(f, lo, hi, tol=1e-10):
    """1-D oracle minimizer for unimodal functions."""
    inv_phi = (np.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - inv_phi * (b - a), a + inv_phi * (b - a)
    while abs(b - a) > tol:
        if f(c) < f(d):
            b, d = d, c
            c = b - inv_phi * (b - a)
        else:
            a, c = c, d
            d = a + inv_phi * (b - a)
    return (a + b) / 2


def line_space(lo=0.0, up=3.0):
    return SearchSpace((VariableSpec("integer", lo, up),))


def scalar_model(units, coeffs):
    return ReluSurrogate(
        [AffineUnit(np.array([w]), b, "integer") for w, b in units],
        np.array(coeffs, dtype=float),
    )


def start(space, *coords):
    return space.unflatten(np.array(coords, dtype=float))


def test_config_validation():
    with pytest.raises(ValueError):
        BoxMinConfig(max_iters=0)
    with pytest.raises(ValueError):
        BoxMinConfig(memory=0)


def test_zero_model_returns_start_without_iterating():
    space = line_space()
    model = scalar_model([(1, -1)], [0.0])
    res = minimize(model, space, start(space, 2.5))
    assert res.point.xd[0] == 2.5
    assert res.iterations == 0
    assert res.value == 0.0


def test_single_relu_descends_to_its_flat_region():
    # max(0, x-1) on [0, 3]: everything at or left of the kink attains 0
    space = line_space()
    model = scalar_model([(1, -1)], [1.0])
    res = minimize(model, space, start(space, 2.5))
    assert res.value <= model.value(np.array([2.5]))
    assert res.value == 0.0
    assert res.point.xd[0] <= 1.0 + 1e-9


def test_v_shape_reaches_the_kink():
    # |x-1| = max(0, x-1) + max(0, 1-x); golden-section confirms the minimizer
    space = line_space()
    model = scalar_model([(1, -1), (-1, 1)], [1.0, 1.0])
    oracle = golden_section(lambda t: model.value(np.array([t])), 0.0, 3.0)
    assert oracle == pytest.approx(1.0, abs=1e-8)
    res = minimize(model, space, start(space, 0.2), BoxMinConfig(max_iters=20))
    assert abs(res.point.xd[0] - oracle) <= 1e-3


def test_never_increases_value_on_random_models():
    space = SearchSpace(
        (
            VariableSpec("continuous", -1, 1),
            VariableSpec("integer", 0, 2),
            VariableSpec("integer", 0, 2),
        )
    )
    rng = np.random.default_rng(0)
    for _ in range(200):
        model = build_surrogate(space, rng)
        model.coeffs[:] = rng.uniform(-1, 1, model.n_units)
        p = space.uniform_sample(rng)
        res = minimize(model, space, p)
        assert res.value <= model.value(p.flatten()) + 1e-12
        assert space.contains(res.point)
        assert res.iterations <= 20


def test_out_of_box_start_is_clipped_first():
    space = line_space()
    model = scalar_model([(1, -1)], [1.0])
    res = minimize(model, space, start(space, 50.0))
    assert res.point.xd[0] <= 3.0
    assert res.value == 0.0


def test_iteration_budget_respected():
    space = line_space(0, 100)
    model = scalar_model([(1, -1), (-1, 1)], [1.0, 1.0])
    res = minimize(model, space, start(space, 93.0), BoxMinConfig(max_iters=3))
    assert res.iterations <= 3


def test_escapes_kink_point_where_averaged_gradient_misleads():
    # Two opposed units kinked at x0=1 with uneven coefficients make the
    # averaged gradient claim descent along x0 although both senses of x0
    # rise; the only true descent is raising x1. A descent loop trusting the
    # averaged slope stalls at (1, 0) forever; the kink-aware loop must find
    # the coordinate move and reach the model minimum.
    space = SearchSpace(
        (VariableSpec("integer", 0, 2), VariableSpec("integer", 0, 2))
    )
    model = ReluSurrogate(
        [
            AffineUnit(np.array([1.0, 0.0]), -1.0, "integer"),
            AffineUnit(np.array([-1.0, 0.0]), 1.0, "integer"),
            AffineUnit(np.array([0.0, -1.0]), 1.0, "integer"),
        ],
        np.array([5.0, 6.0, 0.5]),
    )
    x0 = np.array([1.0, 0.0])
    g = model.gradient(x0)
    # averaged gradient: x0 slope 0.5*5 - 0.5*6 = -0.5, so -g walks x0 upward
    assert g[0] == -0.5
    # but the exact slope along that walk is uphill
    assert model.directional_derivative(x0, -g) > 0.0
    res = minimize(model, space, space.unflatten(x0))
    assert res.value == 0.0
    assert res.point.xd[1] >= 1.0  # escaped by moving the second coordinate


def test_descends_from_integral_points_of_built_surrogates():
    # integral starts put half the integer units at their kinks; descent must
    # still make progress whenever some coordinate move is downhill
    space = SearchSpace(
        (
            VariableSpec("continuous", -1, 1),
            VariableSpec("integer", -2, 2),
            VariableSpec("integer", -2, 2),
        )
    )
    rng = np.random.default_rng(42)
    stuck = 0
    for _ in range(50):
        model = build_surrogate(space, rng)
        model.coeffs[:] = rng.uniform(-1, 1, model.n_units)
        p = space.uniform_sample(rng)
        up, down = model.axis_derivatives(p.flatten())
        movable = np.concatenate(
            [up[p.flatten() < space.upper], down[p.flatten() > space.lower]]
        )
        res = minimize(model, space, p)
        if movable.size and movable.min() < -1e-9:
            if not res.value < model.value(p.flatten()):
                stuck += 1
    assert stuck == 0


def test_non_finite_model_raises():
    space = line_space()
    model = scalar_model([(1, -1)], [np.inf])
    with pytest.raises(NonFiniteError):
        minimize(model, space, start(space, 2.0))


def test_result_type_fields():
    space = line_space()
    model = scalar_model([(1, -1)], [1.0])
    res = minimize(model, space, start(space, 2.0))
    assert isinstance(res, BoxMinResult)
    assert isinstance(res.point, MixedPoint)
    assert res.value == model.value(res.point.flatten())
