"""Piecewise-linear ReLU surrogate over a mixed search space.

The model is g(x) = sum_k c_k * max(0, w_k . x + b_k), a weighted sum of
rectified affine units, linear in the coefficients c. Units come in three
kinds:

``constant``
    w = 0, b = 1: an always-on unit so the model can shift its level.
``integer``
    w touches integer coordinates only, as +-(x_i - a) for every integer
    threshold a in the variable's range, and +-(x_i - x_{i-1} - a) for every
    adjacent pair of integer variables. Thresholds are chosen so each unit's
    kink can sit inside the box. Continuous weights are exactly zero.
``mixed``
    w is drawn from a small shared set of random directions (one per
    continuous variable) and b is sampled so the unit's kink hyperplane
    crosses the box.

This construction gives the model its defining property: a strict local
minimum is pinned by a full-rank set of kinks, of which at most n_continuous
can be mixed (their weights live in the span of the shared directions), so at
least n_integer are integer units; the integer units' simultaneous zeros form
a difference system whose solutions are integral. Strict local minima of the
surrogate therefore have exact integer values in the integer block, and
``enumerate_vertices`` makes the claim checkable on small models.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyDirectionSetError,
    TooLargeError,
)
from .rls import RecursiveLeastSquares
from .space import MixedPoint, SearchSpace

__all__ = [
    "AffineUnit",
    "ReluSurrogate",
    "Vertex",
    "integer_units",
    "sample_directions",
    "corner_points",
    "mixed_units",
    "build_surrogate",
    "enumerate_vertices",
]

RandomStream = np.random.Generator

REGULARISER = 1e-8  # ridge strength for the coefficient fit


@dataclass(frozen=True, eq=False)
class AffineUnit:
    """One rectified unit: contributes max(0, weights . x + bias) to the model."""

    weights: np.ndarray  # length dim, block layout [continuous; integer]
    bias: float
    kind: str  # "constant" | "integer" | "mixed"

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "bias", float(self.bias))


@dataclass
class ReluSurrogate:
    """The fitted model: units are frozen after construction, coefficients are not.

    ``coeffs`` is shared with the attached least squares state (when one is
    attached), so updates through either view are seen by both.
    """

    units: list[AffineUnit]
    coeffs: np.ndarray
    rls: RecursiveLeastSquares | None = None
    _weights: np.ndarray = field(init=False, repr=False)
    _biases: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if len(self.coeffs) != len(self.units):
            raise DimensionMismatchError(
                f"{len(self.coeffs)} coefficients for {len(self.units)} units"
            )
        self._weights = np.array([u.weights for u in self.units], dtype=float)
        self._biases = np.array([u.bias for u in self.units], dtype=float)

    @property
    def n_units(self) -> int:
        return len(self.units)

    @property
    def dim(self) -> int:
        return self._weights.shape[1]

    def _coords(self, x) -> np.ndarray:
        if isinstance(x, MixedPoint):
            x = x.flatten()
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatchError(f"point of shape {x.shape}, model dim {self.dim}")
        return x

    def features(self, x) -> np.ndarray:
        """Unit activations phi_k(x) = max(0, w_k . x + b_k)."""
        x = self._coords(x)
        return np.maximum(self._weights @ x + self._biases, 0.0)

    def value(self, x) -> float:
        return float(self.coeffs @ self.features(x))

    def gradient(self, x) -> np.ndarray:
        """Subgradient sum_k c_k s(z_k) w_k with s = 1 above the kink, 0 below, 1/2 at it."""
        x = self._coords(x)
        z = self._weights @ x + self._biases
        slope = np.where(z > 0.0, 1.0, np.where(z < 0.0, 0.0, 0.5))
        return self._weights.T @ (self.coeffs * slope)

    def directional_derivative(self, x, direction: np.ndarray) -> float:
        """Exact one-sided derivative of the model at ``x`` along ``direction``.

        Unlike ``gradient``, which averages the two slopes of a unit sitting
        exactly at its kink, this resolves each such unit by the side the
        direction moves into: lim_{t -> 0+} (g(x + t d) - g(x)) / t. Away from
        kinks the two agree. At integer points many integer units sit at their
        kink at once, where the averaged gradient can predict descent along a
        direction that is actually uphill; line searches should trust this
        value instead.
        """
        x = self._coords(x)
        direction = np.asarray(direction, dtype=float)
        if direction.shape != (self.dim,):
            raise DimensionMismatchError(
                f"direction of shape {direction.shape}, model dim {self.dim}"
            )
        z = self._weights @ x + self._biases
        rate = self._weights @ direction
        slope = np.where(z > 0.0, rate, 0.0)
        at_kink = z == 0.0
        slope[at_kink] = np.maximum(rate[at_kink], 0.0)
        return float(self.coeffs @ slope)

    def axis_derivatives(self, x) -> tuple[np.ndarray, np.ndarray]:
        """One-sided derivatives along +e_i and -e_i for every coordinate.

        Equivalent to calling ``directional_derivative`` with each signed unit
        vector, but in a handful of matrix products. Used by the descent loop
        to find a usable coordinate move when quasi-Newton directions fail at
        a kink point.
        """
        x = self._coords(x)
        z = self._weights @ x + self._biases
        active = self.coeffs * (z > 0.0)
        base = self._weights.T @ active
        kink = z == 0.0
        w_kink = self._weights[kink]
        c_kink = self.coeffs[kink]
        up = np.maximum(w_kink, 0.0).T @ c_kink
        down = np.maximum(-w_kink, 0.0).T @ c_kink
        return base + up, -base + down

    # -- snapshots ----------------------------------------------------------

    def to_json(self) -> str:
        """Serialize units and coefficients (fit covariance is not included)."""
        payload = {
            "units": [
                {"weights": u.weights.tolist(), "bias": u.bias, "kind": u.kind}
                for u in self.units
            ],
            "coeffs": self.coeffs.tolist(),
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "ReluSurrogate":
        payload = json.loads(text)
        units = [
            AffineUnit(np.array(u["weights"], float), u["bias"], u["kind"])
            for u in payload["units"]
        ]
        return cls(units, np.array(payload["coeffs"], float))


# -- basis construction ------------------------------------------------------


def integer_units(space: SearchSpace) -> list[AffineUnit]:
    """The deterministic block: one constant unit, then every integer unit.

    Ordering is fixed: constant; single-variable units by variable, then
    threshold, then sign (+ before -); adjacent-pair units likewise.
    """
    dim = space.dim
    nc = space.n_continuous
    units: list[AffineUnit] = []

    w0 = np.zeros(dim)
    units.append(AffineUnit(w0, 1.0, "constant"))

    lo = space.integer_lower.astype(int)
    up = space.integer_upper.astype(int)

    for i in range(space.n_integer):
        for a in range(lo[i], up[i] + 1):
            for sign in (1.0, -1.0):
                w = np.zeros(dim)
                w[nc + i] = sign
                units.append(AffineUnit(w, -sign * a, "integer"))

    for i in range(1, space.n_integer):
        for a in range(lo[i] - up[i - 1], up[i] - lo[i - 1] + 1):
            for sign in (1.0, -1.0):
                w = np.zeros(dim)
                w[nc + i] = sign
                w[nc + i - 1] = -sign
                units.append(AffineUnit(w, -sign * a, "integer"))

    return units


def sample_directions(space: SearchSpace, rng: RandomStream) -> np.ndarray:
    """n_continuous random directions, components uniform on [-1/dim, 1/dim].

    Mixed units draw their weight vectors from this set (with replacement), so
    at most n_continuous linearly independent mixed kinks can meet at a point.
    """
    bound = 1.0 / space.dim
    return rng.uniform(-bound, bound, size=(space.n_continuous, space.dim))


def corner_points(space: SearchSpace, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Box corners minimizing and maximizing the linear form weights . x.

    Zero weight components follow the >= 0 branch (lower bound in the
    minimizing corner), which keeps the choice deterministic.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (space.dim,):
        raise DimensionMismatchError(f"weights of shape {weights.shape}, space dim {space.dim}")
    nonneg = weights >= 0.0
    min_corner = np.where(nonneg, space.lower, space.upper)
    max_corner = np.where(nonneg, space.upper, space.lower)
    return min_corner, max_corner


def mixed_units(
    space: SearchSpace, directions: np.ndarray, count: int, rng: RandomStream
) -> list[AffineUnit]:
    """``count`` mixed units with kink hyperplanes guaranteed to cross the box.

    For a direction w with extreme values lo = w . argmin and hi = w . argmax
    over the box, any bias in [-hi, -lo] puts the zero level set of
    w . x + bias inside the box; the bias is drawn uniformly from that range.
    """
    directions = np.asarray(directions, dtype=float)
    if space.n_continuous >= 1 and len(directions) == 0:
        raise EmptyDirectionSetError(
            "a space with continuous variables needs at least one direction"
        )
    units: list[AffineUnit] = []
    for _ in range(count):
        w = directions[rng.integers(len(directions))]
        min_corner, max_corner = corner_points(space, w)
        lo = float(w @ min_corner)
        hi = float(w @ max_corner)
        bias = float(rng.uniform(-hi, -lo))
        units.append(AffineUnit(w.copy(), bias, "mixed"))
    return units


def build_surrogate(space: SearchSpace, rng: RandomStream) -> ReluSurrogate:
    """Assemble the model for a space and attach a fresh least squares state.

    The integer block is enumerated exhaustively; the number of mixed units
    scales it by the continuous/integer dimension ratio,
    ceil(n_continuous * n_integer_units / n_integer). Coefficients start at 1
    for the constant and integer units (a separable bowl whose minima sit on
    integer points) and 0 for the mixed units.
    """
    units = integer_units(space)
    n_int_units = len(units) - 1
    n_mixed = 0
    if space.n_continuous > 0:
        directions = sample_directions(space, rng)
        n_mixed = math.ceil(space.n_continuous * n_int_units / space.n_integer)
        units.extend(mixed_units(space, directions, n_mixed, rng))
    coeffs = np.concatenate([np.ones(1 + n_int_units), np.zeros(n_mixed)])
    fit = RecursiveLeastSquares(coeffs, lam=REGULARISER)
    return ReluSurrogate(units, fit.coeffs, rls=fit)


# -- exhaustive vertex enumeration (test support) -----------------------------


@dataclass(frozen=True, eq=False)
class Vertex:
    """Intersection point of dim kink hyperplanes."""

    point: MixedPoint
    unit_indices: tuple[int, ...]
    in_bounds: bool


def enumerate_vertices(
    model: ReluSurrogate, space: SearchSpace, max_subsets: int = 2_000_000
) -> list[Vertex]:
    """All kink intersections defined by linearly independent unit subsets.

    Every size-dim subset of units whose weight vectors are linearly
    independent contributes one vertex (the simultaneous zero of its units);
    vertices outside the box are returned too, flagged by ``in_bounds``.
    Intended for small models only; raises TooLargeError when the subset
    count exceeds ``max_subsets``.
    """
    if model.dim != space.dim:
        raise DimensionMismatchError(f"model dim {model.dim} != space dim {space.dim}")
    m, dim = model.n_units, space.dim
    total = math.comb(m, dim)
    if total > max_subsets:
        raise TooLargeError(f"{total} subsets exceed the enumeration budget {max_subsets}")
    if total == 0:
        return []

    nc, nd = space.n_continuous, space.n_integer
    kinds = np.array(
        [{"constant": 0, "integer": 1, "mixed": 2}[u.kind] for u in model.units], dtype=int
    )
    weights = model._weights
    biases = model._biases
    subsets = np.array(list(itertools.combinations(range(m), dim)), dtype=int)

    if _conforms(model, nc):
        keep = _structural_candidates(subsets, kinds, nc, nd)
        return _solve_structured(subsets[keep], kinds, weights, biases, space)
    # hand-built models may tag units arbitrarily; fall back to a dense check
    return _solve_generic(subsets, weights, biases, space)


def _conforms(model: ReluSurrogate, nc: int) -> bool:
    """True when unit kinds carry their structural meaning.

    Constant/integer units must have zero continuous weights and mixed units
    must span at most nc dimensions; only then is "independent subset" the
    same as "nd integer units with invertible integer block plus nc mixed
    units with invertible continuous block".
    """
    mixed_rows = [u.weights for u in model.units if u.kind == "mixed"]
    for u in model.units:
        if u.kind in ("constant", "integer") and np.any(u.weights[:nc] != 0.0):
            return False
        if u.kind == "constant" and np.any(u.weights != 0.0):
            return False
    if mixed_rows and np.linalg.matrix_rank(np.array(mixed_rows)) > nc:
        return False
    return True


def _structural_candidates(
    subsets: np.ndarray, kinds: np.ndarray, nc: int, nd: int
) -> np.ndarray:
    """Mask of subsets that can possibly be independent: exactly nd integer
    units and nc mixed units, no constant (its weight vector is zero)."""
    sub_kinds = kinds[subsets]
    return (
        np.all(sub_kinds != 0, axis=1)
        & (np.sum(sub_kinds == 1, axis=1) == nd)
        & (np.sum(sub_kinds == 2, axis=1) == nc)
    )


def _solve_structured(
    subsets: np.ndarray,
    kinds: np.ndarray,
    weights: np.ndarray,
    biases: np.ndarray,
    space: SearchSpace,
) -> list[Vertex]:
    """Block solve: integer units pin the integer coordinates (an integral
    difference system, solved on its own so its exactness never degrades
    through the mixed rows), then mixed units pin the continuous ones."""
    if len(subsets) == 0:
        return []
    nc, nd = space.n_continuous, space.n_integer
    # order each subset integer-units-first; built models already are, but
    # hand-assembled unit lists need not be
    order = np.argsort(kinds[subsets], axis=1, kind="stable")
    ordered = np.take_along_axis(subsets, order, axis=1)
    int_part, mix_part = ordered[:, :nd], ordered[:, nd:]

    a_int = weights[int_part][:, :, nc:]
    b_int = biases[int_part]
    ok = np.abs(np.linalg.det(a_int)) > 0.5  # entries are integers, so det is too
    if nc > 0:
        v_mix = weights[mix_part][:, :, :nc]
        sv = np.linalg.svd(v_mix, compute_uv=False)
        ok &= sv[:, -1] > 1e-9 * np.maximum(sv[:, 0], np.finfo(float).tiny)
    if not np.any(ok):
        return []

    xd = np.linalg.solve(a_int[ok], -b_int[ok][..., None])[..., 0]
    if nc > 0:
        w_mix_d = weights[mix_part[ok]][:, :, nc:]
        rhs = -(biases[mix_part[ok]] + np.einsum("nij,nj->ni", w_mix_d, xd))
        xc = np.linalg.solve(v_mix[ok], rhs[..., None])[..., 0]
    else:
        xc = np.zeros((len(xd), 0))
    return _collect(subsets[ok], xc, xd, space)


def _solve_generic(
    subsets: np.ndarray, weights: np.ndarray, biases: np.ndarray, space: SearchSpace
) -> list[Vertex]:
    nc = space.n_continuous
    mats = weights[subsets]
    sv = np.linalg.svd(mats, compute_uv=False)
    ok = sv[:, -1] > 1e-9 * np.maximum(sv[:, 0], np.finfo(float).tiny)
    if not np.any(ok):
        return []
    sol = np.linalg.solve(mats[ok], -biases[subsets[ok]][..., None])[..., 0]
    return _collect(subsets[ok], sol[:, :nc], sol[:, nc:], space)


def _collect(
    subsets: np.ndarray, xc: np.ndarray, xd: np.ndarray, space: SearchSpace
) -> list[Vertex]:
    slack = 1e-12
    lo_c, up_c = space.continuous_lower, space.continuous_upper
    lo_d, up_d = space.integer_lower, space.integer_upper
    inside = (
        np.all(xc >= lo_c - slack, axis=1)
        & np.all(xc <= up_c + slack, axis=1)
        & np.all(xd >= lo_d - slack, axis=1)
        & np.all(xd <= up_d + slack, axis=1)
    )
    return [
        Vertex(MixedPoint(xc[i], xd[i]), tuple(int(j) for j in subsets[i]), bool(inside[i]))
        for i in range(len(subsets))
    ]
