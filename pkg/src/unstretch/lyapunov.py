"""Finite-time Lyapunov exponents along direction fields on toy torus maps,
volume averages of the one-step expansion, and the consistency check between
time averages and the space average.

The toy maps are volume preserving by construction: linear automorphisms of
the torus, the time-one map of their suspension (flow coordinate last), and
shear conjugates h o A o h^-1 of a linear automorphism, where h is a
closed-form trigonometric shear with unit Jacobian determinant. Conjugation
keeps the invariant line fields in closed form, which is what makes the
time-average versus space-average comparison well posed.

Orbits and cocycles run on plain float tuples; products are renormalized at
every step so exponents accumulate as log sums and never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import ValidationError
from .group import ToralMatrix

TOL_DIRECTION = 1e-9


def _matvec_f(rows, v):
    return tuple(sum(r[i] * v[i] for i in range(len(v))) for r in rows)


def _matmul_f(a, b):
    cols = tuple(zip(*b))
    return tuple(
        tuple(sum(ar[i] * bc[i] for i in range(len(ar))) for bc in cols) for ar in a
    )


def _norm(v):
    return math.sqrt(sum(c * c for c in v))


@dataclass(frozen=True)
class ToyMap:
    """A torus map with closed-form differential.

    ``step`` advances a point (tuple of floats in [0,1)), ``differential``
    returns the Jacobian at a point as a tuple of row tuples.
    """

    kind: str
    dim: int
    step: Callable
    differential: Callable
    volume_preserving: bool = True


def linear_toral(matrix: ToralMatrix) -> ToyMap:
    """x -> A x mod 1 with constant differential A."""
    rows = tuple(tuple(float(v) for v in r) for r in matrix.entries)

    def step(x):
        return tuple(c % 1.0 for c in _matvec_f(rows, x))

    return ToyMap("linear_toral", matrix.dim, step, lambda x: rows)


def suspension_time_one(matrix: ToralMatrix) -> ToyMap:
    """Time-one map of the suspension flow, flow coordinate last.

    In fundamental-domain coordinates the map is (x, s) -> (A x mod 1, s);
    its differential is the block matrix diag(A, 1), so the flow direction is
    carried isometrically.
    """
    d = matrix.dim
    rows = tuple(
        tuple(float(matrix.entries[r][c]) if r < d and c < d else float(r == c)
              for c in range(d + 1))
        for r in range(d + 1)
    )

    def step(p):
        x = _matvec_f(tuple(r[:d] for r in rows[:d]), p[:d])
        return tuple(c % 1.0 for c in x) + (p[d],)

    return ToyMap("suspension_time_one", d + 1, step, lambda p: rows)


def _shear_funcs(coefficients: Sequence[float]):
    """The shear profile s(y) and its derivative, as closed forms.

    s(y) = sum_j c_j sin(2 pi (j+1) y) / (2 pi (j+1)), so the maximum slope
    is bounded by sum |c_j| and the shear h(x) = x + s(x_last) e_0 has unit
    Jacobian determinant exactly.
    """
    cs = [float(c) for c in coefficients]

    def s(y):
        return sum(
            c * math.sin(2.0 * math.pi * (j + 1) * y) / (2.0 * math.pi * (j + 1))
            for j, c in enumerate(cs)
        )

    def ds(y):
        return sum(c * math.cos(2.0 * math.pi * (j + 1) * y) for j, c in enumerate(cs))

    return s, ds


def shear_conjugated(matrix: ToralMatrix, coefficients: Sequence[float]) -> ToyMap:
    """The conjugate h o A o h^-1 of a linear automorphism by a shear.

    h displaces the first coordinate by a trigonometric function of the last
    one, so dets stay exactly 1 and the map is a genuine volume-preserving
    perturbation of the linear model with all derivatives in closed form.
    """
    d = matrix.dim
    if d < 2:
        raise ValidationError("shear conjugation needs dimension >= 2")
    rows = tuple(tuple(float(v) for v in r) for r in matrix.entries)
    s, ds = _shear_funcs(coefficients)

    def h(p):
        return (p[0] + s(p[d - 1]),) + tuple(p[1:])

    def h_inv(p):
        return (p[0] - s(p[d - 1]),) + tuple(p[1:])

    def shear_jac(y_last, sign):
        rows_j = []
        for r in range(d):
            row = [float(r == c) for c in range(d)]
            if r == 0:
                row[d - 1] += sign * ds(y_last)
            rows_j.append(tuple(row))
        return tuple(rows_j)

    def step(p):
        y = h_inv(p)
        w = _matvec_f(rows, y)
        w = tuple(c % 1.0 for c in w)
        return tuple(c % 1.0 for c in h(w))

    def differential(p):
        y = h_inv(p)
        w = tuple(c % 1.0 for c in _matvec_f(rows, y))
        left = shear_jac(w[d - 1], +1.0)
        right = shear_jac(p[d - 1], -1.0)
        return _matmul_f(_matmul_f(left, rows), right)

    return ToyMap("shear_conjugated", d, step, differential)


@dataclass(frozen=True)
class DirectionField:
    """A unit tangent direction at every point (the line field evaluator)."""

    evaluator: Callable

    def __call__(self, point):
        v = self.evaluator(point)
        n = _norm(v)
        if n < TOL_DIRECTION:
            raise ValidationError("direction field returned a degenerate vector")
        return tuple(c / n for c in v)

    @classmethod
    def constant(cls, vector) -> "DirectionField":
        v = tuple(float(c) for c in vector)
        return cls(lambda p: v)

    @classmethod
    def flow_direction(cls, dim: int) -> "DirectionField":
        v = (0.0,) * (dim - 1) + (1.0,)
        return cls(lambda p: v)


def eigen_direction(matrix: ToralMatrix, which: str = "unstable") -> DirectionField:
    """Constant field along the extreme real eigenvector of the matrix."""
    evals, evecs = np.linalg.eig(matrix.as_array())
    idx = np.argmax(np.abs(evals)) if which == "unstable" else np.argmin(np.abs(evals))
    if abs(evals[idx].imag) > 1e-12:
        raise ValidationError(f"{which} eigenvalue of the matrix is not real")
    v = np.real(evecs[:, idx])
    lead = next(c for c in v if abs(c) > 1e-12)
    if lead < 0:
        v = -v
    return DirectionField.constant(tuple(v))


def shear_conjugated_eigen(
    matrix: ToralMatrix, coefficients: Sequence[float], which: str = "unstable"
) -> DirectionField:
    """The invariant line field of a shear conjugate: the pushforward of the
    linear model's eigendirection under the conjugacy."""
    base = eigen_direction(matrix, which)
    d = matrix.dim
    _, ds = _shear_funcs(coefficients)
    v0 = base((0.0,) * d)

    def evaluator(p):
        # D h at h^-1(p); the last coordinate is untouched by the shear.
        slope = ds(p[d - 1])
        return (v0[0] + slope * v0[d - 1],) + tuple(v0[1:])

    return DirectionField(evaluator)


def finite_time_exponent(
    toy_map: ToyMap,
    field: DirectionField,
    x0,
    n: int,
    initial_direction=None,
    return_state: bool = False,
):
    """(1/n) sum of log expansion factors along the orbit, renormalized.

    The direction is seeded from the field at the start (or the explicit
    ``initial_direction``) and pushed forward by the differential at every
    step, which is the cocycle chain rule in log form.
    """
    if n < 1:
        raise ValidationError("orbit length n must be >= 1")
    x = tuple(float(c) for c in x0)
    u = field(x) if initial_direction is None else tuple(initial_direction)
    total = 0.0
    for _ in range(n):
        jac = toy_map.differential(x)
        w = _matvec_f(jac, u)
        norm_w = _norm(w)
        if norm_w < TOL_DIRECTION:
            raise ValidationError("cocycle collapsed to a degenerate direction")
        total += math.log(norm_w)
        u = tuple(c / norm_w for c in w)
        x = toy_map.step(x)
    value = total / n
    if return_state:
        return value, x, u
    return value


class CenterEstimate(NamedTuple):
    value: float
    half_width: float
    n_samples: int


def center_integral(
    toy_map: ToyMap,
    field: DirectionField,
    n_samples: int,
    rng: np.random.Generator,
) -> CenterEstimate:
    """Monte Carlo volume average of log ||Dg(x)| restricted to the field||.

    The half width is the standard error of the sample mean; it is exactly
    zero when the integrand is constant.
    """
    if n_samples < 1000:
        raise ValidationError("center integral needs at least 1000 samples")
    values = np.empty(n_samples)
    pts = rng.random((n_samples, toy_map.dim))
    for i in range(n_samples):
        x = tuple(pts[i])
        u = field(x)
        values[i] = math.log(_norm(_matvec_f(toy_map.differential(x), u)))
    half_width = float(values.std(ddof=1) / math.sqrt(n_samples))
    return CenterEstimate(float(values.mean()), half_width, n_samples)


@dataclass(frozen=True)
class BirkhoffReport:
    orbit_mean: float
    orbit_se: float
    space_value: float
    space_se: float
    discrepancy: float
    combined_se: float
    x_count: int
    n: int


def birkhoff_consistency(
    toy_map: ToyMap,
    field: DirectionField,
    x_count: int,
    n: int,
    rng: np.random.Generator,
) -> BirkhoffReport:
    """Multi-start orbit averages of the exponent against the space average.

    Requires a volume-preserving map so the two averages estimate the same
    number; reports the discrepancy together with both standard errors.
    """
    if not toy_map.volume_preserving:
        raise ValidationError("consistency check requires a volume-preserving map")
    if x_count < 2:
        raise ValidationError("need at least two orbit starts")
    starts = rng.random((x_count, toy_map.dim))
    exps = np.array(
        [finite_time_exponent(toy_map, field, tuple(starts[i]), n) for i in range(x_count)]
    )
    orbit_mean = float(exps.mean())
    orbit_se = float(exps.std(ddof=1) / math.sqrt(x_count))
    space = center_integral(toy_map, field, max(1000, n), rng)
    disc = abs(orbit_mean - space.value)
    combined = math.hypot(orbit_se, space.half_width)
    return BirkhoffReport(
        orbit_mean, orbit_se, space.value, space.half_width, disc, combined,
        x_count, n,
    )


def volume_residuals(
    toy_map: ToyMap, n_points: int, rng: np.random.Generator
) -> float:
    """Max |det of the differential - 1| over random points."""
    worst = 0.0
    pts = rng.random((n_points, toy_map.dim))
    for i in range(n_points):
        det = float(np.linalg.det(np.array(toy_map.differential(tuple(pts[i])))))
        worst = max(worst, abs(det - 1.0))
    return worst
