"""Hyperbolic splitting of the defining matrix and the logarithmic distance
bound on the universal cover of its mapping torus.

The cover is R^d x R with the flow coordinate last. Distances along the
stable and unstable leaves contract exponentially at rate sigma under the
flow, which turns leafwise distance into a logarithm of the lattice norm; the
bound implemented here is

    (2/sigma) log+ ||x_s|| + (2/sigma) log+ ||x_u|| + |s| + 2

with x_s, x_u the projections onto the stable and unstable subspaces and the
additive constant folding the transversality slack. The comparison routine
regresses exact word lengths against this bound over a whole enumerated ball
and reports the empirical quasi-isometry constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ValidationError
from .group import GroupElement, ToralMatrix
from .words import WordLengthOracle

TOL_LIN = 1e-9
SIGMA_MARGIN = 1e-6


class CoverPoint(NamedTuple):
    """A point (x, s) of the universal cover R^d x R."""

    x: tuple
    s: float


def embed(g: GroupElement) -> CoverPoint:
    """The standard embedding of the group into the cover: x * z^k -> (x, k)."""
    return CoverPoint(tuple(float(v) for v in g.x), float(g.k))


@dataclass(frozen=True)
class HyperbolicSplitting:
    stable_basis: np.ndarray
    unstable_basis: np.ndarray
    proj_stable: np.ndarray
    proj_unstable: np.ndarray
    sigma: float

    def residuals(self, matrix: ToralMatrix) -> dict:
        """Float residuals of the defining identities, for validation."""
        a = matrix.as_array()
        ident = np.eye(matrix.dim)
        return {
            "projection_sum": float(
                np.linalg.norm(self.proj_stable + self.proj_unstable - ident, 2)
            ),
            "stable_invariance": float(
                np.linalg.norm(a @ self.proj_stable - self.proj_stable @ a, 2)
            ),
        }


def compute_splitting(matrix: ToralMatrix) -> HyperbolicSplitting:
    """Split R^d into the stable and unstable subspaces of the matrix.

    Complex eigenvalue pairs contribute a two-dimensional real block spanned
    by the real and imaginary parts of one eigenvector of the pair. sigma is
    the slowest exponential rate over the whole spectrum, shaved by a small
    safety margin. The projection identities are checked to TOL_LIN.
    """
    rep = matrix.hyperbolicity
    if not rep.hyperbolic:
        raise ValidationError(f"splitting requires a hyperbolic matrix: {rep.reason}")
    a = matrix.as_array()
    evals, evecs = np.linalg.eig(a)
    stable_cols = []
    unstable_cols = []
    used = [False] * len(evals)
    for i, ev in enumerate(evals):
        if used[i]:
            continue
        used[i] = True
        target = stable_cols if abs(ev) < 1.0 else unstable_cols
        vec = evecs[:, i]
        if abs(ev.imag) > TOL_LIN:
            # Consume the conjugate partner and keep a real 2D block.
            for j in range(i + 1, len(evals)):
                if not used[j] and abs(evals[j] - np.conj(ev)) < 1e-8:
                    used[j] = True
                    break
            target.append(np.real(vec))
            target.append(np.imag(vec))
        else:
            target.append(np.real(vec))
    stable = np.column_stack(stable_cols) if stable_cols else np.zeros((matrix.dim, 0))
    unstable = (
        np.column_stack(unstable_cols) if unstable_cols else np.zeros((matrix.dim, 0))
    )
    basis = np.column_stack([stable, unstable])
    basis_inv = np.linalg.inv(basis)
    ns = stable.shape[1]
    sel_s = np.zeros((matrix.dim, matrix.dim))
    sel_s[:ns, :ns] = np.eye(ns)
    proj_s = basis @ sel_s @ basis_inv
    proj_u = np.eye(matrix.dim) - proj_s
    sigma = min(abs(math.log(abs(ev))) for ev in evals) - SIGMA_MARGIN
    split = HyperbolicSplitting(stable, unstable, proj_s, proj_u, sigma)
    res = split.residuals(matrix)
    scale = max(1.0, float(np.linalg.norm(a, 2)))
    if res["projection_sum"] > TOL_LIN * scale or (
        res["stable_invariance"] > TOL_LIN * scale * float(np.linalg.norm(basis_inv, 2))
    ):
        raise ValidationError(f"splitting residuals too large: {res}")
    return split


def _log_plus(t: float) -> float:
    return math.log(t) if t > 1.0 else 0.0


def log_distance_bound(split: HyperbolicSplitting, point: CoverPoint) -> float:
    """Upper bound for the cover distance from the point to the origin.

    Monotone in each of ||x_s||, ||x_u||, |s|; the constant 2 absorbs the
    unit slack of the two leafwise estimates.
    """
    x = np.asarray(point.x, dtype=float)
    ns = float(np.linalg.norm(split.proj_stable @ x))
    nu = float(np.linalg.norm(split.proj_unstable @ x))
    two_over_sigma = 2.0 / split.sigma
    return two_over_sigma * _log_plus(ns) + two_over_sigma * _log_plus(nu) + abs(
        point.s
    ) + 2.0


@dataclass
class QiReport:
    """Word length versus cover-distance bound over a full enumerated ball."""

    radius: int
    n_entries: int
    q_hat: float
    fitted_slope: float
    intercept: float
    max_ratio: float
    coverage_ok: bool
    lengths: np.ndarray
    bounds: np.ndarray

    @property
    def ratios(self) -> np.ndarray:
        return self.lengths / self.bounds


def qi_comparison(oracle: WordLengthOracle, split: HyperbolicSplitting) -> QiReport:
    """Compare exact word lengths with the logarithmic cover bound.

    Regresses length against bound over every table entry, and reports the
    empirical constant q_hat = max(fitted slope, max length/bound ratio),
    which by construction satisfies length <= q_hat * bound + q_hat on all
    entries; the report records that coverage explicitly.
    """
    if oracle.radius < 6:
        raise ValidationError("qi comparison needs an oracle of radius >= 6")
    n = len(oracle)
    dim = oracle.ctx.dim
    xs = np.empty((n, dim))
    ss = np.empty(n)
    lengths = np.empty(n)
    for row, (g, length) in enumerate(oracle.table.items()):
        xs[row] = g.x
        ss[row] = g.k
        lengths[row] = length
    norm_s = np.linalg.norm(xs @ split.proj_stable.T, axis=1)
    norm_u = np.linalg.norm(xs @ split.proj_unstable.T, axis=1)
    log_plus = lambda arr: np.where(arr > 1.0, np.log(np.maximum(arr, 1e-300)), 0.0)
    two_over_sigma = 2.0 / split.sigma
    bounds = (
        two_over_sigma * log_plus(norm_s)
        + two_over_sigma * log_plus(norm_u)
        + np.abs(ss)
        + 2.0
    )
    slope, intercept = np.polyfit(bounds, lengths, 1)
    ratios = lengths / bounds
    max_ratio = float(ratios.max())
    q_hat = max(float(slope), max_ratio)
    coverage = bool((lengths <= q_hat * bounds + q_hat).all())
    return QiReport(
        radius=oracle.radius,
        n_entries=n,
        q_hat=q_hat,
        fitted_slope=float(slope),
        intercept=float(intercept),
        max_ratio=max_ratio,
        coverage_ok=coverage,
        lengths=lengths,
        bounds=bounds,
    )
