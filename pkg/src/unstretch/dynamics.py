"""Set iteration driven by an automorphism, with exact envelope certification.

One step maps a finite set S to U_N(phi(S)). Every iterate is certified to
stay inside the box B(ell0 + p(k), h0 + N k), where the offset polynomial

    p(k) = sum_{i=1..k} 2 (h0 + N i)^2

is evaluated in exact integers; a violation raises CertificationError and
fails the run. Diameter growth along the iteration is measured against the
word-length oracle and classified as polynomial or exponential by competing
straight-line fits. The flat lattice control runs the same iteration in Z^d,
where the word metric is the l1 distance and diameters are exact at any
scale, to exhibit the contrasting exponential growth.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import matrices
from .autos import GroupAutomorphism, apply_automorphism, require_valid
from .errors import BudgetError, CertificationError, ValidationError
from .group import GroupContext, GroupElement, ToralMatrix
from .words import (
    DEFAULT_ELEMENT_BUDGET,
    BoxSet,
    GeneratingSet,
    InclusionReport,
    WordLengthOracle,
    neighborhood,
    sample_box,
    set_diameter,
)

# Verdict selection: the better straight-line fit must win by this much R^2.
CLASSIFICATION_MARGIN = 0.05
# Fraction of leading curve points discarded before fitting.
BURN_IN_FRACTION = 0.2
MIN_FIT_POINTS = 6


@dataclass(frozen=True)
class IterationConfig:
    phi: GroupAutomorphism
    n_rounds: int
    a0: frozenset
    k_max: int
    lam: Fraction
    ell0: int
    h0: int

    @classmethod
    def make(cls, ctx, phi, n_rounds, a0, k_max, lam, ell0=None, h0=None):
        require_valid(ctx.matrix, phi)
        a0 = frozenset(a0)
        if not a0:
            raise ValidationError("starting set must be nonempty")
        if n_rounds < 1:
            raise ValidationError("neighborhood rounds N must be >= 1")
        if k_max < 0:
            raise ValidationError("k_max must be nonnegative")
        lam = Fraction(lam)
        if h0 is None:
            h0 = max(abs(g.k) for g in a0)
        if ell0 is None:
            ell0 = 0
            while not all(BoxSet(lam, ell0, h0).contains(g) for g in a0):
                ell0 += 1
        box = BoxSet(lam, ell0, h0)
        for g in a0:
            if not box.contains(g):
                raise ValidationError(
                    f"starting element {g} lies outside the declared box {box}"
                )
        return cls(phi, int(n_rounds), a0, int(k_max), lam, int(ell0), int(h0))


def envelope_offset(h0: int, n_rounds: int, k: int) -> int:
    """Exact integer offset polynomial p(k) = sum 2 (h0 + N i)^2, i = 1..k."""
    return sum(2 * (h0 + n_rounds * i) ** 2 for i in range(1, k + 1))


def iterate_once(
    ctx: GroupContext,
    gens: GeneratingSet,
    phi: GroupAutomorphism,
    n_rounds: int,
    current: Iterable[GroupElement],
    budget: int = DEFAULT_ELEMENT_BUDGET,
) -> set:
    """One step of the iteration: U_N applied to the automorphism image."""
    if n_rounds < 1:
        raise ValidationError("neighborhood rounds N must be >= 1")
    image = {apply_automorphism(ctx, phi, g) for g in current}
    return neighborhood(ctx, gens, image, n_rounds, budget=budget)


class CurvePoint(NamedTuple):
    k: int
    diameter: int
    diameter_exact: bool
    set_size: int
    envelope_ell: int | None
    envelope_h: int | None


@dataclass(frozen=True)
class GrowthVerdict:
    kind: str  # "polynomial" | "exponential" | "inconclusive"
    degree_estimate: float | None = None
    rate_estimate: float | None = None
    r2_polynomial: float | None = None
    r2_exponential: float | None = None
    reason: str | None = None


@dataclass
class GrowthCurve:
    points: list
    verdict: GrowthVerdict | None = None


def run_iteration(
    ctx: GroupContext,
    gens: GeneratingSet,
    config: IterationConfig,
    oracle: WordLengthOracle,
    budget: int = DEFAULT_ELEMENT_BUDGET,
) -> GrowthCurve:
    """Iterate, recording (k, diameter, size) and certifying the envelope.

    The box membership of every element of every iterate is checked with
    exact rational arithmetic; the first violation aborts the run.
    """
    current = set(config.a0)
    points = []
    for k in range(config.k_max + 1):
        ell = config.ell0 + envelope_offset(config.h0, config.n_rounds, k)
        h = config.h0 + config.n_rounds * k
        box = BoxSet(config.lam, ell, h)
        for g in current:
            if not box.contains(g):
                raise CertificationError(
                    f"envelope violated at step {k}: {g} escaped {box}"
                )
        diam = set_diameter(oracle, current)
        points.append(
            CurvePoint(k, diam.value, diam.exact, len(current), ell, h)
        )
        if k < config.k_max:
            current = iterate_once(
                ctx, gens, config.phi, config.n_rounds, current, budget=budget
            )
    return GrowthCurve(points)


def _line_fit(x: np.ndarray, y: np.ndarray):
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(((y - pred) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def classify_growth(curve: GrowthCurve) -> GrowthVerdict:
    """Competing fits of the diameter sequence on log-log and semilog axes.

    Only exact diameters feed the fits; lower-bound points are excluded to
    avoid truncation bias. The first 20% of points are burn-in. If fewer
    than six usable points remain, or neither model wins by the R^2 margin,
    the verdict is inconclusive. Both fits are always reported.
    """
    pts = curve.points
    burn = int(BURN_IN_FRACTION * len(pts))
    usable = [
        p for p in pts[burn:]
        if p.diameter_exact and p.k >= 1 and p.diameter >= 1
    ]
    if len(usable) < MIN_FIT_POINTS:
        return GrowthVerdict(
            "inconclusive",
            reason=f"insufficient-data: {len(usable)} exact points after burn-in",
        )
    ks = np.array([p.k for p in usable], dtype=float)
    log_d = np.log(np.array([p.diameter for p in usable], dtype=float))
    degree, _, r2_poly = _line_fit(np.log(ks), log_d)
    rate, _, r2_exp = _line_fit(ks, log_d)
    if r2_poly > r2_exp + CLASSIFICATION_MARGIN:
        kind = "polynomial"
    elif r2_exp > r2_poly + CLASSIFICATION_MARGIN:
        kind = "exponential"
    else:
        kind = "inconclusive"
    return GrowthVerdict(
        kind,
        degree_estimate=degree,
        rate_estimate=rate,
        r2_polynomial=r2_poly,
        r2_exponential=r2_exp,
        reason=None if kind != "inconclusive" else "fits are not separated",
    )


def _l1_diameter(points: Sequence[tuple]) -> int:
    """Exact l1 diameter via the 2^d signed-projection trick."""
    dim = len(next(iter(points)))
    best = 0
    pts = list(points)
    for mask in range(1 << (dim - 1)):
        # Half the sign patterns suffice: s and -s give the same spread.
        signs = [1] + [1 if (mask >> i) & 1 else -1 for i in range(dim - 1)]
        vals = [sum(s * c for s, c in zip(signs, p)) for p in pts]
        best = max(best, max(vals) - min(vals))
    return best


def abelian_control(
    A: ToralMatrix,
    n_rounds: int,
    a0: Iterable[Sequence[int]],
    k_max: int,
    budget: int = DEFAULT_ELEMENT_BUDGET,
) -> GrowthCurve:
    """The same iteration in the plain lattice Z^d, where it stretches.

    The matrix acts as an automorphism of Z^d, U_N is the l1 ball Minkowski
    sum, and diameters are exact l1 distances (no enumeration radius limits).
    The measured growth is exponential at the spectral rate, in contrast to
    the group side.
    """
    if not A.is_hyperbolic:
        raise ValidationError(
            f"control requires a hyperbolic matrix: {A.hyperbolicity.reason}"
        )
    current = {matrices.freeze_vector(v) for v in a0}
    if not current:
        raise ValidationError("starting set must be nonempty")
    if n_rounds < 1:
        raise ValidationError("neighborhood rounds N must be >= 1")
    dim = A.dim
    points = []
    for k in range(k_max + 1):
        points.append(
            CurvePoint(k, _l1_diameter(current), True, len(current), None, None)
        )
        if k == k_max:
            break
        mapped = {matrices.matvec(A.entries, x) for x in current}
        out = set(mapped)
        frontier = list(out)
        for _ in range(n_rounds):
            new = []
            for x in frontier:
                for i in range(dim):
                    for dv in (1, -1):
                        cand = x[:i] + (x[i] + dv,) + x[i + 1 :]
                        if cand not in out:
                            out.add(cand)
                            new.append(cand)
            frontier = new
        if len(out) > budget:
            raise BudgetError(
                f"control iterate exceeds {budget} lattice points at step {k + 1}"
            )
        current = out
    return GrowthCurve(points)


def check_box_inclusion_phi(
    ctx: GroupContext,
    phi: GroupAutomorphism,
    lam,
    ell: int,
    h: int,
    samples: int,
    rng: np.random.Generator,
) -> InclusionReport:
    """Sampled exact check that the automorphism maps B(ell,h) into
    B(ell+h, h+1); the bound needs ell, h >= 2."""
    if ell < 2 or h < 2:
        raise ValidationError("automorphism inclusion check requires ell, h >= 2")
    require_valid(ctx.matrix, phi)
    box = BoxSet(lam, ell, h)
    target = BoxSet(lam, ell + h, h + 1)
    report = InclusionReport("phi", box, target)
    for g in sample_box(rng, box, ctx.dim, samples):
        moved = apply_automorphism(ctx, phi, g)
        report.checked += 1
        if not target.contains(moved):
            report.violations.append((g, None, moved))
    return report
