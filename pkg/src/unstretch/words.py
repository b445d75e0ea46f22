"""Word metric machinery: generating sets, breadth-first ball enumeration,
exact box sets, neighborhoods, and diameters of finite subsets.

The generating set is the 2d norm-one lattice vectors plus z and z^-1, so the
word metric is symmetric. Balls are enumerated frontier by frontier; the
resulting oracle answers exact word lengths up to its radius and certifies
"longer than the radius" for everything else. Finite subsets of the group are
plain Python sets of GroupElement, which enforces normal-form uniqueness.

Box sets B(ell, h) hold the elements with ||x|| <= lam^ell and |k| <= h for an
exact rational lam; membership is decided by integer cross-multiplication, so
boundary cases carry no float ambiguity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from . import matrices
from .errors import BudgetError, ValidationError
from .group import GroupContext, GroupElement, ToralMatrix

# Element-count cap for ball/neighborhood construction. Growth is exponential,
# so this bounds memory, not accuracy; results below the cap are exact.
DEFAULT_ELEMENT_BUDGET = 50_000_000

ORACLE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class GeneratingSet:
    """The standard generators: all lattice vectors of norm one, z, z^-1."""

    h_generators: tuple
    z_generators: tuple

    @classmethod
    def standard(cls, dim: int) -> "GeneratingSet":
        hs = []
        for i in range(dim):
            e = tuple(int(j == i) for j in range(dim))
            ne = tuple(-v for v in e)
            hs.append(GroupElement(e, 0))
            hs.append(GroupElement(ne, 0))
        zs = (GroupElement((0,) * dim, 1), GroupElement((0,) * dim, -1))
        return cls(tuple(hs), zs)

    @property
    def all(self) -> tuple:
        return self.h_generators + self.z_generators

    @property
    def dim(self) -> int:
        return len(self.z_generators[0].x)

    def __post_init__(self):
        for g in self.h_generators:
            if g.k != 0 or sum(v * v for v in g.x) != 1:
                raise ValidationError(f"{g} is not a norm-one lattice generator")
        inv_closed = {tuple(-v for v in g.x) for g in self.h_generators}
        if inv_closed != {g.x for g in self.h_generators}:
            raise ValidationError("h generators are not closed under inversion")


def _expand_frontier(ctx: GroupContext, gens: GeneratingSet, frontier, table, length):
    """One breadth-first layer of right multiplication with deduplication."""
    new = []
    h_vecs = [g.x for g in gens.h_generators]
    twist = ctx.twist
    for g in frontier:
        x, k = g
        for y in h_vecs:
            s = twist(k, y)
            cand = GroupElement(tuple(a + b for a, b in zip(x, s)), k)
            if cand not in table:
                table[cand] = length
                new.append(cand)
        for dk in (1, -1):
            cand = GroupElement(x, k + dk)
            if cand not in table:
                table[cand] = length
                new.append(cand)
    return new


class WordLengthOracle:
    """Complete word-length table out to a fixed radius.

    ``table[g]`` is the exact word length for every g in the radius-R ball;
    absence from the table certifies length > R. Queries after construction
    are read-only and safe to share across workers.
    """

    def __init__(self, ctx, gens, radius, table, sphere_sizes):
        self.ctx = ctx
        self.gens = gens
        self.radius = radius
        self.table = table
        self.sphere_sizes = list(sphere_sizes)

    def word_length(self, g: GroupElement):
        """Exact length, or None certifying length > radius."""
        return self.table.get(g)

    def __contains__(self, g):
        return g in self.table

    def __len__(self):
        return len(self.table)

    def elements(self) -> Iterable[GroupElement]:
        return self.table.keys()

    def ball_size(self, r: int) -> int:
        return sum(self.sphere_sizes[: r + 1])

    def census(self):
        """Rows (radius, ball_size, sphere_size) for 0 <= radius <= R."""
        rows = []
        total = 0
        for r, s in enumerate(self.sphere_sizes):
            total += s
            rows.append((r, total, s))
        return rows

    def restricted(self, radius: int) -> "WordLengthOracle":
        """The oracle for a smaller radius; the table is a fresh copy (the
        group context is shared, its caches are idempotent)."""
        if radius > self.radius:
            raise ValidationError(
                f"cannot restrict radius {self.radius} oracle to {radius}"
            )
        table = {g: n for g, n in self.table.items() if n <= radius}
        return WordLengthOracle(
            self.ctx, self.gens, radius, table, self.sphere_sizes[: radius + 1]
        )

    def save(self, path):
        """Versioned text snapshot: header line, then one element per line."""
        p = Path(path)
        with p.open("w") as fh:
            fh.write(
                f"unstretch-oracle v{ORACLE_FORMAT_VERSION} "
                f"dim={self.ctx.dim} radius={self.radius}\n"
            )
            fh.write(
                "matrix " + " ".join(
                    str(v) for row in self.ctx.matrix.entries for v in row
                ) + "\n"
            )
            for g, n in self.table.items():
                fh.write(" ".join(map(str, g.x)) + f" {g.k} {n}\n")

    @classmethod
    def load(cls, path) -> "WordLengthOracle":
        p = Path(path)
        with p.open() as fh:
            header = fh.readline().split()
            if len(header) < 4 or header[0] != "unstretch-oracle":
                raise ValidationError(f"{p} is not an oracle snapshot")
            if header[1] != f"v{ORACLE_FORMAT_VERSION}":
                raise ValidationError(f"unsupported oracle format {header[1]}")
            dim = int(header[2].split("=")[1])
            radius = int(header[3].split("=")[1])
            mline = fh.readline().split()
            vals = list(map(int, mline[1:]))
            rows = [vals[i * dim : (i + 1) * dim] for i in range(dim)]
            ctx = GroupContext(ToralMatrix(rows))
            table = {}
            sphere = [0] * (radius + 1)
            for line in fh:
                parts = list(map(int, line.split()))
                g = GroupElement(tuple(parts[:dim]), parts[dim])
                n = parts[dim + 1]
                table[g] = n
                sphere[n] += 1
        return cls(ctx, GeneratingSet.standard(dim), radius, table, sphere)


def word_ball(
    ctx: GroupContext,
    gens: GeneratingSet,
    radius: int,
    budget: int = DEFAULT_ELEMENT_BUDGET,
) -> WordLengthOracle:
    """Enumerate the ball of the given radius by breadth-first search.

    Raises BudgetError (reporting the largest completed radius) if the table
    would exceed ``budget`` elements.
    """
    if radius < 0:
        raise ValidationError("radius must be nonnegative")
    table = {ctx.identity: 0}
    frontier = [ctx.identity]
    sphere_sizes = [1]
    for r in range(1, radius + 1):
        # Conservative pre-check: the next layer can add at most one element
        # per (frontier element, generator) pair.
        projected = len(table) + len(frontier) * len(gens.all)
        if projected > budget:
            raise BudgetError(
                f"ball of radius {r} may exceed budget of {budget} elements",
                completed_radius=r - 1,
                partial=WordLengthOracle(ctx, gens, r - 1, table, sphere_sizes),
            )
        frontier = _expand_frontier(ctx, gens, frontier, table, r)
        sphere_sizes.append(len(frontier))
    return WordLengthOracle(ctx, gens, radius, table, sphere_sizes)


def neighborhood(
    ctx: GroupContext,
    gens: GeneratingSet,
    elements: Iterable[GroupElement],
    n: int,
    budget: int = DEFAULT_ELEMENT_BUDGET,
) -> set:
    """The right N-neighborhood S * B_N, by N rounds of generator products.

    Satisfies U_{N+1}(S) = U_1(U_N(S)); only the most recent layer needs
    expanding because earlier layers were already saturated.
    """
    if n < 0:
        raise ValidationError("neighborhood rounds must be nonnegative")
    out = set(elements)
    frontier = list(out)
    for _ in range(n):
        new = []
        for g in frontier:
            for s in gens.all:
                cand = ctx.multiply(g, s)
                if cand not in out:
                    out.add(cand)
                    new.append(cand)
        if len(out) > budget:
            raise BudgetError(
                f"neighborhood exceeds budget of {budget} elements"
            )
        frontier = new
    return out


class Diameter(NamedTuple):
    """Word-metric diameter; exact=False means "at least this value"."""

    value: int
    exact: bool


def set_diameter(oracle: WordLengthOracle, elements) -> Diameter:
    """Max over unordered pairs of |g^-1 h|, via left invariance.

    Pairs are pruned with the triangle bound d(g, h) <= |g| + |h| after
    seeding the running maximum with two cheap certified lower bounds (the
    z-exponent spread, since the projection to the cyclic factor is
    1-Lipschitz, and the word-length spread). Any pairwise product outside
    the oracle radius yields the certified lower bound (radius + 1).
    """
    S = list(elements)
    if not S:
        raise ValidationError("diameter of an empty set")
    if len(S) == 1:
        return Diameter(0, True)
    ctx = oracle.ctx
    radius = oracle.radius
    inf = math.inf
    lengths = [oracle.word_length(g) for g in S]
    caps = [inf if v is None else v for v in lengths]

    ks = [g.k for g in S]
    best = max(ks) - min(ks)
    known = [v for v in lengths if v is not None]
    if known:
        best = max(best, max(known) - min(known))
    if best > radius:
        return Diameter(radius + 1, False)

    order = sorted(range(len(S)), key=lambda i: caps[i], reverse=True)
    for a, i in enumerate(order):
        if a + 1 < len(order) and caps[i] + caps[order[a + 1]] <= best:
            break
        gi_inv = ctx.inverse(S[i])
        for b in range(a + 1, len(order)):
            j = order[b]
            if caps[i] + caps[j] <= best:
                break
            d = oracle.word_length(ctx.multiply(gi_inv, S[j]))
            if d is None:
                return Diameter(radius + 1, False)
            if d > best:
                best = d
    return Diameter(best, True)


class BoxSet:
    """Elements with ||x|| <= lam^ell and |k| <= h, membership exact.

    The norm test is sum(x_i^2) * q^(2 ell) <= p^(2 ell) with lam = p/q in
    lowest terms, so it is a pure integer comparison.
    """

    def __init__(self, lam, ell: int, h: int):
        lam = Fraction(lam)
        if lam <= 2:
            raise ValidationError("box scale lam must exceed 2")
        if ell < 0 or h < 0:
            raise ValidationError("box parameters ell, h must be nonnegative")
        self.lam = lam
        self.ell = int(ell)
        self.h = int(h)
        self._num2l = lam.numerator ** (2 * self.ell)
        self._den2l = lam.denominator ** (2 * self.ell)

    def __repr__(self):
        return f"BoxSet(lam={self.lam}, ell={self.ell}, h={self.h})"

    def contains(self, g: GroupElement) -> bool:
        if abs(g.k) > self.h:
            return False
        norm_sq = sum(v * v for v in g.x)
        return norm_sq * self._den2l <= self._num2l

    def norm_bound(self) -> Fraction:
        return self.lam ** self.ell


def choose_lambda(A: ToralMatrix, phi, i_max: int = 50) -> Fraction:
    """Smallest hundredth strictly above every scale the box lemmas need.

    The binding quantities are max(2, ||A||, ||A^-1||, ||B||, ||B^-1||,
    ||v|| + ||A v|| - 1, and ||A^i v||^(1/i) over 2 < i <= i_max). The choice
    is verified by assertion against the strict forms of all the conditions.
    """
    a_arr = A.as_array()
    b_arr = np.array(phi.B, dtype=float)
    b_inv = np.array(matrices.inverse_unimodular(phi.B), dtype=float)
    v = tuple(phi.v)
    needs = [2.0, A.op_norm, A.op_norm_inv,
             float(np.linalg.norm(b_arr, 2)), float(np.linalg.norm(b_inv, 2))]
    v_norm = math.sqrt(sum(c * c for c in v))
    if v_norm > 0:
        av = matrices.matvec(A.entries, v)
        av_norm = math.sqrt(sum(c * c for c in av))
        needs.append(v_norm + av_norm - 1.0)
        w = v
        for i in range(1, i_max + 1):
            w = matrices.matvec(A.entries, w)
            if i > 2:
                wn = math.sqrt(sum(c * c for c in w))
                if wn > 0:
                    needs.append(wn ** (1.0 / i))
    top = max(needs)
    lam = Fraction(math.floor(top * 100) + 1, 100)
    while float(lam) <= top:
        lam += Fraction(1, 100)

    lam_f = float(lam)
    assert lam_f > 2.0
    assert A.op_norm < lam_f and A.op_norm_inv < lam_f
    assert np.linalg.norm(b_arr, 2) < lam_f and np.linalg.norm(b_inv, 2) < lam_f
    if v_norm > 0:
        assert v_norm + av_norm < 1.0 + lam_f
        w = v
        for i in range(1, i_max + 1):
            w = matrices.matvec(A.entries, w)
            if i > 2:
                assert math.sqrt(sum(c * c for c in w)) < lam_f ** i
    return lam


def sample_box(
    rng: np.random.Generator,
    box: BoxSet,
    dim: int,
    count: int,
    boundary_fraction: float = 0.3,
) -> list:
    """Sample elements of a box: random interior plus near-boundary points.

    Interior points come from rejection sampling in the bounding cube;
    boundary points are lattice roundings of random directions scaled to the
    norm radius, which are the binding cases for the inclusion lemmas.
    Membership of every returned element is verified exactly.
    """
    if count <= 0:
        raise ValidationError("sample count must be positive")
    radius_int = math.isqrt(box._num2l // box._den2l)
    n_boundary = int(count * boundary_fraction)
    n_interior = count - n_boundary
    out = []
    while len(out) < n_interior:
        x = tuple(int(v) for v in rng.integers(-radius_int, radius_int + 1, size=dim))
        k = int(rng.integers(-box.h, box.h + 1))
        g = GroupElement(x, k)
        if box.contains(g):
            out.append(g)
    target = float(box.norm_bound())
    attempts = 0
    while len(out) < count and attempts < 50 * count:
        attempts += 1
        u = rng.normal(size=dim)
        nu = np.linalg.norm(u)
        if nu == 0:
            continue
        p = u / nu * target
        best = None
        best_norm = -1
        for corner in range(1 << dim):
            cand = tuple(
                int(math.floor(p[i])) + ((corner >> i) & 1) for i in range(dim)
            )
            k = int(rng.integers(-box.h, box.h + 1))
            g = GroupElement(cand, k)
            if box.contains(g):
                nsq = sum(v * v for v in cand)
                if nsq > best_norm:
                    best, best_norm = g, nsq
        if best is not None:
            out.append(best)
    while len(out) < count:
        # boundary sampling starved (degenerate box); top up from the interior
        x = tuple(int(v) for v in rng.integers(-radius_int, radius_int + 1, size=dim))
        k = int(rng.integers(-box.h, box.h + 1))
        g = GroupElement(x, k)
        if box.contains(g):
            out.append(g)
    return out


@dataclass
class InclusionReport:
    """Outcome of an exact sampled inclusion check between two boxes."""

    name: str
    source: BoxSet
    target: BoxSet
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_box_inclusion_u1(
    ctx: GroupContext,
    gens: GeneratingSet,
    lam,
    ell: int,
    h: int,
    samples: int,
    rng: np.random.Generator,
) -> InclusionReport:
    """Sampled exact check that one generator step stays in B(ell+h, h+1)."""
    if ell < 1 or h < 1:
        raise ValidationError("inclusion check requires ell, h >= 1")
    box = BoxSet(lam, ell, h)
    target = BoxSet(lam, ell + h, h + 1)
    report = InclusionReport("u1", box, target)
    for g in sample_box(rng, box, ctx.dim, samples):
        for s in gens.all:
            moved = ctx.multiply(g, s)
            report.checked += 1
            if not target.contains(moved):
                report.violations.append((g, s, moved))
    return report


def check_box_inclusion_un(
    ctx: GroupContext,
    gens: GeneratingSet,
    lam,
    ell: int,
    h: int,
    n: int,
    samples: int,
    rng: np.random.Generator,
) -> InclusionReport:
    """Sampled exact check that N generator rounds stay in the N-step box."""
    if ell < 1 or h < 1:
        raise ValidationError("inclusion check requires ell, h >= 1")
    if n < 0:
        raise ValidationError("N must be nonnegative")
    box = BoxSet(lam, ell, h)
    target = BoxSet(lam, ell + n * (h + n), h + n)
    report = InclusionReport(f"u{n}", box, target)
    for g in sample_box(rng, box, ctx.dim, samples):
        reached = neighborhood(ctx, gens, [g], n)
        for moved in reached:
            report.checked += 1
            if not target.contains(moved):
                report.violations.append((g, None, moved))
    return report
