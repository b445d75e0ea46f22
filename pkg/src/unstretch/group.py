"""Exact arithmetic in the lattice-by-cyclic group defined by an integer matrix.

Elements carry the unique normal form (x, k): x is a vector in the lattice
subgroup H = Z^d and k is the exponent of the distinguished generator z. The
defining relation z * x = (A x) * z makes multiplication twist the right
factor by a power of A:

    (x, k) * (y, m) = (x + A^k y, k + m)

Everything is computed with Python ints, so iterated powers of A never
overflow. All operations are pure functions of immutable values; the power
cache memoizes idempotently and is safe to share across workers.
"""

from __future__ import annotations

from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from . import matrices
from .errors import ValidationError

# |modulus - 1| below this counts as "on the unit circle" for the numeric
# eigenvalue test; exact integer determinant tests back it up.
TOL_EIG = 1e-9


class GroupElement(NamedTuple):
    """Normal form x * z^k. Equality and hashing are on the raw fields."""

    x: tuple
    k: int

    def __repr__(self):
        return f"({','.join(map(str, self.x))}|z^{self.k})"


def identity_element(dim: int) -> GroupElement:
    return GroupElement((0,) * dim, 0)


def lattice_element(x: Sequence[int]) -> GroupElement:
    return GroupElement(matrices.freeze_vector(x), 0)


def z_element(dim: int, k: int = 1) -> GroupElement:
    return GroupElement((0,) * dim, int(k))


class HyperbolicityReport(NamedTuple):
    hyperbolic: bool
    reason: str | None


class ToralMatrix:
    """Integer matrix in GL(d, Z) with cached spectral data.

    Construction enforces squareness and |det| = 1. Hyperbolicity is a
    separate certified check (`check_hyperbolic`) so that non-hyperbolic
    candidates can still be constructed and inspected.
    """

    def __init__(self, rows: Sequence[Sequence[int]]):
        entries = matrices.freeze_matrix(rows)
        dim = matrices.require_square(entries)
        d = matrices.det(entries)
        if d not in (1, -1):
            raise ValidationError(f"determinant is {d}, matrix is not in GL(d, Z)")
        self.entries = entries
        self.dim = dim
        self.det = d

    def __repr__(self):
        return f"ToralMatrix({[list(r) for r in self.entries]})"

    def __eq__(self, other):
        return isinstance(other, ToralMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    @cached_property
    def inverse_entries(self) -> matrices.IntMatrix:
        return matrices.inverse_unimodular(self.entries)

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.as_array())

    @cached_property
    def eigen(self) -> list:
        """(modulus, is_stable) per eigenvalue; is_stable means modulus < 1."""
        return [(float(abs(ev)), bool(abs(ev) < 1.0)) for ev in self.eigenvalues]

    @cached_property
    def op_norm(self) -> float:
        return float(np.linalg.norm(self.as_array(), 2))

    @cached_property
    def op_norm_inv(self) -> float:
        return float(np.linalg.norm(np.array(self.inverse_entries, dtype=float), 2))

    @cached_property
    def hyperbolicity(self) -> HyperbolicityReport:
        return check_hyperbolic(self)

    @property
    def is_hyperbolic(self) -> bool:
        return self.hyperbolicity.hyperbolic


def check_hyperbolic(matrix) -> HyperbolicityReport:
    """Certify that no eigenvalue sits on the unit circle.

    Accepts a ToralMatrix or raw rows. The verdict combines the numeric
    eigenvalue moduli (tolerance TOL_EIG) with two exact integer safety nets:
    det(A - I) != 0 and det(A + I) != 0 rule out eigenvalues +-1 exactly.
    Non-square input is an error, not a verdict.
    """
    if isinstance(matrix, ToralMatrix):
        entries = matrix.entries
    else:
        entries = matrices.freeze_matrix(matrix)
        matrices.require_square(entries)
    d = matrices.det(entries)
    if d not in (1, -1):
        return HyperbolicityReport(False, f"determinant is {d}, not +-1")
    moduli = np.abs(np.linalg.eigvals(np.array(entries, dtype=float)))
    for m in moduli:
        if abs(m - 1.0) <= TOL_EIG:
            return HyperbolicityReport(
                False, f"eigenvalue modulus {m!r} is within {TOL_EIG} of 1"
            )
    n = len(entries)
    ident = matrices.identity(n)
    if matrices.det(matrices.mat_sub(entries, ident)) == 0:
        return HyperbolicityReport(False, "det(A - I) = 0, eigenvalue 1 present")
    if matrices.det(matrices.mat_add(entries, ident)) == 0:
        return HyperbolicityReport(False, "det(A + I) = 0, eigenvalue -1 present")
    return HyperbolicityReport(True, None)


class GroupContext:
    """Multiplication context: the defining matrix plus exact power caches.

    The caches are keyed by exponent and only ever store values that are
    functions of the key, so concurrent duplicate inserts are harmless.
    """

    def __init__(self, matrix: ToralMatrix):
        if not isinstance(matrix, ToralMatrix):
            matrix = ToralMatrix(matrix)
        rep = matrix.hyperbolicity
        if not rep.hyperbolic:
            raise ValidationError(f"defining matrix is not hyperbolic: {rep.reason}")
        self.matrix = matrix
        self.dim = matrix.dim
        self._powers: dict = {0: matrices.identity(matrix.dim)}
        self._twists: dict = {}
        self.identity = identity_element(matrix.dim)
        self.z = z_element(matrix.dim)

    def matrix_power(self, j: int) -> matrices.IntMatrix:
        """Exact A^j for any integer j, cached in both directions."""
        powers = self._powers
        got = powers.get(j)
        if got is not None:
            return got
        if j > 0:
            base = self.matrix.entries
            have = max(k for k in powers if k >= 0 and k <= j)
            step = 1
        else:
            base = self.matrix.inverse_entries
            have = min(k for k in powers if k <= 0 and k >= j)
            step = -1
        acc = powers[have]
        while have != j:
            acc = matrices.matmul(acc, base)
            have += step
            powers[have] = acc
        return acc

    def twist(self, k: int, y: tuple) -> tuple:
        """Cached A^k y for the handful of vectors hit in hot loops."""
        key = (k, y)
        got = self._twists.get(key)
        if got is None:
            got = matrices.matvec(self.matrix_power(k), y)
            self._twists[key] = got
        return got

    def _check_dim(self, g: GroupElement):
        if len(g.x) != self.dim:
            raise ValidationError(
                f"element has dimension {len(g.x)}, context expects {self.dim}"
            )

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        self._check_dim(g)
        self._check_dim(h)
        shifted = matrices.matvec(self.matrix_power(g.k), h.x)
        return GroupElement(
            tuple(a + b for a, b in zip(g.x, shifted)), g.k + h.k
        )

    def inverse(self, g: GroupElement) -> GroupElement:
        self._check_dim(g)
        back = matrices.matvec(self.matrix_power(-g.k), g.x)
        return GroupElement(tuple(-v for v in back), -g.k)

    def power(self, g: GroupElement, n: int) -> GroupElement:
        """g^n by repeated multiplication; n may be negative."""
        base = g if n >= 0 else self.inverse(g)
        out = self.identity
        for _ in range(abs(n)):
            out = self.multiply(out, base)
        return out

    def conjugate(self, g: GroupElement, by: GroupElement) -> GroupElement:
        return self.multiply(self.multiply(by, g), self.inverse(by))
