"""Exact arithmetic on small integer matrices.

Matrices are nested tuples of Python ints (row major), so every operation is
arbitrary precision. Determinants use the fraction-free Bareiss scheme and
inverses go through exact rational elimination; nothing here ever rounds.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import ValidationError

IntMatrix = tuple  # tuple of row tuples, all entries int
IntVector = tuple  # tuple of ints


def freeze_matrix(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Coerce to a rectangular tuple-of-tuples of ints, rejecting junk."""
    out = []
    width = None
    for row in rows:
        frozen = tuple(_as_int(v) for v in row)
        if width is None:
            width = len(frozen)
        elif len(frozen) != width:
            raise ValidationError("matrix rows have unequal lengths")
        out.append(frozen)
    if not out or width == 0:
        raise ValidationError("matrix must be nonempty")
    return tuple(out)


def freeze_vector(values: Sequence[int]) -> IntVector:
    return tuple(_as_int(v) for v in values)


def _as_int(v) -> int:
    if isinstance(v, bool) or not isinstance(v, (int,)):
        # numpy integers slip through isinstance(int) on some platforms; accept
        # anything that converts losslessly.
        try:
            iv = int(v)
        except (TypeError, ValueError):
            raise ValidationError(f"matrix entry {v!r} is not an integer") from None
        if iv != v:
            raise ValidationError(f"matrix entry {v!r} is not an integer")
        return iv
    return int(v)


def require_square(m: IntMatrix) -> int:
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValidationError("matrix is not square")
    return n


def identity(n: int) -> IntMatrix:
    return tuple(tuple(int(r == c) for c in range(n)) for r in range(n))


def matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    n, k = len(a), len(a[0])
    if len(b) != k:
        raise ValidationError("matrix dimensions do not match for product")
    cols = tuple(zip(*b))
    return tuple(
        tuple(sum(ar[i] * bc[i] for i in range(k)) for bc in cols) for ar in a
    )


def matvec(a: IntMatrix, x: IntVector) -> IntVector:
    if len(a[0]) != len(x):
        raise ValidationError("matrix/vector dimensions do not match")
    return tuple(sum(row[i] * x[i] for i in range(len(x))) for row in a)


def mat_sub(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_add(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def det(m: IntMatrix) -> int:
    """Exact determinant via Bareiss fraction-free elimination."""
    n = require_square(m)
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for i in range(n - 1):
        if a[i][i] == 0:
            for r in range(i + 1, n):
                if a[r][i] != 0:
                    a[i], a[r] = a[r], a[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) // prev
        prev = a[i][i]
    return sign * a[n - 1][n - 1]


def inverse_unimodular(m: IntMatrix) -> IntMatrix:
    """Exact inverse of an integer matrix with determinant +-1.

    Runs rational Gauss-Jordan elimination and verifies that every entry of
    the result is integral, which certifies |det| = 1 as a side effect.
    """
    n = require_square(m)
    aug = [
        [Fraction(m[r][c]) for c in range(n)]
        + [Fraction(int(r == c)) for c in range(n)]
        for r in range(n)
    ]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ValidationError("matrix is singular, cannot invert")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    inv = []
    for r in range(n):
        row = []
        for c in range(n, 2 * n):
            v = aug[r][c]
            if v.denominator != 1:
                raise ValidationError("matrix inverse is not integral (|det| != 1)")
            row.append(int(v))
        inv.append(tuple(row))
    return tuple(inv)
