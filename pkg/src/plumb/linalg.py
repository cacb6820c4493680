"""Small exact linear algebra kernel over ``int`` and ``Fraction``.

Matrices are lists of rows.  Everything here is exact; nothing touches floats.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = Sequence[Sequence[int]]


def ldl(a: Matrix) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Unpivoted LDL^T of a symmetric matrix.

    Returns ``(L, d)`` with ``L`` unit lower triangular.  Stops early (with a
    short ``d``) as soon as a zero pivot makes the factorization undefined.
    """
    n = len(a)
    lo = [[Fraction(0)] * n for _ in range(n)]
    d: list[Fraction] = []
    for j in range(n):
        lo[j][j] = Fraction(1)
        dj = Fraction(a[j][j]) - sum((lo[j][k] ** 2 * d[k] for k in range(j)), Fraction(0))
        d.append(dj)
        if dj == 0:
            break
        for i in range(j + 1, n):
            s = Fraction(a[i][j]) - sum((lo[i][k] * lo[j][k] * d[k] for k in range(j)), Fraction(0))
            lo[i][j] = s / dj
    return lo, d


def first_nonnegative_pivot(a: Matrix) -> tuple[int, Fraction] | None:
    """Index and value of the first LDL^T pivot that is ``>= 0``, or ``None``.

    ``None`` certifies that ``a`` is negative definite.
    """
    _, d = ldl(a)
    for i, p in enumerate(d):
        if p >= 0:
            return i, p
    return None


def leading_minors(a: Matrix) -> list[int]:
    """All leading principal minors, by fraction-free (Bareiss) elimination.

    Falls back to direct determinants when a Bareiss pivot vanishes.
    """
    n = len(a)
    m = [list(map(int, row)) for row in a]
    minors: list[int] = []
    prev = 1
    for k in range(n):
        if m[k][k] == 0:
            minors.extend(determinant([row[: j + 1] for row in a[: j + 1]]) for j in range(k, n))
            return minors
        minors.append(m[k][k])
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return minors


def determinant(a: Matrix) -> int:
    """Integer determinant via Bareiss with row pivoting."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(map(int, row)) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def inverse(a: Matrix) -> list[list[Fraction]]:
    """Exact inverse by Gauss-Jordan elimination with partial pivoting."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def matvec(a, x):
    return [sum((aij * xj for aij, xj in zip(row, x)), 0) for row in a]


def quad(a, x, y=None) -> Fraction | int:
    """``x^T a y`` (``y`` defaults to ``x``)."""
    y = x if y is None else y
    return sum((xi * v for xi, v in zip(x, matvec(a, y))), 0)
