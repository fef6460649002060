"""Exact linear algebra over the rationals.

Matrices are lists of rows.  Entries may be ``int`` or ``Fraction`` (or any
exact field type supporting ``+ - * /``); nothing here ever rounds.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction


def as_rat(x) -> Fraction:
    """Coerce ints, Fractions and "num/den" strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def rat_str(x) -> str:
    x = as_rat(x)
    return f"{x.numerator}/{x.denominator}"


def det(rows: Sequence[Sequence]):
    """Determinant by fraction-free Bareiss elimination.

    Works for integer matrices without leaving the integers, and for any exact
    field.  The empty matrix has determinant 1.
    """
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    if any(len(r) != n for r in m):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return m[k][k] * 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i = m[i]
            row_k = m[k]
            for j in range(k + 1, n):
                v = row_i[j] * pivot - mik * row_k[j]
                if isinstance(v, int) and isinstance(prev, int):
                    row_i[j] = v // prev
                else:
                    row_i[j] = v / prev
            row_i[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q.  Returns (matrix, pivot columns)."""
    m = [[as_rat(x) if not isinstance(x, Fraction) else x for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def solve(a: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """Solve a x = rhs exactly (a may be overdetermined).

    Returns None when the system is inconsistent or underdetermined.
    """
    ncols = len(a[0])
    aug = [list(r) + [y] for r, y in zip(a, rhs)]
    red, piv = rref(aug)
    if ncols in piv:
        return None
    if len(piv) < ncols:
        return None
    x = [Fraction(0)] * ncols
    for row, c in zip(red, piv):
        x[c] = row[-1]
    return x


def sort_sign(idx: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    """Sort an index tuple, returning (permutation sign, sorted tuple).

    Repeated indices give sign 0.
    """
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, tuple(sorted(idx))
    sign = 1
    # insertion sort; count transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


def clear_denominators(rows: Sequence[Sequence]) -> list[list[int]]:
    """Scale each row by a positive integer so that all entries are integers."""
    from math import lcm

    out = []
    for r in rows:
        fr = [as_rat(x) for x in r]
        m = 1
        for x in fr:
            m = lcm(m, x.denominator)
        out.append([int(x * m) for x in fr])
    return out
