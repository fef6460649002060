from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from bcfwtile.grassmannian import (GrassmannError, GrassmannPoint, cyc, delete_column,
                                   matrix_from_pluckers, oriented, pluckers, positivity_class, pre,
                                   refl, same_point, sample_top_cell, sample_Z, twistors,
                                   twistors_cauchy_binet, z_minors)
from bcfwtile.linalg import det, rank, rref, solve, sort_sign


def _leibniz(m):
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = sort_sign(perm)[0]
        prod = 1
        for i, j in enumerate(perm):
            prod *= m[i][j]
        total += sign * prod
    return total


def test_det_matches_leibniz():
    # [DERIVED] permutation expansion oracle
    m = [[2, -1, 3, 0], [1, 4, -2, 5], [0, 3, 1, -1], [7, 2, 2, 2]]
    assert det(m) == _leibniz(m)
    f = [[Fraction(1, 2), Fraction(2, 3)], [Fraction(3, 5), Fraction(-1, 7)]]
    assert det(f) == _leibniz(f)


def test_rref_solve_rank():
    m = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert rank(m) == 2
    R, piv = rref(m)
    assert piv == [0, 1]
    x = solve([[2, 1], [1, 3]], [3, 5])
    assert x == [Fraction(4, 5), Fraction(7, 5)]
    assert solve([[1, 1], [1, 1]], [1, 2]) is None


def test_sort_sign():
    assert sort_sign((3, 1, 2)) == (1, (1, 2, 3))
    assert sort_sign((2, 1)) == (-1, (1, 2))
    assert sort_sign((1, 1))[0] == 0


def test_top_cell_sample_is_totally_positive():
    for k, n in [(1, 5), (2, 6), (3, 7)]:
        P = sample_top_cell(k, n, 3)
        assert positivity_class(P) == "positive"
        assert all(v > 0 for v in pluckers(P).values.values())


def test_rank_deficient_point_rejected():
    with pytest.raises(GrassmannError):
        GrassmannPoint.from_rows([[1, 2, 3], [2, 4, 6]])


def test_cyc_refl_pre_preserve_nonnegativity():
    P = sample_top_cell(2, 6, 5)
    for Q in (cyc(P), refl(P)):
        assert positivity_class(oriented(Q)) == "positive"
    Q = pre(7, P)
    assert Q.ground == tuple(range(1, 8))
    assert Q.column(7) == (0, 0)
    assert positivity_class(oriented(Q)) == "nonnegative"
    assert same_point(delete_column(7, Q), P)


def test_cyc_shifts_pluckers():
    # [DERIVED] <I>(cyc P) = <I + 1>(P) exactly, thanks to the twist sign
    P = sample_top_cell(2, 5, 9)
    a, b = pluckers(P), pluckers(cyc(P))
    ratios = set()
    for I in itertools.combinations(range(1, 6), 2):
        shifted = tuple(sorted(i % 5 + 1 for i in I))
        ratios.add(b[I] / a[shifted])
    assert ratios == {1}


def test_row_operations_keep_the_point():
    P = sample_top_cell(2, 5, 1)
    r0, r1 = P.entries
    Q = GrassmannPoint.from_rows([[x + 3 * y for x, y in zip(r0, r1)], r1])
    assert same_point(P, Q)
    assert pluckers(P).proportional(pluckers(Q))


def test_matrix_from_pluckers_round_trip():
    P = sample_top_cell(3, 7, 2)
    assert same_point(matrix_from_pluckers(pluckers(P)), P)


def test_sample_Z_positive():
    for k, n in [(1, 6), (2, 7), (2, 8)]:
        assert sample_Z(k, n, 4).is_positive()


def test_cauchy_binet_twistors_match_direct():
    # [DERIVED] direct (k+4) x (k+4) determinants
    k, n = 2, 7
    C = sample_top_cell(k, n, 11)
    Z = sample_Z(k, n, 12)
    rows = [[sum(C.entries[r][i] * Z.entries[i][c] for i in range(n)) for c in range(k + 4)]
            for r in range(k)]
    Y = GrassmannPoint.from_rows(rows)
    direct = twistors(Y, Z)
    cb = twistors_cauchy_binet(pluckers(C).values, k, n, z_minors(Z))
    assert all(direct.values[I] == cb[I] for I in direct.values)


def test_point_json_round_trip():
    P = sample_top_cell(2, 6, 8)
    assert GrassmannPoint.from_json(P.to_json()) == P
