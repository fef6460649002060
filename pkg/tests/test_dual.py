from __future__ import annotations

from fractions import Fraction

import pytest

from bcfwtile.dual import Dual, solve_dual


def test_gradients_match_hand_derivatives():
    # f(x, y) = (x*y + 3x) / (y - 1) at (2, 3)
    x = Dual.variable(2, 0, 2)
    y = Dual.variable(3, 1, 2)
    f = (x * y + 3 * x) / (y - 1)
    assert f.val == 6
    # df/dx = (y + 3)/(y - 1) = 3; df/dy = (x(y - 1) - (xy + 3x))/(y - 1)^2 = -2
    assert f.grad == (Fraction(3), Fraction(-2))


def test_reverse_operators_and_constants():
    x = Dual.variable(4, 0, 1)
    assert (1 - x).grad == (-1,)
    assert (2 / x).grad == (Fraction(-1, 8),)
    assert Dual.const(5, 1) == 5
    with pytest.raises(ZeroDivisionError):
        x / Dual.const(0, 1)


def test_solve_dual():
    # [DERIVED] A(t) x = b with A = [[t, 1], [1, 2]], b = [1, 0] at t = 1
    # x = [2, -1] / (2t - 1); dx/dt = [-4, 2] / (2t - 1)^2
    t = Dual.variable(1, 0, 1)
    one, zero, two = (Dual.const(c, 1) for c in (1, 0, 2))
    X = solve_dual([[t, one], [one, two]], [[one], [zero]])
    assert X[0][0] == Dual(2, (-4,))
    assert X[1][0] == Dual(-1, (2,))


def test_solve_dual_pivots_and_singular():
    zero, one = Dual.const(0, 1), Dual.const(1, 1)
    X = solve_dual([[zero, one], [one, zero]], [[one], [zero]])
    assert X[0][0].val == 0 and X[1][0].val == 1
    with pytest.raises(ZeroDivisionError):
        solve_dual([[one, one], [one, one]], [[one], [one]])
