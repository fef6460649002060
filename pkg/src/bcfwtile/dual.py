"""Exact forward-mode differentiation with vector dual numbers over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class Dual:
    """A value together with its gradient with respect to a fixed list of parameters."""

    __slots__ = ("val", "grad")

    def __init__(self, val, grad: Sequence):
        self.val = Fraction(val)
        self.grad = tuple(grad)

    @classmethod
    def const(cls, val, size: int) -> "Dual":
        return cls(val, (Fraction(0),) * size)

    @classmethod
    def variable(cls, val, index: int, size: int) -> "Dual":
        g = [Fraction(0)] * size
        g[index] = Fraction(1)
        return cls(val, g)

    def _lift(self, other) -> "Dual":
        if isinstance(other, Dual):
            return other
        return Dual.const(other, len(self.grad))

    def __add__(self, other):
        o = self._lift(other)
        return Dual(self.val + o.val, [a + b for a, b in zip(self.grad, o.grad)])

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.val, [-a for a in self.grad])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Dual):
            o = Fraction(other)
            return Dual(self.val * o, [a * o for a in self.grad])
        return Dual(self.val * other.val, [self.val * b + other.val * a for a, b in zip(self.grad, other.grad)])

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o.val == 0:
            raise ZeroDivisionError("dual division by a zero value")
        inv = 1 / o.val
        return Dual(self.val * inv, [(a * o.val - self.val * b) * inv * inv for a, b in zip(self.grad, o.grad)])

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __eq__(self, other):
        o = self._lift(other)
        return self.val == o.val and self.grad == o.grad

    def __hash__(self):
        return hash((self.val, self.grad))

    def __repr__(self):
        return f"Dual({self.val}, {list(self.grad)})"


def solve_dual(A: list, Bcols: list) -> list:
    """Solve A X = B for square A with dual entries (Gauss-Jordan, nonzero-value pivots)."""
    n = len(A)
    m = [list(A[i]) + list(Bcols[i]) for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c].val != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular pivot block")
        m[c], m[piv] = m[piv], m[c]
        p = m[c][c]
        m[c] = [x / p for x in m[c]]
        for r in range(n):
            f = m[r][c]
            if r != c and (f.val != 0 or any(f.grad)):
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]
