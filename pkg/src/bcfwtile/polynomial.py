"""Polynomials in formal Plücker symbols <i j k l> of Gr(4, n).

A monomial is a sorted tuple of sorted 4-tuples; coefficients are Fractions.
The canonical form modulo the Plücker relations is the expansion in standard
monomials (semistandard tableaux with 4 rows), computed by straightening.
"""

from __future__ import annotations

import itertools
import random
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping, Sequence

from .linalg import as_rat, det, rat_str, solve, sort_sign

Symbol = tuple  # sorted 4-tuple of labels
Monomial = tuple  # sorted tuple of symbols

M = 4


class PolyError(ValueError):
    pass


def _mono_key(m: Monomial):
    return (len(m), m)


@dataclass(frozen=True)
class PluckerPoly:
    terms: tuple  # ((monomial, Fraction), ...) sorted by degree then lex, no zeros

    @classmethod
    def from_dict(cls, d: Mapping) -> "PluckerPoly":
        items = [(m, as_rat(c)) for m, c in d.items() if c != 0]
        items.sort(key=lambda t: _mono_key(t[0]))
        return cls(tuple(items))

    @classmethod
    def symbol(cls, idx: Iterable[int]) -> "PluckerPoly":
        s, I = sort_sign(idx)
        if not I:
            raise PolyError("empty Plücker symbol")
        if s == 0:
            return ZERO
        return cls((((I,), Fraction(s)),))

    @classmethod
    def const(cls, c) -> "PluckerPoly":
        return cls.from_dict({(): c})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        other = _coerce(other)
        d = self.as_dict()
        for m, c in other.terms:
            d[m] = d.get(m, 0) + c
        return PluckerPoly.from_dict(d)

    __radd__ = __add__

    def __neg__(self):
        return PluckerPoly(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return PluckerPoly.from_dict({m: c * other for m, c in self.terms})
        other = _coerce(other)
        d: dict = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = tuple(sorted(m1 + m2))
                d[m] = d.get(m, 0) + c1 * c2
        return PluckerPoly.from_dict(d)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = ONE
        for _ in range(e):
            out = out * self
        return out

    @property
    def degrees(self) -> set:
        return {len(m) for m, _ in self.terms}

    @property
    def degree(self) -> int:
        ds = self.degrees
        if len(ds) != 1:
            raise PolyError("polynomial is not homogeneous")
        return ds.pop()

    def is_homogeneous(self) -> bool:
        return len(self.degrees) <= 1

    def symbols(self) -> set:
        return {s for m, _ in self.terms for s in m}

    def indices(self) -> set:
        return {i for s in self.symbols() for i in s}

    def leading(self) -> tuple:
        return self.terms[-1]

    def evaluate(self, values):
        """Substitute values[I] for each symbol (values may be a mapping or callable)."""
        get = values if callable(values) else values.__getitem__
        total = 0
        cache = {}
        for m, c in self.terms:
            t = c
            for s in m:
                if s not in cache:
                    cache[s] = get(s)
                t = t * cache[s]
            total = total + t
        return total

    def relabel(self, mapping: Mapping[int, int]) -> "PluckerPoly":
        """Rename indices; symbols are re-sorted without a permutation sign."""
        d: dict = {}
        for m, c in self.terms:
            mm = tuple(sorted(tuple(sorted(mapping[i] for i in s)) for s in m))
            d[mm] = d.get(mm, 0) + c
        return PluckerPoly.from_dict(d)

    def normalized(self) -> "PluckerPoly":
        """Integer coefficients with gcd 1 and positive leading coefficient."""
        if not self.terms:
            return self
        den = 1
        for _, c in self.terms:
            den = den * c.denominator // gcd(den, c.denominator)
        nums = [int(c * den) for _, c in self.terms]
        g = 0
        for x in nums:
            g = gcd(g, x)
        if nums[-1] < 0:
            g = -g
        return PluckerPoly(tuple((m, Fraction(x, g)) for (m, _), x in zip(self.terms, nums)))

    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in reversed(self.terms):
            sym = "*".join("<" + " ".join(map(str, s)) + ">" for s in m)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not m:
                body = str(a)
            elif a == 1:
                body = sym
            else:
                body = f"{a}*{sym}"
            parts.append((sign, body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def compact(self) -> str:
        """Short text with symbols written as digit strings, e.g. <1247><3567> - <1237><4567>."""
        def sym(s):
            return "<" + ("".join(map(str, s)) if max(s) < 10 else " ".join(map(str, s))) + ">"

        if not self.terms:
            return "0"
        out = ""
        for j, (m, c) in enumerate(reversed(self.terms)):
            a = abs(c)
            body = "".join(sym(s) for s in m) or str(a)
            if m and a != 1:
                body = f"{a}*{body}"
            if j == 0:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return out

    def __str__(self):
        return self.compact()

    def to_json(self) -> list:
        return [{"monomial": [list(s) for s in m], "c": rat_str(c)} for m, c in self.terms]

    @classmethod
    def from_json(cls, data) -> "PluckerPoly":
        return cls.from_dict({tuple(tuple(s) for s in t["monomial"]): as_rat(t["c"]) for t in data})

    @classmethod
    def parse(cls, text: str) -> "PluckerPoly":
        """Read the text format: signed sums of terms like 2*<1 2 4 7>*<3 5 6 7>."""
        s = text.replace(" - ", " + -").replace("−", "-")
        total = ZERO
        for raw in s.split(" + "):
            term = raw.strip()
            if not term:
                continue
            neg = term.startswith("-")
            term = term.lstrip("-").strip()
            coeff = Fraction(1)
            mono = ONE
            for factor in re.findall(r"<[^>]*>|[0-9/]+", term):
                if factor.startswith("<"):
                    body = factor[1:-1].strip()
                    idx = [int(x) for x in body.split()] if " " in body else [int(ch) for ch in body]
                    mono = mono * PluckerPoly.symbol(idx)
                else:
                    coeff *= Fraction(factor)
            total = total + mono * (-coeff if neg else coeff)
        return total


ZERO = PluckerPoly(())
ONE = PluckerPoly(((((), Fraction(1)),)))


def _coerce(x) -> PluckerPoly:
    if isinstance(x, PluckerPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return PluckerPoly.const(x)
    raise TypeError(f"cannot use {x!r} as a Plücker polynomial")


def sym(*idx: int) -> PluckerPoly:
    """Shorthand: sym(1, 2, 4, 7) or sym(1247) for single-digit labels."""
    if len(idx) == 1:
        idx = tuple(int(ch) for ch in str(idx[0]))
    return PluckerPoly.symbol(idx)


# ---------------------------------------------------------------- straightening

def _leq(I, J) -> bool:
    return all(x <= y for x, y in zip(I, J))


def is_standard(m: Monomial) -> bool:
    return all(_leq(m[j], m[j + 1]) for j in range(len(m) - 1))


@lru_cache(maxsize=None)
def _garnir(I: Symbol, J: Symbol) -> tuple:
    """One straightening step for the non-standard pair I <lex J."""
    r = next(j for j in range(len(I)) if I[j] > J[j])
    A = I[r:]
    W = A + J[: r + 1]
    out: dict = {}
    size = len(A)
    for S in itertools.combinations(range(len(W)), size):
        if S == tuple(range(size)):
            continue
        rest = tuple(t for t in range(len(W)) if t not in S)
        ps, _ = sort_sign(S + rest)
        s1, c1 = sort_sign(I[:r] + tuple(W[t] for t in S))
        s2, c2 = sort_sign(tuple(W[t] for t in rest) + J[r + 1:])
        if s1 == 0 or s2 == 0:
            continue
        key = tuple(sorted((c1, c2)))
        out[key] = out.get(key, 0) - ps * s1 * s2
    return tuple((k, v) for k, v in out.items() if v)


@lru_cache(maxsize=None)
def _pair_nf(I: Symbol, J: Symbol) -> tuple:
    if _leq(I, J):
        return (((I, J), 1),)
    out: dict = {}
    for (P, Q), c in _garnir(I, J):
        for pq, c2 in _pair_nf(P, Q):
            out[pq] = out.get(pq, 0) + c * c2
    return tuple((k, v) for k, v in out.items() if v)


def straighten(p: PluckerPoly) -> PluckerPoly:
    """Expand p in the basis of standard monomials (canonical modulo Plücker relations)."""
    done: dict = {}
    work: dict = {}
    for m, c in p.terms:
        work[m] = work.get(m, 0) + c
    while work:
        m, c = work.popitem()
        if c == 0:
            continue
        j = next((j for j in range(len(m) - 1) if not _leq(m[j], m[j + 1])), None)
        if j is None:
            done[m] = done.get(m, 0) + c
            continue
        for (P, Q), c2 in _pair_nf(m[j], m[j + 1]):
            mm = tuple(sorted(m[:j] + (P, Q) + m[j + 2:]))
            work[mm] = work.get(mm, 0) + c * c2
    return PluckerPoly.from_dict(done)


def canonical(p: PluckerPoly) -> PluckerPoly:
    return straighten(p).normalized()


def equal_mod_relations(p: PluckerPoly, q: PluckerPoly) -> bool:
    return not straighten(p - q)


def content(m: Monomial) -> Counter:
    return Counter(i for s in m for i in s)


def standard_monomials(cont: Mapping[int, int], rows: int = M) -> list:
    """All semistandard tableaux with ``rows`` rows (as monomials) with the given content."""
    cont = Counter({i: c for i, c in cont.items() if c})
    total = sum(cont.values())
    if total % rows:
        return []
    D = total // rows
    labels = sorted(cont)
    out = []

    def rec(cols, left):
        if len(cols) == D:
            out.append(tuple(cols))
            return
        avail = [i for i in labels if left[i] > 0]
        for col in itertools.combinations(avail, rows):
            if cols and not _leq(cols[-1], col):
                continue
            for i in col:
                left[i] -= 1
            rec(cols + [col], left)
            for i in col:
                left[i] += 1

    rec([], Counter(cont))
    return out


def divide(N: PluckerPoly, t: PluckerPoly) -> PluckerPoly | None:
    """Exact quotient N / t modulo the Plücker relations, or None if t does not divide N.

    N must be homogeneous with respect to the torus action (a single content
    class per term group is fine; classes are treated separately).
    """
    N = straighten(N)
    t = straighten(t)
    if not t:
        raise PolyError("division by zero")
    if not N:
        return ZERO
    classes: dict = {}
    for m, c in N.terms:
        key = tuple(sorted(content(m).items()))
        classes.setdefault(key, {})[m] = c
    tclasses = {tuple(sorted(content(m).items())) for m, _ in t.terms}
    if len(tclasses) != 1:
        raise PolyError("divisor must be torus-homogeneous")
    tc = Counter(dict(tclasses.pop()))
    rows = len(t.terms[0][0][0]) if t.terms[0][0] else M
    quotient = ZERO
    for key, terms in classes.items():
        qc = Counter(dict(key))
        qc.subtract(tc)
        if any(v < 0 for v in qc.values()):
            return None
        basis = standard_monomials(qc, rows)
        if not basis:
            return None
        images = [straighten(t * PluckerPoly(((b, Fraction(1)),))).as_dict() for b in basis]
        monos = sorted(set(terms) | {m for im in images for m in im})
        A = [[im.get(r, 0) for im in images] for r in monos]
        rhs = [terms.get(r, 0) for r in monos]
        x = solve(A, rhs)
        if x is None:
            return None
        quotient = quotient + PluckerPoly.from_dict(dict(zip(basis, x)))
    return quotient


# ---------------------------------------------------------------- evaluation

def random_points(n: int, count: int, seed: int = 0, ground: Sequence[int] | None = None,
                  rows: int = M) -> list:
    """Random integer rows x n matrices, returned as symbol -> minor lookup functions."""
    rng = random.Random(seed)
    ground = tuple(ground) if ground is not None else tuple(range(1, n + 1))
    pts = []
    for _ in range(count):
        cols = {g: [rng.randint(-30, 30) for _ in range(rows)] for g in ground}
        pts.append(_minor_lookup(cols, rows))
    return pts


def _minor_lookup(cols, rows):
    cache = {}

    def get(I):
        if len(I) != rows:
            raise PolyError(f"symbol {I} does not have {rows} indices")
        if I not in cache:
            cache[I] = det([[cols[i][r] for i in I] for r in range(rows)])
        return cache[I]

    return get


def numeric_equal(p: PluckerPoly, q: PluckerPoly, count: int = 20, seed: int = 0) -> bool:
    idx = p.indices() | q.indices()
    if not idx:
        return p == q
    sizes = {len(x) for x in p.symbols() | q.symbols()} or {M}
    pts = random_points(0, count, seed, sorted(idx), rows=sizes.pop())
    return all(p.evaluate(v) == q.evaluate(v) for v in pts)


def same_up_to_sign(p: PluckerPoly, q: PluckerPoly) -> bool:
    return p == q or p == -q
