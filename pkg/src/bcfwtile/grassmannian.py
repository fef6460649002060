"""Points of the Grassmannian, Plücker and twistor coordinates.

A point is stored as a k x |N| matrix over an explicit ordered ground set N.
Plücker values are keyed by sorted tuples of ground labels; lookups with
unsorted tuples pick up the sign of the sorting permutation.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .linalg import as_rat, clear_denominators, det, rank, rat_str, rref, sort_sign


class GrassmannError(ValueError):
    pass


def make_rng(seed) -> random.Random:
    """Seeded generator.  Accepts an int, an existing Random, or None (seed 0)."""
    if isinstance(seed, random.Random):
        return seed
    return random.Random(0 if seed is None else seed)


def spawn(rng: random.Random) -> random.Random:
    """Derive an independent child stream from ``rng``."""
    return random.Random(rng.getrandbits(64))


@dataclass(frozen=True)
class GrassmannPoint:
    """Row span of a full-rank k x |ground| rational matrix."""

    k: int
    ground: tuple[int, ...]
    entries: tuple[tuple[Fraction, ...], ...]
    seed: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.entries) != self.k:
            raise GrassmannError("row count does not match k")
        if any(len(r) != len(self.ground) for r in self.entries):
            raise GrassmannError("row length does not match the ground set")
        if list(self.ground) != sorted(set(self.ground)):
            raise GrassmannError("ground set must be strictly increasing")
        if self.k and rank(self.entries) != self.k:
            raise GrassmannError("not a Grassmannian point")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ground: Sequence[int] | None = None,
                  seed: int | None = None) -> "GrassmannPoint":
        rows = [tuple(as_rat(x) for x in r) for r in rows]
        if ground is None:
            width = len(rows[0]) if rows else 0
            ground = range(1, width + 1)
        return cls(len(rows), tuple(ground), tuple(rows), seed)

    @property
    def n(self) -> int:
        return len(self.ground)

    def column(self, label: int) -> tuple[Fraction, ...]:
        j = self.ground.index(label)
        return tuple(r[j] for r in self.entries)

    def minor(self, labels: Sequence[int]):
        pos = [self.ground.index(i) for i in labels]
        return det([[r[j] for j in pos] for r in self.entries])

    def integer_rows(self) -> list[list[int]]:
        """Rows rescaled by positive integers; same point, same orientation."""
        return clear_denominators(self.entries)

    def to_json(self) -> dict:
        return {"k": self.k, "ground": list(self.ground),
                "entries": [[rat_str(x) for x in r] for r in self.entries]}

    @classmethod
    def from_json(cls, data: Mapping) -> "GrassmannPoint":
        return cls.from_rows(data["entries"], data["ground"]) if data["k"] else \
            cls(0, tuple(data["ground"]), ())


@dataclass(frozen=True)
class PluckerVector:
    """Plücker coordinates keyed by sorted k-subsets of the ground set."""

    k: int
    ground: tuple[int, ...]
    values: Mapping[tuple[int, ...], Fraction]

    def __getitem__(self, idx: Iterable[int]):
        sign, key = sort_sign(idx)
        if sign == 0:
            return Fraction(0)
        return sign * self.values.get(key, Fraction(0))

    def support(self) -> frozenset[tuple[int, ...]]:
        return frozenset(I for I, v in self.values.items() if v != 0)

    def proportional(self, other: "PluckerVector") -> bool:
        """Exact projective equality by cross-multiplication."""
        if self.k != other.k or self.ground != other.ground:
            return False
        keys = set(self.values) | set(other.values)
        ref = next((I for I in sorted(keys) if self[I] != 0), None)
        if ref is None or other[ref] == 0:
            return False
        a0, b0 = self[ref], other[ref]
        return all(self[I] * b0 == other[I] * a0 for I in keys)

    def to_json(self) -> list[dict]:
        return [{"I": list(I), "v": rat_str(v)} for I, v in sorted(self.values.items())]


@dataclass(frozen=True)
class ZMatrix:
    """An n x (k+4) matrix, expected to have all maximal minors positive."""

    k: int
    entries: tuple[tuple[Fraction, ...], ...]
    seed: int | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def width(self) -> int:
        return self.k + 4

    def is_positive(self) -> bool:
        return all(det([self.entries[i] for i in S]) > 0
                   for S in itertools.combinations(range(self.n), self.width))

    def row(self, label: int) -> tuple[Fraction, ...]:
        return self.entries[label - 1]

    def to_json(self) -> dict:
        return {"k": self.k, "entries": [[rat_str(x) for x in r] for r in self.entries]}


@dataclass(frozen=True)
class TwistorVector:
    """Twistor coordinates of a point Y in Gr(k, k+4), keyed by sorted 4-subsets."""

    values: Mapping[tuple[int, ...], Fraction]

    def __getitem__(self, idx: Iterable[int]):
        sign, key = sort_sign(idx)
        if sign == 0:
            return Fraction(0)
        if key not in self.values:
            raise KeyError(f"no twistor coordinate for {key}")
        return sign * self.values[key]

    def scaled(self, lam) -> "TwistorVector":
        return TwistorVector({I: lam * v for I, v in self.values.items()})

    def proportional(self, other: "TwistorVector") -> bool:
        keys = set(self.values) | set(other.values)
        ref = next((I for I in sorted(keys) if self.values.get(I, 0) != 0), None)
        if ref is None or other.values.get(ref, 0) == 0:
            return False
        a0, b0 = self.values[ref], other.values[ref]
        return all(self.values.get(I, 0) * b0 == other.values.get(I, 0) * a0 for I in keys)

    def to_json(self) -> list[dict]:
        return [{"I": list(I), "v": rat_str(v)} for I, v in sorted(self.values.items())]


def pluckers(P: GrassmannPoint) -> PluckerVector:
    rows = P.entries
    vals = {}
    for pos in itertools.combinations(range(P.n), P.k):
        vals[tuple(P.ground[j] for j in pos)] = Fraction(det([[r[j] for j in pos] for r in rows]))
    return PluckerVector(P.k, P.ground, vals)


def integer_pluckers(rows: Sequence[Sequence[int]], ground: Sequence[int]) -> dict[tuple[int, ...], int]:
    """Plücker values of an integer matrix (fast path, no Fractions)."""
    k = len(rows)
    return {tuple(ground[j] for j in pos): det([[r[j] for j in pos] for r in rows])
            for pos in itertools.combinations(range(len(ground)), k)}


def positivity_class(P: GrassmannPoint) -> str:
    vals = [v for v in pluckers(P).values.values()]
    pos = any(v > 0 for v in vals)
    neg = any(v < 0 for v in vals)
    if pos and neg:
        return "neither"
    if all(v != 0 for v in vals):
        return "positive"
    return "nonnegative"


def oriented(P: GrassmannPoint) -> GrassmannPoint:
    """Flip the first row if needed so that the nonzero Plückers are positive.

    Only meaningful for nonnegative points; twistor signs depend on this choice.
    """
    if P.k == 0:
        return P
    for pos in itertools.combinations(range(P.n), P.k):
        v = det([[r[j] for j in pos] for r in P.entries])
        if v != 0:
            if v > 0:
                return P
            rows = [tuple(-x for x in P.entries[0])] + list(P.entries[1:])
            return GrassmannPoint(P.k, P.ground, tuple(rows), P.seed)
    raise GrassmannError("not a Grassmannian point")


def cyc(P: GrassmannPoint) -> GrassmannPoint:
    """v_1 -> (-1)^(k-1) v_n and v_i -> v_(i-1), positions taken in the ground set."""
    s = -1 if P.k % 2 == 0 else 1
    rows = tuple(tuple(r[1:]) + (s * r[0],) for r in P.entries)
    return GrassmannPoint(P.k, P.ground, rows, P.seed)


def refl(P: GrassmannPoint) -> GrassmannPoint:
    """v_i -> v_(n+1-i); the top row is rescaled by (-1)^(k choose 2)."""
    rows = [tuple(reversed(r)) for r in P.entries]
    if rows and (P.k * (P.k - 1) // 2) % 2:
        rows[0] = tuple(-x for x in rows[0])
    return GrassmannPoint(P.k, P.ground, tuple(rows), P.seed)


def pre(i: int, P: GrassmannPoint) -> GrassmannPoint:
    """Insert a zero column at label i."""
    if i in P.ground:
        raise GrassmannError(f"label {i} already in the ground set")
    ground = tuple(sorted(P.ground + (i,)))
    j = ground.index(i)
    rows = tuple(r[:j] + (Fraction(0),) + r[j:] for r in P.entries)
    return GrassmannPoint(P.k, ground, rows, P.seed)


def delete_column(i: int, P: GrassmannPoint) -> GrassmannPoint:
    j = P.ground.index(i)
    rows = tuple(r[:j] + r[j + 1:] for r in P.entries)
    return GrassmannPoint(P.k, P.ground[:j] + P.ground[j + 1:], rows, P.seed)


def same_point(P: GrassmannPoint, Q: GrassmannPoint) -> bool:
    if P.k != Q.k or P.ground != Q.ground:
        return False
    if P.k == 0:
        return True
    return rref(P.entries)[0] == rref(Q.entries)[0]


def twistors(Y: GrassmannPoint, Z: ZMatrix) -> TwistorVector:
    """Determinants of Y's rows stacked over four rows of Z."""
    if Y.k != Z.k or Y.n != Z.width:
        raise GrassmannError("dimension mismatch between Y and Z")
    rows = [list(r) for r in Y.entries]
    vals = {}
    for I in itertools.combinations(range(1, Z.n + 1), 4):
        vals[I] = Fraction(det(rows + [list(Z.row(i)) for i in I]))
    return TwistorVector(vals)


def z_minors(Z: ZMatrix) -> dict[tuple[int, ...], Fraction]:
    """All maximal minors of Z keyed by sorted row labels."""
    return {tuple(i + 1 for i in S): det([Z.entries[i] for i in S])
            for S in itertools.combinations(range(Z.n), Z.width)}


def twistors_cauchy_binet(plk: Mapping[tuple[int, ...], object], k: int, n: int,
                          zmin: Mapping[tuple[int, ...], object]) -> dict[tuple[int, ...], object]:
    """Twistors of Y = CZ from the Plückers of C and the maximal minors of Z.

    <<I>> = sum over k-subsets J disjoint from I of sign(J, I) <J>_C det Z_{J u I}.
    """
    out = {}
    labels = range(1, n + 1)
    for I in itertools.combinations(labels, 4):
        total = 0
        rest = [x for x in labels if x not in I]
        for J in itertools.combinations(rest, k):
            p = plk.get(J, 0)
            if p == 0:
                continue
            inv = sum(1 for j in J for i in I if j > i)
            S = tuple(sorted(J + I))
            term = p * zmin[S]
            total += -term if inv % 2 else term
        out[I] = total
    return out


def _random_increasing(rng: random.Random, count: int, spread: int = 6) -> list[int]:
    vals, t = [], 0
    for _ in range(count):
        t += rng.randint(1, spread)
        vals.append(t)
    return vals


def sample_top_cell(k: int, n: int, rng=None, ground: Sequence[int] | None = None,
                    mixing: int | None = None) -> GrassmannPoint:
    """A totally positive point: Vandermonde rows times positive bidiagonal factors."""
    if not 0 <= k <= n:
        raise GrassmannError("need 0 <= k <= n")
    rng = make_rng(rng)
    seed = rng.getrandbits(32)
    local = random.Random(seed)
    ground = tuple(ground) if ground is not None else tuple(range(1, n + 1))
    if k == 0:
        return GrassmannPoint(0, ground, (), seed)
    ts = _random_increasing(local, n)
    rows = [[t ** i for t in ts] for i in range(k)]
    # column operations by totally nonnegative elementary matrices keep all
    # maximal minors positive
    steps = 2 * n if mixing is None else mixing
    for _ in range(steps):
        j = local.randrange(n - 1)
        s = local.randint(0, 4)
        if local.random() < 0.5:
            for r in rows:
                r[j + 1] += s * r[j]
        else:
            for r in rows:
                r[j] += s * r[j + 1]
    return GrassmannPoint(k, ground, tuple(tuple(Fraction(x) for x in r) for r in rows), seed)


def sample_Z(k: int, n: int, rng=None) -> ZMatrix:
    """A positive n x (k+4) matrix built from a Vandermonde matrix with mixing."""
    if k + 4 > n:
        raise GrassmannError("need k + 4 <= n")
    rng = make_rng(rng)
    seed = rng.getrandbits(32)
    local = random.Random(seed)
    ts = _random_increasing(local, n, spread=4)
    rows = [[t ** j for j in range(k + 4)] for t in ts]
    # left multiplication by bidiagonal factors with nonnegative entries
    for _ in range(n):
        i = local.randrange(n - 1)
        s = local.randint(0, 3)
        if local.random() < 0.5:
            rows[i + 1] = [a + s * b for a, b in zip(rows[i + 1], rows[i])]
        else:
            rows[i] = [a + s * b for a, b in zip(rows[i], rows[i + 1])]
    return ZMatrix(k, tuple(tuple(Fraction(x) for x in r) for r in rows), seed)


def matrix_from_pluckers(PV: PluckerVector) -> GrassmannPoint:
    """Rebuild a matrix in the chart of the first nonzero basis I (identity on I)."""
    k, ground = PV.k, PV.ground
    if k == 0:
        return GrassmannPoint(0, ground, ())
    base = next((I for I in sorted(PV.values) if PV.values[I] != 0), None)
    if base is None:
        raise GrassmannError("not realizable: zero Plücker vector")
    d = PV.values[base]
    rows = []
    for r, ir in enumerate(base):
        row = []
        for j in ground:
            if j in base:
                row.append(Fraction(1 if j == ir else 0))
                continue
            J = tuple(sorted(set(base) - {ir} | {j}))
            pos = J.index(j)
            sgn = -1 if (pos - r) % 2 else 1
            row.append(sgn * Fraction(PV[J]) / d)
        rows.append(tuple(row))
    P = GrassmannPoint(k, ground, tuple(rows))
    if not pluckers(P).proportional(PV):
        raise GrassmannError("not realizable: Plücker relations fail")
    return P


def product_point(CL: GrassmannPoint, CR: GrassmannPoint, B: Sequence[int],
                  r: Sequence) -> GrassmannPoint:
    """Matrix form of the BCFW product on the ground set N_L u N_R.

    Rows are [left rows; new row; right rows].  The new row carries the five
    positive entries ``r`` at B = (a, b, c, d, n) with the entries at c, d, n
    twisted by (-1)^k_R.  Left rows have v_b promoted into column a, right rows
    have v_d and v_n promoted into columns c and d.  Column n of the left rows
    picks up -(-1)^k_R.  For positive r and nonnegative factors the result is
    nonnegative.
    """
    a, b, c, d, n = B
    ground = tuple(sorted(set(CL.ground) | set(CR.ground)))
    pos = {x: j for j, x in enumerate(ground)}
    s = -1 if CR.k % 2 else 1
    ra, rb, rc, rd, rn = (as_rat(x) for x in r)
    rc, rd, rn = rc * s, rd * s, rn * s
    width = len(ground)
    rows = []
    for row in CL.entries:
        v = [Fraction(0)] * width
        for x, val in zip(CL.ground, row):
            v[pos[x]] = val
        v[pos[a]] += v[pos[b]] * ra / rb
        v[pos[n]] *= -s
        rows.append(tuple(v))
    new = [Fraction(0)] * width
    for x, val in zip(B, (ra, rb, rc, rd, rn)):
        new[pos[x]] = val
    rows.append(tuple(new))
    for row in CR.entries:
        v = [Fraction(0)] * width
        for x, val in zip(CR.ground, row):
            v[pos[x]] = val
        ld, ln = v[pos[d]], v[pos[n]]
        v[pos[c]] += ld * rc / rd + ln * rc / rn
        v[pos[d]] += ln * rd / rn
        rows.append(tuple(v))
    return GrassmannPoint(len(rows), ground, tuple(rows))


def point_to_json(P: GrassmannPoint) -> dict:
    return P.to_json()
