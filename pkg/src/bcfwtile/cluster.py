"""Quivers, seeds and mutation for Grassmannian cluster algebras; chord-diagram quivers."""

from __future__ import annotations

import random
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .bcfw import ChordDiagram, chord_relations
from .linalg import det
from .polynomial import ONE, PluckerPoly, divide, random_points, straighten

M = 4


class ClusterError(ValueError):
    pass


# ---------------------------------------------------------------- quivers

@dataclass(frozen=True)
class Quiver:
    labels: tuple
    mutable: tuple  # bool per vertex
    arrows: tuple  # (((u, v), multiplicity), ...) with u, v vertex indices

    @classmethod
    def from_arrows(cls, labels, mutable, arrows: Iterable) -> "Quiver":
        cnt = Counter()
        for u, v in arrows:
            cnt[(u, v)] += 1
        return cls._from_counter(tuple(labels), tuple(mutable), cnt)

    @classmethod
    def _from_counter(cls, labels, mutable, cnt: Counter) -> "Quiver":
        # cancel 2-cycles
        b = Counter()
        for (u, v), m in cnt.items():
            if u == v:
                raise ClusterError("quiver has a loop")
            b[(u, v)] += m
            b[(v, u)] -= m
        arrows = tuple(sorted(((u, v), m) for (u, v), m in b.items() if m > 0))
        return cls(labels, mutable, arrows)

    def counter(self) -> Counter:
        return Counter(dict(self.arrows))

    def b(self, u: int, v: int) -> int:
        c = self.counter()
        return c.get((u, v), 0) - c.get((v, u), 0)

    def check(self) -> None:
        c = self.counter()
        for (u, v) in c:
            if u == v:
                raise ClusterError("oriented 1-cycle")
            if (v, u) in c:
                raise ClusterError("oriented 2-cycle")

    def mutate(self, k: int) -> "Quiver":
        if not self.mutable[k]:
            raise ClusterError(f"vertex {self.labels[k]} is frozen")
        c = self.counter()
        new = Counter()
        ins = [(u, m) for (u, v), m in c.items() if v == k]
        outs = [(v, m) for (u, v), m in c.items() if u == k]
        for (u, v), m in c.items():
            if u == k or v == k:
                new[(v, u)] += m
            else:
                new[(u, v)] += m
        for u, m1 in ins:
            for v, m2 in outs:
                new[(u, v)] += m1 * m2
        Q = Quiver._from_counter(self.labels, self.mutable, new)
        Q.check()
        return Q

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": i, "label": str(l), "mutable": m} for i, (l, m) in enumerate(zip(self.labels, self.mutable))],
            "arrows": [{"from": u, "to": v, "multiplicity": m} for (u, v), m in self.arrows],
        }

    def to_dot(self, dotted: Iterable = ()) -> str:
        dotted = set(dotted)
        lines = ["digraph Q {"]
        for i, (l, m) in enumerate(zip(self.labels, self.mutable)):
            shape = "ellipse" if m else "box"
            lines.append(f'  v{i} [label="{l}", shape={shape}];')
        for (u, v), m in self.arrows:
            style = ', style=dotted' if (u, v) in dotted else ""
            for _ in range(m):
                lines.append(f"  v{u} -> v{v} [{style.lstrip(', ')}];" if style else f"  v{u} -> v{v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- seeds

@dataclass(frozen=True)
class Seed:
    quiver: Quiver
    cluster: tuple  # PluckerPoly per vertex
    history: tuple = ()  # mutated vertex indices from the initial seed

    def __post_init__(self):
        if len(self.cluster) != len(self.quiver.labels):
            raise ClusterError("cluster size must equal vertex count")

    def exchange_monomials(self, k: int) -> tuple[PluckerPoly, PluckerPoly]:
        P1, P2 = ONE, ONE
        for (u, v), m in self.quiver.arrows:
            if v == k:
                P1 = P1 * self.cluster[u] ** m
            elif u == k:
                P2 = P2 * self.cluster[v] ** m
        return P1, P2

    def mutate(self, k: int) -> "Seed":
        P1, P2 = self.exchange_monomials(k)
        q = divide(P1 + P2, self.cluster[k])
        if q is None or not q:
            raise ClusterError("exchange relation failed")
        cluster = list(self.cluster)
        cluster[k] = q.normalized()
        return Seed(self.quiver.mutate(k), tuple(cluster), self.history + (k,))

    def mutate_sequence(self, seq: Sequence[int]) -> "Seed":
        S = self
        for k in seq:
            S = S.mutate(k)
        return S

    def index_of(self, p: PluckerPoly) -> int | None:
        q = straighten(p).normalized()
        for i, x in enumerate(self.cluster):
            if x == q or x == -q:
                return i
        return None

    def to_json(self) -> dict:
        return {
            "quiver": self.quiver.to_json(),
            "cluster": [x.compact() for x in self.cluster],
            "mutations": [str(self.quiver.labels[k]) for k in self.history],
        }


def rectangle_symbol(k: int, n: int, i: int, j: int) -> tuple:
    """Plücker index of the i x j rectangle in the k x (n-k) box."""
    a = list(range(n - k - j + 1, n - k - j + i + 1))
    b = list(range(n - k + i + 1, n + 1))
    return tuple(a + b)


def rectangles_seed(k: int, n: int) -> Seed:
    """Grid seed of Gr(k, n): rectangles i x j, frozen on the boundary rows/columns."""
    if not 2 <= k <= n - 2:
        raise ClusterError("need 2 <= k <= n - 2")
    cells = [(0, 0)] + [(i, j) for i in range(1, k + 1) for j in range(1, n - k + 1)]
    idx = {c: t for t, c in enumerate(cells)}

    def sym_of(c):
        i, j = c
        return tuple(range(n - k + 1, n + 1)) if c == (0, 0) else rectangle_symbol(k, n, i, j)

    labels = tuple("".join(map(str, sym_of(c))) if n < 10 else " ".join(map(str, sym_of(c))) for c in cells)
    mutable = tuple(c != (0, 0) and c[0] < k and c[1] < n - k for c in cells)
    # orientation chosen to agree with the chord-diagram rule table; the
    # opposite quiver carries the same cluster variables
    arrows = []
    for (i, j) in cells[1:]:
        if i < k:
            arrows.append(((i + 1, j), (i, j)))
        if j < n - k:
            arrows.append(((i, j + 1), (i, j)))
        if i < k and j < n - k:
            arrows.append(((i, j), (i + 1, j + 1)))
    arrows.append(((1, 1), (0, 0)))
    keep = [(idx[u], idx[v]) for u, v in arrows if mutable[idx[u]] or mutable[idx[v]]]
    Q = Quiver.from_arrows(labels, mutable, keep)
    cluster = tuple(PluckerPoly.symbol(sym_of(c)) for c in cells)
    return Seed(Q, cluster)


# ---------------------------------------------------------------- compatibility search

class _Fingerprint:
    """Exact values of Plücker polynomials at fixed random integer points of Gr(k, n)."""

    def __init__(self, n: int, rows: int = M, count: int = 20, seed: int = 12345):
        self.points = random_points(n, count, seed, rows=rows)

    def values(self, p: PluckerPoly) -> tuple:
        return tuple(Fraction(p.evaluate(v)) for v in self.points)

    @staticmethod
    def key(vals: tuple) -> tuple:
        s = next((1 if x > 0 else -1 for x in vals if x != 0), 1)
        return tuple(s * x for x in vals)


@dataclass(frozen=True)
class CompatResult:
    status: str  # "compatible" or "unknown"
    witness: Seed | None
    sequence: tuple
    explored: int

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "explored": self.explored,
            "sequence": list(self.sequence),
            "witness": self.witness.to_json() if self.witness else None,
        }


def check_compatible(vars: Iterable[PluckerPoly], k: int, n: int, depth: int = 12,
                     max_seeds: int = 200000) -> CompatResult:
    """Breadth-first mutation search from the rectangles seed for a cluster containing ``vars``.

    Variables are identified up to sign by exact values at 20 random points.
    The witness seed is rebuilt symbolically along the found mutation path.
    """
    start = rectangles_seed(k, n)
    fp = _Fingerprint(n, k)
    targets = {fp.key(fp.values(p)) for p in vars}
    Q0 = start.quiver
    vals0 = tuple(fp.values(x) for x in start.cluster)

    def cluster_key(vals):
        return frozenset(fp.key(v) for v in vals)

    root = cluster_key(vals0)
    seen = {root}
    frontier = deque([(Q0, vals0, ())])
    explored = 0
    while frontier:
        Q, vals, seq = frontier.popleft()
        explored += 1
        keys = {fp.key(v) for v in vals}
        if targets <= keys:
            witness = start.mutate_sequence(seq)
            return CompatResult("compatible", witness, seq, explored)
        if len(seq) >= depth or explored >= max_seeds:
            continue
        for v in range(len(Q.labels)):
            if not Q.mutable[v]:
                continue
            P1 = [Fraction(1)] * len(fp.points)
            P2 = [Fraction(1)] * len(fp.points)
            for (a, b), m in Q.arrows:
                if b == v:
                    P1 = [x * y ** m for x, y in zip(P1, vals[a])]
                elif a == v:
                    P2 = [x * y ** m for x, y in zip(P2, vals[b])]
            new = tuple((x + y) / z for x, y, z in zip(P1, P2, vals[v]))
            nvals = vals[:v] + (new,) + vals[v + 1:]
            key = cluster_key(nvals)
            if key in seen:
                continue
            seen.add(key)
            frontier.append((Q.mutate(v), nvals, seq + (v,)))
    return CompatResult("unknown", None, (), explored)


# ---------------------------------------------------------------- chord quivers

LETTERS = ("alpha", "beta", "gamma", "delta", "epsilon")


def classify_frozen(D: ChordDiagram) -> dict:
    """(chord, letter) -> "frozen" or "mutable" by the facet rules."""
    rel = chord_relations(D)
    out = {}
    for i in range(1, D.k + 1):
        a_i, _, c_i, _ = D.chord(i)
        kids = rel.children(i)
        sticky_child = any((i, j) in rel.sticky for j in kids)
        same_end_child = any(frozenset((i, j)) in rel.same_end for j in kids)
        starts_at_end = any(D.chord(j)[2] == a_i for j in range(1, D.k + 1) if j != i)
        p = rel.parent[i]
        sticky_same_end_parent = p is not None and (p, i) in rel.sticky and frozenset((p, i)) in rel.same_end
        out[(i, "alpha")] = "mutable" if sticky_child else "frozen"
        out[(i, "beta")] = "mutable" if (starts_at_end or sticky_same_end_parent) else "frozen"
        out[(i, "gamma")] = "frozen"
        out[(i, "delta")] = "mutable" if same_end_child else "frozen"
        out[(i, "epsilon")] = "mutable" if same_end_child else "frozen"
    return out


@dataclass(frozen=True)
class ChordQuiver:
    quiver: Quiver  # vertex labels are (chord, letter)
    configurations: tuple  # (kind, i, j)
    dotted: tuple  # arrows drawn dotted

    def arrow_set(self) -> set:
        L = self.quiver.labels
        return {(L[u], L[v]) for (u, v), _ in self.quiver.arrows}


def table_arrows(D: ChordDiagram) -> list:
    """(kind, i, j, arrows, dotted) for every configuration of the rule table."""
    rel = chord_relations(D)
    out = []
    for i in range(1, D.k + 1):
        for j in range(1, D.k + 1):
            if i == j:
                continue
            A = lambda l, c: (c, l)  # noqa: E731
            if rel.siblings(i, j) and (j, i) in rel.head_to_tail:
                out.append(("head-to-tail", i, j, [
                    (A("beta", i), A("delta", j)),
                    (A("gamma", j), A("beta", i)),
                    (A("beta", i), A("alpha", i)),
                ], []))
            if rel.parent[j] == i and frozenset((i, j)) in rel.same_end:
                out.append(("same-end", i, j, [
                    (A("epsilon", i), A("delta", i)),
                    (A("delta", i), A("gamma", i)),
                    (A("gamma", j), A("delta", i)),
                    (A("delta", j), A("epsilon", i)),
                    (A("delta", i), A("delta", j)),
                    (A("epsilon", i), A("epsilon", j)),
                ], []))
            if rel.parent[j] == i and (i, j) in rel.sticky:
                dotted = []
                if frozenset((i, j)) in rel.same_end:
                    dotted = [(A("alpha", i), A("epsilon", i))]
                out.append(("sticky", i, j, [
                    (A("epsilon", j), A("alpha", i)),
                    (A("beta", i), A("alpha", i)),
                    (A("alpha", i), A("alpha", j)),
                ], dotted))
    return out


def quiver_from_chords(D: ChordDiagram) -> ChordQuiver:
    """Arrows involving mutable coordinate cluster variables, from the configuration table.

    Arrows are collected as a set, so the result does not depend on the order
    in which configurations are found.
    """
    labels = tuple((i, l) for i in range(1, D.k + 1) for l in LETTERS)
    frozen = classify_frozen(D)
    idx = {lab: t for t, lab in enumerate(labels)}
    arrows = set()
    dotted = set()
    configs = []
    for kind, i, j, arr, dot in table_arrows(D):
        configs.append((kind, i, j))
        arrows.update(arr)
        arrows.update(dot)
        dotted.update(dot)
    mutable = tuple(frozen[lab] == "mutable" for lab in labels)
    Q = Quiver.from_arrows(labels, mutable, [(idx[u], idx[v]) for u, v in sorted(arrows)])
    return ChordQuiver(Q, tuple(configs), tuple((idx[u], idx[v]) for u, v in sorted(dotted)))


def witness_arrows(seed: Seed, polys: dict) -> set:
    """Arrows of a seed among named variables: {(name_u, name_v)} for name -> polynomial."""
    pos = {}
    for name, p in polys.items():
        i = seed.index_of(p)
        if i is not None:
            pos[i] = name
    return {(pos[u], pos[v]) for (u, v), _ in seed.quiver.arrows if u in pos and v in pos}


def incident_arrows(seed: Seed, polys: dict) -> tuple[set, set]:
    """(arrows among named variables, arrows from named to unnamed variables) at named vertices."""
    pos = {}
    for name, p in polys.items():
        i = seed.index_of(p)
        if i is not None:
            pos[i] = name
    inside, outside = set(), set()
    for (u, v), _ in seed.quiver.arrows:
        if u in pos and v in pos:
            inside.add((pos[u], pos[v]))
        elif u in pos or v in pos:
            outside.add((pos.get(u), pos.get(v)))
    return inside, outside
