"""Plabic graphs: perfect orientations, positroids, faces and flow sampling.

Vertices are tuples: ("b", label) for boundary vertices and ("i", index) for
internal ones.  Every internal vertex stores its incident edges in clockwise
order; boundary vertices sit on the disk clockwise in increasing label order
and carry exactly one edge each.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .grassmannian import (
    GrassmannPoint,
    PluckerVector,
    make_rng,
    matrix_from_pluckers,
    pluckers,
    product_point,
)

BLACK = "black"
WHITE = "white"

Node = tuple  # ("b", label) or ("i", index)


class PlabicError(ValueError):
    pass


@dataclass(frozen=True)
class Positroid:
    k: int
    ground: tuple[int, ...]
    bases: frozenset

    def to_json(self) -> dict:
        return {"k": self.k, "ground": list(self.ground), "bases": [list(b) for b in sorted(self.bases)]}


@dataclass(frozen=True)
class PerfectOrientation:
    """Direction of every edge as a (tail, head) pair, plus the boundary sources."""

    arcs: tuple[tuple[Node, Node], ...]
    sources: frozenset


@dataclass(frozen=True)
class PlabicGraph:
    boundary: tuple[int, ...]
    colors: tuple[str, ...]
    edges: tuple[tuple[Node, Node], ...]
    rotation: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if list(self.boundary) != sorted(set(self.boundary)):
            raise PlabicError("boundary labels must be distinct and increasing")
        bdeg = {b: 0 for b in self.boundary}
        ideg = [0] * len(self.colors)
        for u, v in self.edges:
            for x in (u, v):
                if x[0] == "b":
                    if x[1] not in bdeg:
                        raise PlabicError(f"edge meets unknown boundary label {x[1]}")
                    bdeg[x[1]] += 1
                else:
                    ideg[x[1]] += 1
        if any(d != 1 for d in bdeg.values()):
            raise PlabicError("every boundary vertex needs exactly one edge")
        for i, rot in enumerate(self.rotation):
            if len(rot) != ideg[i] or any(("i", i) not in self.edges[e] for e in rot):
                raise PlabicError(f"rotation at internal vertex {i} is inconsistent")
        if any(c not in (BLACK, WHITE) for c in self.colors):
            raise PlabicError("colors must be black or white")

    @property
    def n(self) -> int:
        return len(self.boundary)

    def color(self, v: Node) -> str | None:
        return self.colors[v[1]] if v[0] == "i" else None

    def leg(self, label: int) -> int:
        for e, (u, v) in enumerate(self.edges):
            if ("b", label) in (u, v):
                return e
        raise PlabicError(f"no boundary vertex {label}")

    def to_json(self) -> dict:
        return {
            "boundary": list(self.boundary),
            "vertices": [{"id": i, "color": c} for i, c in enumerate(self.colors)],
            "edges": [[list(u), list(v)] for u, v in self.edges],
            "rotation": [list(r) for r in self.rotation],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PlabicGraph":
        return cls(
            tuple(data["boundary"]),
            tuple(v["color"] for v in sorted(data["vertices"], key=lambda v: v["id"])),
            tuple((tuple(u), tuple(v)) for u, v in data["edges"]),
            tuple(tuple(r) for r in data["rotation"]),
        )


# ---------------------------------------------------------------- faces

def faces(G: PlabicGraph) -> list[list[tuple[Node, Node]]]:
    """Trace the faces of the embedded graph together with the disk boundary.

    Boundary arcs join consecutive boundary vertices; the face outside the
    disk is included in the result.  Raises if Euler's formula fails.
    """
    E = len(G.edges)
    ends = list(G.edges)
    nb = G.n
    # arcs b_j -> b_(j+1), clockwise
    for j in range(nb):
        ends.append((("b", G.boundary[j]), ("b", G.boundary[(j + 1) % nb])))
    rot: dict[Node, list[int]] = {("i", i): list(r) for i, r in enumerate(G.rotation)}
    for j, lab in enumerate(G.boundary):
        nxt = E + j
        prv = E + (j - 1) % nb
        rot[("b", lab)] = [nxt, G.leg(lab), prv] if nb > 1 else [G.leg(lab)]
    darts = set()
    for e, (u, v) in enumerate(ends):
        if nb == 1 and e >= E:
            continue
        darts.add((e, u, v))
        darts.add((e, v, u))
    seen = set()
    out = []
    for start in sorted(darts, key=repr):
        if start in seen:
            continue
        face = []
        d = start
        while d not in seen:
            seen.add(d)
            e, u, v = d
            face.append((u, v))
            r = rot[v]
            # the same edge may appear twice at v only for loops, which we forbid
            pos = r.index(e)
            e2 = r[(pos + 1) % len(r)]
            a, b = ends[e2]
            w = b if a == v else a
            d = (e2, v, w)
        out.append(face)
    V = nb + len(G.colors)
    nE = len(ends) if nb > 1 else E
    if V - nE + len(out) != 2:
        raise PlabicError("rotation system is not a planar embedding of the disk")
    return out


def dimension(G: PlabicGraph) -> int:
    """Number of faces inside the disk, minus one."""
    return len(faces(G)) - 2


# ---------------------------------------------------------------- orientations

def _orientations(colors: Mapping[Node, str], edges: Sequence[tuple[Node, Node]]) -> Iterator[dict]:
    """All choices of the special edge at each internal vertex giving a perfect orientation.

    The special edge is the unique outgoing edge at a black vertex and the unique
    incoming edge at a white vertex.  Yields {vertex: special edge id}.
    """
    inc: dict[Node, list[int]] = {v: [] for v in colors}
    for e, (u, v) in enumerate(edges):
        for x in (u, v):
            if x in inc:
                inc[x].append(e)
    order = []
    seen = set()
    # greedy order: grow along edges so constraints bite early
    for root in sorted(colors, key=lambda v: (len(inc[v]), repr(v))):
        if root in seen:
            continue
        stack = [root]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            order.append(x)
            for e in inc[x]:
                u, v = edges[e]
                y = v if u == x else u
                if y in colors and y not in seen:
                    stack.append(y)

    def tail_at(x, e, special):
        # True when edge e points away from internal vertex x
        return (special == e) if colors[x] == BLACK else (special != e)

    special: dict[Node, int] = {}

    def rec(i):
        if i == len(order):
            yield dict(special)
            return
        x = order[i]
        for e in inc[x]:
            ok = True
            for f in inc[x]:
                u, v = edges[f]
                y = v if u == x else u
                if y in special:
                    if tail_at(x, f, e) == tail_at(y, f, special[y]):
                        ok = False
                        break
            if ok:
                special[x] = e
                yield from rec(i + 1)
                del special[x]

    if any(not inc[v] for v in colors):
        return
    yield from rec(0)


def _arcs(colors, edges, spec) -> tuple[tuple[Node, Node], ...]:
    arcs = []
    for e, (u, v) in enumerate(edges):
        x, y = (u, v) if u in colors else (v, u)
        out = (spec[x] == e) if colors[x] == BLACK else (spec[x] != e)
        arcs.append((x, y) if out else (y, x))
    return tuple(arcs)


def _sources(arcs) -> frozenset:
    return frozenset(t[1] for t, h in arcs if t[0] == "b")


def perfect_orientations(G: PlabicGraph) -> Iterator[PerfectOrientation]:
    colors = {("i", i): c for i, c in enumerate(G.colors)}
    for spec in _orientations(colors, G.edges):
        arcs = _arcs(colors, G.edges, spec)
        yield PerfectOrientation(arcs, _sources(arcs))


def is_perfect(G: PlabicGraph, o: PerfectOrientation) -> bool:
    outdeg = [0] * len(G.colors)
    indeg = [0] * len(G.colors)
    for t, h in o.arcs:
        if t[0] == "i":
            outdeg[t[1]] += 1
        if h[0] == "i":
            indeg[h[1]] += 1
    return all((outdeg[i] == 1) if c == BLACK else (indeg[i] == 1) for i, c in enumerate(G.colors))


def source_sets(colors: Mapping[Node, str], edges, ground) -> Positroid:
    """Source sets of all perfect orientations of an (abstract) bicolored graph."""
    bases = set()
    for spec in _orientations(colors, edges):
        bases.add(tuple(sorted(_sources(_arcs(colors, edges, spec)))))
    if not bases:
        raise PlabicError("graph is not perfectly orientable")
    ks = {len(b) for b in bases}
    if len(ks) != 1:
        raise PlabicError("source sets of different sizes")
    return Positroid(ks.pop(), tuple(ground), frozenset(bases))


def positroid_of(G: PlabicGraph) -> Positroid:
    colors = {("i", i): c for i, c in enumerate(G.colors)}
    return source_sets(colors, G.edges, G.boundary)


def acyclic_orientation(G: PlabicGraph) -> PerfectOrientation:
    for o in perfect_orientations(G):
        succ: dict[Node, list[Node]] = {}
        for t, h in o.arcs:
            succ.setdefault(t, []).append(h)
        state: dict[Node, int] = {}

        def cyclic(x):
            state[x] = 1
            for y in succ.get(x, ()):
                s = state.get(y, 0)
                if s == 1 or (s == 0 and cyclic(y)):
                    return True
            state[x] = 2
            return False

        if not any(state.get(x, 0) == 0 and cyclic(x) for x in list(succ)):
            return o
    raise PlabicError("no acyclic perfect orientation found")


# ---------------------------------------------------------------- flows

def flow_pluckers(G: PlabicGraph, o: PerfectOrientation, weights: Sequence, one=1) -> dict:
    """Plücker values from vertex-disjoint path families (acyclic orientation).

    <J> is the weighted count of families joining the sources outside J to the
    sinks in J; <I> = 1 for the source set I.  ``weights`` is indexed by edge
    id and may hold any ring elements (integers, Fractions, dual numbers).
    """
    succ: dict[Node, list[tuple[Node, int]]] = {}
    arc_of = {}
    for e, (t, h) in enumerate(o.arcs):
        succ.setdefault(t, []).append((h, e))
        arc_of[e] = (t, h)
    I = tuple(sorted(o.sources))
    k = len(I)
    out = {}
    for J in itertools.combinations(G.boundary, k):
        srcs = [s for s in I if s not in J]
        sinks = {t for t in J if t not in I}
        out[J] = _families(succ, weights, srcs, sinks, one)
    return out


def _families(succ, weights, srcs, sinks, one):
    if not srcs:
        return one
    total = None
    used: set = set()

    def rec(i, acc):
        nonlocal total
        if i == len(srcs):
            total = acc if total is None else total + acc
            return
        start = ("b", srcs[i])

        # route path i through unused vertices, then recurse on path i + 1
        def walk(x, w):
            for y, e in succ.get(x, ()):
                if y in used:
                    continue
                w2 = w * weights[e]
                if y[0] == "b":
                    if y[1] in sinks and y not in used:
                        used.add(y)
                        rec(i + 1, acc * w2)
                        used.discard(y)
                    continue
                used.add(y)
                walk(y, w2)
                used.discard(y)
        walk(start, one)

    rec(0, one)
    return total if total is not None else one * 0


def sample_cell_point(G: PlabicGraph, rng=None, orientation: PerfectOrientation | None = None
                      ) -> GrassmannPoint:
    """A point of the cell from random positive integer edge weights."""
    rng = make_rng(rng)
    seed = rng.getrandbits(32)
    local = random.Random(seed)
    o = orientation or acyclic_orientation(G)
    weights = [local.randint(1, 9) for _ in G.edges]
    vals = flow_pluckers(G, o, weights)
    k = len(o.sources)
    if k == 0:
        return GrassmannPoint(0, G.boundary, (), seed)
    PV = PluckerVector(k, G.boundary, {J: Fraction(v) for J, v in vals.items()})
    P = matrix_from_pluckers(PV)
    return GrassmannPoint(P.k, P.ground, P.entries, seed)


# ---------------------------------------------------------------- constructors

def lollipop_graph(ground: Sequence[int], coloops: Sequence[int] = ()) -> PlabicGraph:
    """Black lollipops (loops) everywhere except white ones at ``coloops``."""
    ground = tuple(ground)
    colors = tuple(WHITE if g in coloops else BLACK for g in ground)
    edges = tuple((("b", g), ("i", j)) for j, g in enumerate(ground))
    rotation = tuple((j,) for j in range(len(ground)))
    return PlabicGraph(ground, colors, edges, rotation)


def trivial_graph(ground: Sequence[int]) -> PlabicGraph:
    return lollipop_graph(ground)


def necklace(bases, ground: Sequence[int]) -> list[frozenset]:
    """Grassmann necklace: lex-minimal basis in each cyclically shifted order."""
    m = len(ground)
    pos = {g: p for p, g in enumerate(ground)}
    out = []
    for i in range(m):
        best = min(bases, key=lambda B: sorted((pos[x] - i) % m for x in B))
        out.append(frozenset(best))
    return out


def bounded_affine_permutation(bases, ground: Sequence[int]) -> list[int]:
    """f on positions 1..m with i <= f(i) <= i+m; f(i)=i for loops, i+m for coloops."""
    m = len(ground)
    neck = necklace(bases, ground)
    pos = {g: p + 1 for p, g in enumerate(ground)}
    f = [0] * (m + 1)
    for i in range(1, m + 1):
        I, J = neck[i - 1], neck[i % m]
        gi = ground[i - 1]
        if gi not in I:
            f[i] = i
        elif I == J:
            f[i] = i + m
        else:
            (j,) = tuple(J - (I - {gi}))
            pj = pos[j]
            f[i] = pj if pj > i else pj + m
    return f


def bridge_decomposition(f: Sequence[int]) -> tuple[list[int], list[tuple[int, int]]]:
    """Peel bridges off f until only loops and coloops remain.

    A bridge joins position i with the next position j that is not fixed; it
    can be removed when f(i) < f(j) (as affine values).  Returns the final
    fixed-point permutation and the bridges in removal order.
    """
    m = len(f) - 1
    f = list(f)

    def fixed(i):
        return f[i] in (i, i + m)

    seq = []
    while True:
        for i in range(1, m + 1):
            if fixed(i):
                continue
            j = i + 1
            while j < i + m and fixed((j - 1) % m + 1):
                j += 1
            jj = (j - 1) % m + 1
            shift = m if j > m else 0
            if jj == i:
                continue
            a, b = f[i], f[jj] + shift
            if a < b:
                f[i], f[jj] = b, a - shift
                seq.append((i, jj))
                break
        else:
            return f, seq


def bridge_graph(f: Sequence[int], ground: Sequence[int]) -> PlabicGraph:
    """Planar graph of the positroid with bounded affine permutation f."""
    ground = tuple(ground)
    m = len(ground)
    base, seq = bridge_decomposition(f)
    colors: list[str] = []
    edges: list[list] = []
    rotation: list[list[int]] = []
    leg = {}
    for p in range(1, m + 1):
        colors.append(BLACK if base[p] == p else WHITE)
        edges.append([("b", ground[p - 1]), ("i", p - 1)])
        rotation.append([p - 1])
        leg[p] = p - 1

    def insert(p, color):
        # put a new vertex on the leg at position p; returns (vertex, outer, inner)
        e = leg[p]
        x = ("i", len(colors))
        colors.append(color)
        edges[e][0] = x  # leg edge now joins x to the old inner vertex
        outer = len(edges)
        edges.append([("b", ground[p - 1]), x])
        leg[p] = outer
        rotation.append([])
        return x, outer, e

    for i, j in reversed(seq):
        x, xo, xi = insert(i, WHITE)
        y, yo, yi = insert(j, BLACK)
        br = len(edges)
        edges.append([x, y])
        rotation[x[1]] = [xo, br, xi]
        rotation[y[1]] = [yo, yi, br]
    G = PlabicGraph(ground, tuple(colors), tuple((u, v) for u, v in edges),
                    tuple(tuple(r) for r in rotation))
    return G


def graph_of_positroid(bases, ground: Sequence[int]) -> PlabicGraph:
    return bridge_graph(bounded_affine_permutation(bases, ground), ground)


def _relabel(G: PlabicGraph, mapping: Mapping[int, int], mirror: bool = False) -> PlabicGraph:
    def m(x):
        return ("b", mapping[x[1]]) if x[0] == "b" else x

    edges = tuple((m(u), m(v)) for u, v in G.edges)
    rotation = tuple(tuple(reversed(r)) for r in G.rotation) if mirror else G.rotation
    return PlabicGraph(tuple(sorted(mapping[b] for b in G.boundary)), G.colors, edges, rotation)


def graph_cyc(G: PlabicGraph) -> PlabicGraph:
    """Boundary vertex at position p takes the label of position p-1."""
    g = G.boundary
    return _relabel(G, {g[p]: g[p - 1] for p in range(len(g))})


def graph_refl(G: PlabicGraph) -> PlabicGraph:
    g = G.boundary
    return _relabel(G, {g[p]: g[len(g) - 1 - p] for p in range(len(g))}, mirror=True)


def graph_pre(i: int, G: PlabicGraph) -> PlabicGraph:
    if i in G.boundary:
        raise PlabicError(f"label {i} already on the boundary")
    v = ("i", len(G.colors))
    return PlabicGraph(tuple(sorted(G.boundary + (i,))), G.colors + (BLACK,),
                       G.edges + ((("b", i), v),), G.rotation + ((len(G.edges),),))


# ---------------------------------------------------------------- BCFW product

def product_grounds(B: Sequence[int], ground: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """N_L = {.., a, b, n} and N_R = {b, .., c, d, n} inside ``ground``."""
    a, b, c, d, n = B
    ground = tuple(ground)
    if any(x not in ground for x in B):
        raise PlabicError(f"markers {tuple(B)} not in the ground set")
    p = {x: j for j, x in enumerate(ground)}
    if not (p[b] == p[a] + 1 and p[d] == p[c] + 1 and p[n] == p[d] + 1 and p[n] == len(ground) - 1):
        raise PlabicError(f"markers {tuple(B)} violate the consecutiveness constraints")
    if p[c] <= p[b]:
        raise PlabicError("need b < c")
    NL = ground[: p[a] + 1] + (b, n)
    NR = ground[p[b]: p[d] + 1] + (n,)
    return NL, NR


def check_product_grounds(NL: Sequence[int], NR: Sequence[int], B: Sequence[int]) -> tuple[int, ...]:
    ground = tuple(sorted(set(NL) | set(NR)))
    eL, eR = product_grounds(B, ground)
    if tuple(NL) != eL or tuple(NR) != eR:
        raise PlabicError(f"factor ground sets {tuple(NL)}, {tuple(NR)} do not match B={tuple(B)}")
    return ground


def bcfw_product_graph(GL: PlabicGraph, GR: PlabicGraph, B: Sequence[int], seed: int = 0) -> PlabicGraph:
    """Plabic graph of S_L ⋈ S_R.

    The cell is read off the matrix form of the product at generic points of
    both factors; the graph is then assembled by bridges from its bounded
    affine permutation.
    """
    ground = check_product_grounds(GL.boundary, GR.boundary, B)
    bases = product_bases(GL, GR, B, seed)
    G = graph_of_positroid(bases, ground)
    if dimension(G) != dimension(GL) + dimension(GR) + 4:
        raise PlabicError("product cell has the wrong dimension")
    return G


def product_bases(GL: PlabicGraph, GR: PlabicGraph, B: Sequence[int], seed: int = 0) -> frozenset:
    rng = random.Random(seed)
    bases = set()
    for _ in range(2):
        CL = sample_cell_point(GL, rng)
        CR = sample_cell_point(GR, rng)
        r = [Fraction(rng.randint(1, 97), rng.randint(1, 89)) for _ in range(5)]
        C = product_point(CL, CR, B, r)
        bases |= pluckers(C).support()
    return frozenset(bases)


def junction_product_positroid(GL: PlabicGraph, GR: PlabicGraph, B: Sequence[int]) -> Positroid:
    """Positroid of the product from a (non-planar) junction gadget.

    Each of a, b, c, d, n becomes a black vertex merging the factor legs that
    carry that label with the new boundary vertex, and one white vertex is
    joined to all five.  Only used as an independent check of the bases.
    """
    ground = check_product_grounds(GL.boundary, GR.boundary, B)
    colors: dict = {}
    edges = []
    junction = {x: ("j", x) for x in B}
    for x in B:
        colors[junction[x]] = BLACK
        edges.append((junction[x], ("b", x)))
    hub = ("hub", 0)
    colors[hub] = WHITE
    for x in B:
        edges.append((hub, junction[x]))
    ports = {"L": set(B) & {B[0], B[1], B[4]}, "R": {B[1], B[2], B[3], B[4]}}
    for tag, G in (("L", GL), ("R", GR)):
        for i, c in enumerate(G.colors):
            colors[(tag, i)] = c

        def rn(x):
            if x[0] == "b":
                return junction[x[1]] if x[1] in ports[tag] else x
            return (tag, x[1])

        for u, v in G.edges:
            edges.append((rn(u), rn(v)))
    return source_sets(colors, edges, ground)
