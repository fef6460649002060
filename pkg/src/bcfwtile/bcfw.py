"""BCFW recipes, chord diagrams, standard cells and BCFW collections."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Sequence, Union

from .grassmannian import GrassmannPoint, cyc, make_rng, pluckers, pre, product_point, refl
from .plabic import (
    PlabicError,
    PlabicGraph,
    bcfw_product_graph,
    check_product_grounds,
    graph_cyc,
    graph_pre,
    graph_refl,
    positroid_of,
    trivial_graph,
)


class RecipeError(ValueError):
    pass


# ---------------------------------------------------------------- recipes

@dataclass(frozen=True)
class Trivial:
    ground: tuple

    @property
    def k(self) -> int:
        return 0


@dataclass(frozen=True)
class Product:
    B: tuple
    left: "Recipe"
    right: "Recipe"
    chord: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.B) != 5:
            raise RecipeError("B needs five markers")
        try:
            check_product_grounds(self.left.ground, self.right.ground, self.B)
        except PlabicError as exc:
            raise RecipeError(str(exc)) from None

    @property
    def ground(self) -> tuple:
        return tuple(sorted(set(self.left.ground) | set(self.right.ground)))

    @property
    def k(self) -> int:
        return self.left.k + self.right.k + 1


@dataclass(frozen=True)
class Cyc:
    child: "Recipe"

    @property
    def ground(self) -> tuple:
        return self.child.ground

    @property
    def k(self) -> int:
        return self.child.k


@dataclass(frozen=True)
class Refl:
    child: "Recipe"

    @property
    def ground(self) -> tuple:
        return self.child.ground

    @property
    def k(self) -> int:
        return self.child.k


@dataclass(frozen=True)
class Pre:
    i: int
    child: "Recipe"

    def __post_init__(self):
        if self.i in self.child.ground:
            raise RecipeError(f"pre: label {self.i} already in the ground set")

    @property
    def ground(self) -> tuple:
        return tuple(sorted(self.child.ground + (self.i,)))

    @property
    def k(self) -> int:
        return self.child.k


Recipe = Union[Trivial, Product, Cyc, Refl, Pre]


def recipe_to_json(R: Recipe) -> dict:
    if isinstance(R, Trivial):
        return {"op": "trivial", "ground": list(R.ground)}
    if isinstance(R, Product):
        out = {"op": "product", "B": list(R.B), "left": recipe_to_json(R.left), "right": recipe_to_json(R.right)}
        if R.chord is not None:
            out["chord"] = R.chord
        return out
    if isinstance(R, Cyc):
        return {"op": "cyc", "child": recipe_to_json(R.child)}
    if isinstance(R, Refl):
        return {"op": "refl", "child": recipe_to_json(R.child)}
    return {"op": "pre", "i": R.i, "child": recipe_to_json(R.child)}


def recipe_from_json(d: dict) -> Recipe:
    op = d["op"]
    if op == "trivial":
        return Trivial(tuple(d["ground"]))
    if op == "product":
        return Product(tuple(d["B"]), recipe_from_json(d["left"]), recipe_from_json(d["right"]), d.get("chord"))
    if op == "cyc":
        return Cyc(recipe_from_json(d["child"]))
    if op == "refl":
        return Refl(recipe_from_json(d["child"]))
    if op == "pre":
        return Pre(d["i"], recipe_from_json(d["child"]))
    raise RecipeError(f"unknown recipe op {op!r}")


def recipe_text(R: Recipe) -> str:
    if isinstance(R, Trivial):
        return "T(" + ",".join(map(str, R.ground)) + ")"
    if isinstance(R, Product):
        return f"[{recipe_text(R.left)} x{R.B} {recipe_text(R.right)}]"
    if isinstance(R, Cyc):
        return f"cyc {recipe_text(R.child)}"
    if isinstance(R, Refl):
        return f"refl {recipe_text(R.child)}"
    return f"pre{R.i} {recipe_text(R.child)}"


@lru_cache(maxsize=None)
def build_cell(R: Recipe) -> PlabicGraph:
    """Plabic graph of the cell built by the recipe."""
    if isinstance(R, Trivial):
        return trivial_graph(R.ground)
    if isinstance(R, Product):
        return bcfw_product_graph(build_cell(R.left), build_cell(R.right), R.B)
    if isinstance(R, Cyc):
        return graph_cyc(build_cell(R.child))
    if isinstance(R, Refl):
        return graph_refl(build_cell(R.child))
    return graph_pre(R.i, build_cell(R.child))


@lru_cache(maxsize=None)
def cell_positroid(R: Recipe):
    return positroid_of(build_cell(R))


def sample_recipe_point(R: Recipe, rng=None) -> GrassmannPoint:
    """A point of the cell from the matrix form of the recipe with random positive parameters."""
    rng = make_rng(rng)
    if isinstance(R, Trivial):
        return GrassmannPoint(0, R.ground, ())
    if isinstance(R, Product):
        CL = sample_recipe_point(R.left, rng)
        CR = sample_recipe_point(R.right, rng)
        r = [Fraction(rng.randint(1, 60), rng.randint(1, 60)) for _ in range(5)]
        return product_point(CL, CR, R.B, r)
    if isinstance(R, Cyc):
        return cyc(sample_recipe_point(R.child, rng))
    if isinstance(R, Refl):
        return refl(sample_recipe_point(R.child, rng))
    return pre(R.i, sample_recipe_point(R.child, rng))


@lru_cache(maxsize=None)
def sampled_bases(R: Recipe, seed: int = 0) -> frozenset:
    """Bases of the cell read off two generic matrix samples (cheap positroid proxy)."""
    rng = random.Random(seed)
    bases = set()
    for _ in range(2):
        bases |= pluckers(sample_recipe_point(R, rng)).support()
    return frozenset(bases)


def top_cell(ground: Sequence[int], k: int) -> Recipe:
    """The top cell of Gr(k, k+4) on the given ground set, built by products."""
    ground = tuple(ground)
    if len(ground) != k + 4:
        raise RecipeError("top cell needs |N| = k + 4")
    if k == 0:
        return Trivial(ground)
    N = ground
    B = (N[0], N[1], N[-3], N[-2], N[-1])
    return Product(B, Trivial((N[0], N[1], N[-1])), top_cell(N[1:], k - 1))


# ---------------------------------------------------------------- chord diagrams

@dataclass(frozen=True)
class ChordDiagram:
    n: int
    chords: tuple  # ((a, b, c, d), ...); chord i is chords[i-1]

    def __post_init__(self):
        validate_chords(self.n, self.chords)

    @property
    def k(self) -> int:
        return len(self.chords)

    def chord(self, i: int) -> tuple:
        return self.chords[i - 1]

    def to_json(self) -> dict:
        return {"n": self.n, "chords": [list(c) for c in self.chords]}

    @classmethod
    def from_json(cls, d: dict) -> "ChordDiagram":
        return cls(d["n"], tuple(tuple(c) for c in d["chords"]))


def validate_chords(n: int, chords) -> None:
    for ch in chords:
        if len(ch) != 4:
            raise RecipeError(f"chord {ch} needs four markers")
        a, b, c, d = ch
        if not (1 <= a < b == a + 1 < c < d == c + 1 <= n - 1):
            raise RecipeError(f"chord {tuple(ch)} violates 1 <= a < b=a+1 < c < d=c+1 <= n-1")
    for x, y in itertools.permutations(chords, 2):
        if x[0] == y[0]:
            raise RecipeError(f"chords {tuple(x)} and {tuple(y)} share a start")
        if x[0] < y[0] < x[2] < y[2]:
            raise RecipeError(f"chords {tuple(x)} and {tuple(y)} cross")


def enumerate_chords(n: int, k: int) -> list:
    """All chord diagrams with k chords on n markers, chords sorted by (a, c)."""
    if n < 4 or k < 0:
        raise RecipeError("need n >= 4 and k >= 0")
    single = [(a, a + 1, c, c + 1) for a in range(1, n) for c in range(a + 2, n - 1)]
    out = []

    def ok(ch, chosen):
        return all(ch[0] != x[0] and not (x[0] < ch[0] < x[2] < ch[2]) and not (ch[0] < x[0] < ch[2] < x[2])
                   for x in chosen)

    def rec(start, chosen):
        if len(chosen) == k:
            out.append(ChordDiagram(n, tuple(chosen)))
            return
        for j in range(start, len(single)):
            if ok(single[j], chosen):
                rec(j + 1, chosen + [single[j]])

    rec(0, [])
    return out


@dataclass(frozen=True)
class ChordRelations:
    parent: dict  # chord -> parent chord or None
    same_end: frozenset  # unordered pairs
    head_to_tail: frozenset  # ordered (first, second): first ends where second starts
    sticky: frozenset  # ordered (i, j) with a_j = a_i + 1

    def children(self, i: int) -> list:
        return [j for j, p in self.parent.items() if p == i]

    def siblings(self, i: int, j: int) -> bool:
        return i != j and self.parent[i] == self.parent[j]

    def to_json(self) -> dict:
        return {
            "parent": {str(i): p for i, p in sorted(self.parent.items())},
            "same_end": sorted(sorted(p) for p in self.same_end),
            "head_to_tail": sorted(list(p) for p in self.head_to_tail),
            "sticky": sorted(list(p) for p in self.sticky),
        }


def chord_relations(D: ChordDiagram) -> ChordRelations:
    idx = range(1, D.k + 1)
    ch = D.chord

    def contains(j, i):
        return ch(j)[0] < ch(i)[0] < ch(j)[2]

    parent = {}
    for i in idx:
        above = [j for j in idx if j != i and contains(j, i)]
        # the chord immediately above is the innermost container
        parent[i] = max(above, key=lambda j: ch(j)[0]) if above else None
    same_end = frozenset(frozenset((i, j)) for i in idx for j in idx if i < j and ch(i)[2] == ch(j)[2])
    h2t = frozenset((i, j) for i in idx for j in idx if i != j and ch(i)[2] == ch(j)[0])
    sticky = frozenset((i, j) for i in idx for j in idx if ch(j)[0] == ch(i)[0] + 1)
    return ChordRelations(parent, same_end, h2t, sticky)


def standard_recipe(D: ChordDiagram) -> Recipe:
    """Standard BCFW cell of a chord diagram: products at B_i and pre at penultimate indices."""
    labelled = {ch: i + 1 for i, ch in enumerate(D.chords)}
    return _standard(tuple(range(1, D.n + 1)), tuple(sorted(D.chords)), labelled)


def _standard(N: tuple, chords: tuple, labelled: dict) -> Recipe:
    if not chords:
        return Trivial(N)
    p = N[-2]
    ending = [ch for ch in chords if ch[3] == p]
    if not ending:
        return Pre(p, _standard(N[:-2] + N[-1:], chords, labelled))
    main = min(ending, key=lambda ch: ch[0])
    a, b, c, d = main
    if c != N[-3]:
        raise RecipeError(f"chord {main} is not consecutive in the ground set {N}")
    n = N[-1]
    left = tuple(ch for ch in chords if ch[0] < a)
    right = tuple(ch for ch in chords if ch[0] >= b and ch != main)
    NL = tuple(x for x in N if x <= a) + (b, n)
    NR = tuple(x for x in N if b <= x <= d) + (n,)
    return Product((a, b, c, d, n), _standard(NL, left, labelled), _standard(NR, right, labelled),
                   labelled.get(main))


def chord_diagram_of_recipe(R: Recipe) -> dict:
    """Chord label -> B for a standard recipe's product nodes."""
    out = {}

    def walk(node):
        if isinstance(node, Product):
            out[node.chord] = node.B
            walk(node.left)
            walk(node.right)
        elif isinstance(node, (Cyc, Refl, Pre)):
            walk(node.child)

    walk(R)
    return out


# ---------------------------------------------------------------- collections

@dataclass(frozen=True)
class BcfwCollection:
    n: int
    k: int
    ground: tuple
    recipes: tuple
    provenance: tuple  # human-readable choices, e.g. ("cyc^1 @ root", ...)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "ground": list(self.ground),
            "provenance": list(self.provenance),
            "recipes": [recipe_to_json(R) for R in self.recipes],
        }


Transform = tuple  # (r, flip): apply cyc r times, then refl if flip


def apply_transform(R: Recipe, t: Transform) -> Recipe:
    r, flip = t
    for _ in range(r):
        R = Cyc(R)
    if flip:
        R = Refl(R)
    return R


Strategy = Callable[[tuple, int, str], Transform]


def standard_strategy(N: tuple, k: int, path: str) -> Transform:
    return (0, False)


def collection(N: Sequence[int], k: int, strategy: Strategy = standard_strategy, path: str = "root"
               ) -> list:
    """One BCFW collection for A(N, k, 4), following the recursion with transforms from ``strategy``.

    At every recursion node the strategy picks a dihedral transform that is
    applied to the whole sub-collection built there.
    """
    N = tuple(N)
    n = len(N)
    if k < 0 or (k > 0 and n < k + 4):
        raise RecipeError("need |N| >= k + 4")
    t = strategy(N, k, path)
    if k == 0:
        cells = [Trivial(N)]
    elif k == n - 4:
        cells = [top_cell(N, k)]
    else:
        d = N[-2]
        cells = [Pre(d, S) for S in collection(N[:-2] + N[-1:], k, strategy, path + "/pre")]
        for kL in range(0, k):
            kR = k - 1 - kL
            bmin = 2 if kL == 0 else kL + 3
            for b in range(bmin, n - 3 - kR + 1):
                a = b - 1
                B = (N[a - 1], N[b - 1], N[-3], N[-2], N[-1])
                NL = N[:a] + (N[b - 1], N[-1])
                NR = N[b - 1:]
                sub = f"{path}/b{b}k{kL},{kR}"
                CL = collection(NL, kL, strategy, sub + "L")
                CR = collection(NR, kR, strategy, sub + "R")
                cells.extend(Product(B, SL, SR) for SL in CL for SR in CR)
    return [apply_transform(S, t) for S in cells]


def standard_collection(n: int, k: int) -> list:
    return collection(tuple(range(1, n + 1)), k)


def _node_paths(N: tuple, k: int, path: str = "root") -> Iterator[tuple]:
    """All recursion nodes (path, ground size) in a fixed order."""
    yield path, len(N), k
    n = len(N)
    if k == 0 or k == n - 4:
        return
    yield from _node_paths(N[:-2] + N[-1:], k, path + "/pre")
    for kL in range(0, k):
        kR = k - 1 - kL
        bmin = 2 if kL == 0 else kL + 3
        for b in range(bmin, n - 3 - kR + 1):
            a = b - 1
            sub = f"{path}/b{b}k{kL},{kR}"
            yield from _node_paths(N[:a] + (N[b - 1], N[-1]), kL, sub + "L")
            yield from _node_paths(N[b - 1:], kR, sub + "R")


def enumerate_collections(n: int, k: int, budget: int = 50) -> tuple[list, bool]:
    """Distinct BCFW collections, standard first, then single-node dihedral variants.

    Variants apply one nontrivial transform (a power of cyc, optionally
    followed by refl) at one recursion node.  Collections are deduplicated by
    their sets of positroids.  Returns (collections, truncated).
    """
    if n < k + 4:
        raise RecipeError("need n >= k + 4")
    N = tuple(range(1, n + 1))
    seen = set()
    out: list = []

    def add(cells, prov) -> bool:
        key = frozenset(sampled_bases(R) for R in cells)
        if key in seen:
            return False
        seen.add(key)
        out.append(BcfwCollection(n, k, N, tuple(cells), prov))
        return True

    add(collection(N, k), ("standard",))
    for path, size, kk in _node_paths(N, k):
        if size <= 1:
            continue
        for flip in (False, True):
            for r in range(size):
                if (r, flip) == (0, False):
                    continue
                if len(out) >= budget:
                    return out, True

                def strat(NN, kk2, p, path=path, t=(r, flip)):
                    return t if p == path else (0, False)

                add(collection(N, k, strat), (f"cyc^{r}{' refl' if flip else ''} @ {path}",))
    return out, False
