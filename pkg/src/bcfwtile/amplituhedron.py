"""The amplituhedron map, tiles with sign signatures, membership, and tiling probes."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from .bcfw import BcfwCollection, Recipe, build_cell, sample_recipe_point
from .dual import Dual, solve_dual
from .grassmannian import (GrassmannError, GrassmannPoint, ZMatrix, integer_pluckers, make_rng,
                           oriented, sample_top_cell, spawn)
from .linalg import det, matmul, rank, rref, sort_sign
from .plabic import acyclic_orientation, dimension, flow_pluckers
from .promotion import IrrSet, irr

INSIDE, OUTSIDE, BOUNDARY = "inside", "outside", "boundary"


class TileError(ValueError):
    pass


class SignatureError(TileError):
    """A functionary changed sign on a tile, or sampling kept hitting zeros."""


# ---------------------------------------------------------------- the map

def zmap(C: GrassmannPoint, Z: ZMatrix) -> GrassmannPoint:
    """Y = CZ as a point of Gr(k, k+4)."""
    if C.k != Z.k or C.n != Z.n:
        raise GrassmannError("dimension mismatch between C and Z")
    width = tuple(range(1, Z.width + 1))
    if C.k == 0:
        return GrassmannPoint(0, width, ())
    rows = matmul(C.entries, Z.entries)
    if rank(rows) != C.k:
        raise GrassmannError("rank collapse in CZ")
    return GrassmannPoint(C.k, width, tuple(tuple(r) for r in rows))


class TwistorEngine:
    """Twistor coordinates of Y = CZ by Cauchy-Binet, computed only where needed."""

    def __init__(self, Z: ZMatrix):
        self.Z = Z
        self.k = Z.k
        self.n = Z.n
        ints = [[int(x) for x in r] for r in Z.entries]
        if any(Fraction(a) != b for ra, rb in zip(ints, Z.entries) for a, b in zip(ra, rb)):
            ints = None
        self._rows = ints if ints is not None else [list(r) for r in Z.entries]
        self._zmin: dict = {}
        self._plan: dict = {}

    def _minor(self, S: tuple):
        v = self._zmin.get(S)
        if v is None:
            v = det([self._rows[i - 1] for i in S])
            self._zmin[S] = v
        return v

    def plan(self, I: tuple) -> list:
        """(J, sign, det Z_{J u I}) for every k-subset J disjoint from I."""
        p = self._plan.get(I)
        if p is None:
            rest = [x for x in range(1, self.n + 1) if x not in I]
            p = []
            for J in itertools.combinations(rest, self.k):
                inv = sum(1 for j in J for i in I if j > i)
                p.append((J, -1 if inv % 2 else 1, self._minor(tuple(sorted(J + I)))))
            self._plan[I] = p
        return p

    def from_pluckers(self, plk, keys) -> dict:
        out = {}
        for I in keys:
            total = 0
            for J, s, z in self.plan(I):
                v = plk.get(J, 0)
                if v:
                    total += s * v * z
            out[I] = total
        return out

    def from_point(self, Y: GrassmannPoint, keys) -> dict:
        """Twistors det[Y; Z_I] of an arbitrary point of Gr(k, k+4)."""
        if Y.k != self.k or Y.n != self.Z.width:
            raise GrassmannError("dimension mismatch between Y and Z")
        rows = [list(r) for r in Y.entries]
        return {I: det(rows + [list(self.Z.entries[i - 1]) for i in I]) for I in keys}

    def twistor_1234(self, Y: GrassmannPoint):
        return self.from_point(Y, [(1, 2, 3, 4)])[(1, 2, 3, 4)]


def cell_plucker_sample(R: Recipe, rng) -> dict:
    """Integer Plückers of an oriented random point of the cell (row scaling is positive)."""
    C = oriented(sample_recipe_point(R, rng))
    if C.k == 0:
        return {(): 1}
    return integer_pluckers(C.integer_rows(), C.ground)


def top_cell_plucker_sample(k: int, n: int, rng) -> dict:
    C = sample_top_cell(k, n, rng)
    if k == 0:
        return {(): 1}
    return integer_pluckers(C.integer_rows(), C.ground)


# ---------------------------------------------------------------- tiles

@dataclass(frozen=True)
class Tile:
    """A BCFW cell with a fixed Z, its coordinate cluster variables and their signs."""

    recipe: Recipe
    Z: ZMatrix
    irr: IrrSet
    signature: tuple | None = None  # one sign per element of irr
    samples: int = 0
    seed: int | None = None

    @property
    def k(self) -> int:
        return self.recipe.k

    @property
    def graph(self):
        return build_cell(self.recipe)

    @property
    def keys(self) -> tuple:
        return tuple(sorted({s for p in self.irr.polys for s in p.symbols()}))

    @property
    def certified(self) -> bool:
        return self.signature is not None

    def sign_map(self) -> dict:
        if self.signature is None:
            raise TileError("tile is not certified")
        return dict(zip(self.irr.elements, self.signature))

    def negatives(self) -> list:
        return [e for e, s in self.sign_map().items() if s < 0]

    def to_json(self) -> dict:
        out = {"k": self.k, "samples": self.samples, "seed": self.seed,
               "functionaries": self.irr.to_json()}
        if self.signature is not None:
            for d, s in zip(out["functionaries"], self.signature):
                d["sign"] = s
        return out


def make_tile(R: Recipe, Z: ZMatrix) -> Tile:
    if R.k != Z.k or len(R.ground) != Z.n:
        raise TileError("recipe and Z do not match")
    return Tile(R, Z, irr(R))


def functionary_values(T: Tile, tw) -> list:
    return [p.evaluate(tw) for p in T.irr.polys]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def certify_signature(T: Tile, samples: int, rng=None, engine: TwistorEngine | None = None) -> Tile:
    """Sample the cell, record the sign of every functionary, fail on any disagreement."""
    if samples < 1:
        raise TileError("need at least one sample")
    rng = make_rng(rng)
    seed = rng.getrandbits(32)
    local = make_rng(seed)
    engine = engine or TwistorEngine(T.Z)
    keys = T.keys
    signs = list(T.signature) if T.signature is not None else [0] * len(T.irr)
    good = zeros = 0
    while good < samples:
        tw = engine.from_pluckers(cell_plucker_sample(T.recipe, local), keys)
        vals = [_sign(v) for v in functionary_values(T, tw)]
        if 0 in vals:
            zeros += 1
            if zeros > max(10, samples // 100):
                raise SignatureError("degenerate sampling")
            continue
        for j, s in enumerate(vals):
            if signs[j] == 0:
                signs[j] = s
            elif signs[j] != s:
                e = T.irr.elements[j]
                raise SignatureError(f"functionary {e.label} changed sign on the tile")
        good += 1
    return replace(T, signature=tuple(signs), samples=T.samples + samples, seed=seed)


def verdict(T: Tile, tw) -> str:
    if T.signature is None:
        raise TileError("tile is not certified")
    zero = False
    for p, s in zip(T.irr.polys, T.signature):
        v = s * p.evaluate(tw)
        if v < 0:
            return OUTSIDE
        if v == 0:
            zero = True
    return BOUNDARY if zero else INSIDE


def membership(Y: GrassmannPoint, T: Tile, engine: TwistorEngine | None = None) -> str:
    """Inside, outside or boundary of the open tile, decided by the sign description.

    Y is oriented so that <<Y 1 2 3 4>> > 0, which is the orientation that
    Y = CZ inherits from a nonnegative oriented C.
    """
    if Y.k != T.k or Y.n != T.Z.width:
        raise TileError("ground mismatch between Y and the tile")
    if T.k == 0:
        return INSIDE
    engine = engine or TwistorEngine(T.Z)
    keys = tuple(sorted(set(T.keys) | {(1, 2, 3, 4)}))
    tw = engine.from_point(Y, keys)
    if tw[(1, 2, 3, 4)] < 0:
        tw = {I: -v for I, v in tw.items()}
    return verdict(T, tw)


def certified_tiles(recipes: Sequence[Recipe], Z: ZMatrix, samples: int, rng=None,
                    engine: TwistorEngine | None = None) -> list:
    rng = make_rng(rng)
    engine = engine or TwistorEngine(Z)
    return [certify_signature(make_tile(R, Z), samples, spawn(rng), engine) for R in recipes]


# ---------------------------------------------------------------- tiling

@dataclass
class TilingReport:
    n: int
    k: int
    tiles: int
    coverage_samples: int
    cell_samples: int
    hit_counts: dict = field(default_factory=dict)  # number of tiles hit -> samples
    boundary_resamples: int = 0
    violations: list = field(default_factory=list)
    seed: int | None = None
    runtime: float = 0.0

    @property
    def coverage(self) -> float:
        total = sum(self.hit_counts.values())
        return self.hit_counts.get(1, 0) / total if total else 1.0

    @property
    def passed(self) -> bool:
        return not self.violations and set(self.hit_counts) <= {1}

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "tiles": self.tiles,
                "coverage_samples": self.coverage_samples, "cell_samples": self.cell_samples,
                "hit_counts": {str(a): b for a, b in sorted(self.hit_counts.items())},
                "coverage": self.coverage, "boundary_resamples": self.boundary_resamples,
                "violations": self.violations, "seed": self.seed,
                "runtime": round(self.runtime, 3), "passed": self.passed}


def _plucker_witness(plk: dict) -> list:
    return [{"I": list(J), "v": str(v)} for J, v in sorted(plk.items()) if v]


def verify_tiling(coll: BcfwCollection | Sequence[Recipe], Z: ZMatrix, samples: int,
                  rng=None, cell_samples: int = 20, certify: int = 50,
                  tiles: Sequence[Tile] | None = None) -> TilingReport:
    """Monte Carlo check that the tiles cover the amplituhedron and are pairwise disjoint."""
    t0 = time.perf_counter()
    rng = make_rng(rng)
    seed = rng.getrandbits(32)
    local = make_rng(seed)
    recipes = list(coll.recipes if isinstance(coll, BcfwCollection) else coll)
    k, n = Z.k, Z.n
    engine = TwistorEngine(Z)
    if tiles is None:
        tiles = certified_tiles(recipes, Z, certify, spawn(local), engine)
    keys = tuple(sorted({I for T in tiles for I in T.keys}))
    rep = TilingReport(n, k, len(tiles), samples, cell_samples * len(tiles), seed=seed)

    def classify(draw, owner=None):
        while True:
            plk = draw()
            tw = engine.from_pluckers(plk, keys)
            vs = [verdict(T, tw) for T in tiles]
            if BOUNDARY in vs:
                rep.boundary_resamples += 1
                continue
            hits = [j for j, v in enumerate(vs) if v == INSIDE]
            rep.hit_counts[len(hits)] = rep.hit_counts.get(len(hits), 0) + 1
            if owner is not None and hits != [owner]:
                rep.violations.append({"kind": "disjointness" if len(hits) > 1 else "own-tile",
                                       "cell": owner, "inside": hits, "C": _plucker_witness(plk)})
            elif owner is None and len(hits) != 1:
                rep.violations.append({"kind": "coverage", "inside": hits, "C": _plucker_witness(plk)})
            return

    for _ in range(samples):
        classify(lambda: top_cell_plucker_sample(k, n, local))
    for j, T in enumerate(tiles):
        for _ in range(cell_samples):
            classify(lambda: cell_plucker_sample(T.recipe, local), owner=j)
    rep.runtime = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------- injectivity

def _chart_matrix(vals: dict, sources: tuple, ground: tuple) -> list:
    """C with identity-like block on the source set, entries read from Plücker values."""
    rows = []
    for r in range(len(sources)):
        row = []
        for j in ground:
            idx = list(sources)
            idx[r] = j
            s, key = sort_sign(idx)
            row.append(vals[key] * s if s else vals[tuple(sources)] * 0)
        rows.append(row)
    return rows


def jacobian_rank(R: Recipe, Z: ZMatrix, rng=None) -> tuple[int, int]:
    """Exact ranks of (edge weights -> C) and (edge weights -> Y = CZ) at a random point.

    Both are computed with dual numbers in affine charts; for a BCFW tile they
    equal 4k.
    """
    rng = make_rng(rng)
    G = build_cell(R)
    o = acyclic_orientation(G)
    E = len(G.edges)
    w = [Dual.variable(rng.randint(1, 9), e, E) for e in range(E)]
    one = Dual.const(1, E)
    vals = flow_pluckers(G, o, w, one)
    src = tuple(sorted(o.sources))
    k = len(src)
    if k == 0:
        return 0, 0
    C = _chart_matrix(vals, src, G.boundary)
    c_grads = [x.grad for row in C for x in row]
    Y = [[sum((C[r][i] * Z.entries[i][c] for i in range(Z.n)), Dual.const(0, E))
          for c in range(Z.width)] for r in range(k)]
    _, piv = rref([[x.val for x in row] for row in Y])
    rest = [c for c in range(Z.width) if c not in piv]
    X = solve_dual([[row[c] for c in piv] for row in Y], [[row[c] for c in rest] for row in Y])
    y_grads = [x.grad for row in X for x in row]
    return rank(c_grads), rank(y_grads)


@dataclass
class InjectivityReport:
    pairs: int
    skipped: int
    collisions: list
    cell_rank: int
    image_rank: int
    expected: int
    dimension: int

    @property
    def passed(self) -> bool:
        return (not self.collisions and self.image_rank == self.expected
                and self.cell_rank == self.expected and self.dimension == self.expected)

    def to_json(self) -> dict:
        return {"pairs": self.pairs, "skipped": self.skipped, "collisions": self.collisions,
                "cell_rank": self.cell_rank, "image_rank": self.image_rank,
                "expected": self.expected, "dimension": self.dimension, "passed": self.passed}


def _projective_key(plk: dict) -> tuple:
    """Plücker vector scaled so the first nonzero entry is one (hashable)."""
    items = sorted((J, v) for J, v in plk.items() if v)
    if not items:
        return ()
    ref = Fraction(items[0][1])
    return tuple((J, Fraction(v) / ref) for J, v in items)


def _images_differ(p1: dict, p2: dict, engine: TwistorEngine) -> bool:
    """Compare the images Y = CZ through their projective twistor vectors.

    A few twistors usually separate the points; the full vector decides otherwise.
    """
    every = list(itertools.combinations(range(1, engine.n + 1), 4))
    few = every[:: max(1, len(every) // 6)]
    for keys in (few, every):
        if _projective_key(engine.from_pluckers(p1, keys)) != _projective_key(engine.from_pluckers(p2, keys)):
            return True
    return False


def probe_injectivity(T: Tile, pairs: int, rng=None) -> InjectivityReport:
    """Distinct cell points must have distinct images; Jacobian rank must be 4k."""
    rng = make_rng(rng)
    engine = TwistorEngine(T.Z)
    skipped = 0
    collisions = []
    for _ in range(pairs):
        p1 = cell_plucker_sample(T.recipe, rng)
        p2 = cell_plucker_sample(T.recipe, rng)
        if _projective_key(p1) == _projective_key(p2):
            skipped += 1
            continue
        if not _images_differ(p1, p2, engine):
            collisions.append({"C1": _plucker_witness(p1), "C2": _plucker_witness(p2)})
    cr, yr = jacobian_rank(T.recipe, T.Z, rng)
    return InjectivityReport(pairs, skipped, collisions, cr, yr, 4 * T.k, dimension(T.graph))


# ---------------------------------------------------------------- adjacency

def _interpolate(xs: list, ys: list) -> list:
    """Coefficients (low to high) of the polynomial through the points (Newton form)."""
    n = len(xs)
    coef = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    out = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # out = out * (t - xs[i]) + coef[i]
        nxt = [Fraction(0)] * n
        for d in range(n - 1):
            nxt[d + 1] += out[d]
            nxt[d] -= out[d] * xs[i]
        nxt[0] += coef[i]
        out = nxt
    return out


def _horner(c: list, t):
    v = Fraction(0)
    for a in reversed(c):
        v = v * t + a
    return v


@dataclass
class Crossing:
    status: str  # "crossed" or "inconclusive"
    flippers: tuple = ()  # indices into irr of the functionaries changing sign
    interval: tuple = ()

    @property
    def unique(self) -> bool:
        return self.status == "crossed" and len(self.flippers) == 1


def segment_crossing(T: Tile, Y_in: GrassmannPoint, Y_out: GrassmannPoint, steps: int = 64,
                     engine: TwistorEngine | None = None) -> Crossing:
    """Binary search on the chart segment from Y_in (inside T) towards Y_out.

    The chart is fixed by Y_in's pivot columns and the orientation is carried
    continuously from Y_in, so every functionary is a polynomial in the
    segment parameter.
    """
    engine = engine or TwistorEngine(T.Z)
    k = T.k
    A, piv = rref(Y_in.entries)
    s0 = 1 if det([[r[c] for c in piv] for r in Y_in.entries]) > 0 else -1
    blockB = [[r[c] for c in piv] for r in Y_out.entries]
    if det(blockB) == 0:
        raise TileError("chart degenerates at the far endpoint")
    inv = [list(r) for r in rref([list(b) + [Fraction(int(i == j)) for j in range(k)]
                                   for i, b in enumerate(blockB)])[0]]
    Binv = [r[k:] for r in inv]
    Bm = matmul(Binv, Y_out.entries)
    deg = max((p.degree for p in T.irr.polys), default=0) * k
    ts = [Fraction(j) for j in range(deg + 1)]
    keys = T.keys
    samples = []
    for t in ts:
        Yt = [[(1 - t) * a + t * b for a, b in zip(ra, rb)] for ra, rb in zip(A, Bm)]
        tw = engine.from_point(GrassmannPoint(k, Y_in.ground, tuple(map(tuple, Yt))), keys)
        samples.append([s * p.evaluate({I: s0 * v for I, v in tw.items()})
                        for p, s in zip(T.irr.polys, T.signature)])
    polys = [_interpolate(ts, [row[j] for row in samples]) for j in range(len(T.irr))]

    def vals(t):
        return [_horner(c, t) for c in polys]

    def inside(v):
        return all(x > 0 for x in v)

    if not inside(vals(Fraction(0))):
        raise TileError("Y_in is not inside the tile")
    lo, hi = Fraction(0), Fraction(1)
    if inside(vals(hi)):
        return Crossing("inconclusive")
    for _ in range(steps):
        mid = (lo + hi) / 2
        if inside(vals(mid)):
            lo = mid
        else:
            hi = mid
    vl, vh = vals(lo), vals(hi)
    flips = tuple(j for j, (a, b) in enumerate(zip(vl, vh)) if a > 0 and b <= 0)
    return Crossing("crossed", flips, (lo, hi))


@dataclass
class AdjacencyReport:
    trials: int
    crossed: int = 0
    inconclusive: int = 0
    no_flip: int = 0
    multiple: int = 0
    unique_flippers: dict = field(default_factory=dict)  # label -> count
    nonfrozen_unique: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.no_flip == 0 and not self.nonfrozen_unique

    def to_json(self) -> dict:
        return {"trials": self.trials, "crossed": self.crossed, "inconclusive": self.inconclusive,
                "no_flip": self.no_flip, "multiple": self.multiple,
                "unique_flippers": dict(sorted(self.unique_flippers.items())),
                "nonfrozen_unique": self.nonfrozen_unique, "passed": self.passed}


def probe_adjacency(T: Tile, others: Sequence[Tile], trials: int, rng=None,
                    frozen: dict | None = None, retries: int = 5) -> AdjacencyReport:
    """Cross from T into other tiles and record which functionaries flip sign.

    ``frozen`` maps (chord, letter) labels to "frozen"/"mutable"; when given,
    every unique flipper must carry a frozen label.
    """
    rng = make_rng(rng)
    engine = TwistorEngine(T.Z)
    rep = AdjacencyReport(trials)
    others = [S for S in others if S is not T]
    if not others:
        raise TileError("need at least one other tile")
    for _ in range(trials):
        cr = None
        for _ in range(retries):
            S = rng.choice(others)
            Y_in = zmap(oriented(sample_recipe_point(T.recipe, rng)), T.Z)
            Y_out = zmap(oriented(sample_recipe_point(S.recipe, rng)), T.Z)
            try:
                cr = segment_crossing(T, Y_in, Y_out, engine=engine)
                break
            except TileError:
                continue
        if cr is None or cr.status != "crossed":
            rep.inconclusive += 1
            continue
        rep.crossed += 1
        if not cr.flippers:
            rep.no_flip += 1
        elif len(cr.flippers) > 1:
            rep.multiple += 1
        else:
            e = T.irr.elements[cr.flippers[0]]
            rep.unique_flippers[e.label] = rep.unique_flippers.get(e.label, 0) + 1
            if frozen is not None and e.labels and not any(frozen.get(l) == "frozen" for l in e.labels):
                if e.label not in rep.nonfrozen_unique:
                    rep.nonfrozen_unique.append(e.label)
    return rep
