"""Product promotion, pullbacks along cell operations, and coordinate cluster variables."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .bcfw import Cyc, Pre, Product, Recipe, Refl, Trivial
from .linalg import sort_sign
from .polynomial import ONE, ZERO, PluckerPoly, PolyError, canonical, divide, straighten

LETTERS = ("alpha", "beta", "gamma", "delta", "epsilon")


class PromotionError(ValueError):
    pass


@dataclass(frozen=True)
class PromotionContext:
    B: tuple
    side: str  # "left" or "right"
    ground: tuple  # ambient ground set

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise PromotionError("side must be 'left' or 'right'")
        a, b, c, d, n = self.B
        N = self.ground
        if any(x not in N for x in self.B):
            raise PromotionError(f"markers {self.B} not in ground set")
        p = {x: j for j, x in enumerate(N)}
        if not (p[b] == p[a] + 1 and p[d] == p[c] + 1 and p[n] == p[d] + 1 and p[n] == len(N) - 1):
            raise PromotionError(f"markers {self.B} violate the consecutiveness constraints")

    @property
    def factor_ground(self) -> tuple:
        a, b, c, d, n = self.B
        N = self.ground
        if self.side == "left":
            return tuple(x for x in N if x <= a) + (b, n)
        return tuple(x for x in N if b <= x <= d) + (n,)

    @property
    def t_prime(self) -> tuple:
        """The four Plücker symbols that may appear as Laurent factors."""
        a, b, c, d, n = self.B
        return tuple(tuple(sorted(s)) for s in ((a, b, c, n), (a, b, c, d), (b, c, d, n), (a, c, d, n)))

    def substitution(self) -> dict:
        """index -> (list of (index, coefficient polynomial), denominator symbol)."""
        a, b, c, d, n = self.B
        P = PluckerPoly.symbol
        # (ij) cap (rsq) = v_i <j r s q> - v_j <i r s q>
        ba_cdn = [(b, P((a, c, d, n))), (a, -P((b, c, d, n)))]
        if self.side == "left":
            return {b: (ba_cdn, tuple(sorted((a, c, d, n))))}
        dc_abn = [(d, P((c, a, b, n))), (c, -P((d, a, b, n)))]
        return {n: (ba_cdn, tuple(sorted((a, b, c, d)))), d: (dc_abn, tuple(sorted((a, b, c, n))))}


def _promote_symbol(s: tuple, subst: dict) -> tuple:
    """(numerator polynomial, denominator as sorted tuple of symbols) for one symbol."""
    slots = [j for j, i in enumerate(s) if i in subst]
    den = tuple(sorted(subst[s[j]][1] for j in slots))
    choices = [subst[s[j]][0] for j in slots]
    num = ZERO
    for pick in itertools.product(*choices):
        idx = list(s)
        coeff = ONE
        for j, (new, c) in zip(slots, pick):
            idx[j] = new
            coeff = coeff * c
        if sort_sign(idx)[0] == 0:
            continue
        num = num + coeff * PluckerPoly.symbol(idx)
    return num, den


def psi(ctx: PromotionContext, p: PluckerPoly) -> tuple[PluckerPoly, dict]:
    """Product promotion of p as (numerator, {T' symbol: exponent})."""
    allowed = set(ctx.factor_ground)
    bad = p.indices() - allowed
    if bad:
        raise PromotionError(f"indices {sorted(bad)} outside the {ctx.side} factor ground set")
    subst = ctx.substitution()
    terms = []
    for m, c in p.terms:
        num = PluckerPoly.const(c)
        den: dict = {}
        for s in m:
            ns, ds = _promote_symbol(s, subst)
            num = num * ns
            for t in ds:
                den[t] = den.get(t, 0) + 1
        terms.append((num, den))
    lcd: dict = {}
    for _, den in terms:
        for t, e in den.items():
            lcd[t] = max(lcd.get(t, 0), e)
    total = ZERO
    for num, den in terms:
        for t, e in lcd.items():
            extra = e - den.get(t, 0)
            if extra:
                num = num * PluckerPoly.symbol(t) ** extra
        total = total + num
    return total, lcd


def strip_t_prime(ctx: PromotionContext, num: PluckerPoly) -> tuple[PluckerPoly, dict]:
    """Divide out every factor of T' (modulo the Plücker relations).

    Returns the quotient and the exponents of the removed factors.
    """
    q = straighten(num)
    if not q:
        raise PromotionError("promotion gave the zero polynomial")
    removed: dict = {}
    changed = True
    while changed and q.degrees != {0}:
        changed = False
        for t in ctx.t_prime:
            r = divide(q, PluckerPoly.symbol(t))
            if r is not None and r:
                q = r
                removed[t] = removed.get(t, 0) + 1
                changed = True
    return q, removed


def psi_bar(ctx: PromotionContext, p: PluckerPoly) -> PluckerPoly:
    """Rescaled promotion: psi with its Laurent monomial in T' removed, normalized.

    When psi(p) is itself a Laurent monomial in T' the cluster variable is the
    one T' symbol left with exponent one (this happens for <b c d n>).
    """
    num, den = psi(ctx, p)
    q, removed = strip_t_prime(ctx, num)
    if q.degrees == {0}:
        net = {t: removed.get(t, 0) - den.get(t, 0) for t in set(removed) | set(den)}
        net = {t: e for t, e in net.items() if e}
        if len(net) != 1 or list(net.values()) != [1]:
            raise PromotionError(f"promotion of {p.compact()} is a Laurent monomial {net}")
        (t,) = net
        return PluckerPoly.symbol(t)
    return q.normalized()


# ---------------------------------------------------------------- pullbacks

def cyc_inv_pullback(p: PluckerPoly, ground: Sequence[int]) -> PluckerPoly:
    """(cyc^-1)^*: <I> -> <I - 1> in positions of the ground set."""
    N = tuple(ground)
    return straighten(p.relabel({N[j]: N[j - 1] for j in range(len(N))}))


def cyc_pullback(p: PluckerPoly, ground: Sequence[int]) -> PluckerPoly:
    N = tuple(ground)
    return straighten(p.relabel({N[j]: N[(j + 1) % len(N)] for j in range(len(N))}))


def refl_pullback(p: PluckerPoly, ground: Sequence[int]) -> PluckerPoly:
    N = tuple(ground)
    return straighten(p.relabel({N[j]: N[len(N) - 1 - j] for j in range(len(N))}))


def pre_pullback(i: int, p: PluckerPoly) -> PluckerPoly:
    """pre_i^*: every symbol containing i vanishes."""
    return PluckerPoly(tuple((m, c) for m, c in p.terms if not any(i in s for s in m)))


def pullback(op: str, p: PluckerPoly, ground: Sequence[int], i: int | None = None) -> PluckerPoly:
    if op == "cyc_inv":
        return cyc_inv_pullback(p, ground)
    if op == "cyc":
        return cyc_pullback(p, ground)
    if op == "refl":
        return refl_pullback(p, ground)
    if op == "pre":
        return pre_pullback(i, p)
    raise PromotionError(f"unknown pullback {op!r}")


# ---------------------------------------------------------------- Irr

@dataclass(frozen=True)
class IrrElement:
    poly: PluckerPoly
    chord: int | None = None
    letter: str | None = None
    aliases: tuple = ()  # further (chord, letter) labels of the same variable

    @property
    def label(self) -> str:
        if self.chord is None:
            return self.poly.compact()
        return "=".join(f"{l}_{c}" for c, l in self.labels)

    @property
    def labels(self) -> tuple:
        if self.chord is None:
            return ()
        return ((self.chord, self.letter),) + self.aliases


@dataclass(frozen=True)
class IrrSet:
    elements: tuple
    collisions: tuple = ()

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def polys(self) -> list:
        return [e.poly for e in self.elements]

    def find(self, p: PluckerPoly) -> IrrElement | None:
        q = canonical(p)
        for e in self.elements:
            if e.poly == q or e.poly == -q:
                return e
        return None

    def by_label(self) -> dict:
        return {lab: e for e in self.elements for lab in e.labels}

    def to_json(self) -> list:
        return [{"poly": e.poly.compact(), "terms": e.poly.to_json(),
                 "labels": [{"chord": c, "letter": l} for c, l in e.labels]}
                for e in self.elements]


def _dedupe(items) -> IrrSet:
    out: list = []
    collisions = []
    for e in items:
        j = next((j for j, x in enumerate(out) if x.poly == e.poly or x.poly == -e.poly), None)
        if j is None:
            out.append(e)
            continue
        collisions.append(e)
        x = out[j]
        out[j] = IrrElement(x.poly, x.chord, x.letter, x.aliases + e.labels)
    return IrrSet(tuple(out), tuple(collisions))


def _new_variables(B: tuple, chord: int | None) -> list:
    a, b, c, d, n = B
    syms = ((b, c, d, n), (a, c, d, n), (a, b, d, n), (a, b, c, n), (a, b, c, d))
    return [IrrElement(PluckerPoly.symbol(s), chord, LETTERS[j] if chord is not None else None)
            for j, s in enumerate(syms)]


@lru_cache(maxsize=None)
def _psi_bar_cached(ctx: PromotionContext, p: PluckerPoly) -> PluckerPoly:
    return psi_bar(ctx, p)


@lru_cache(maxsize=None)
def irr(R: Recipe) -> IrrSet:
    """Coordinate cluster variables of the cell built by R."""
    if isinstance(R, Trivial):
        return IrrSet(())
    if isinstance(R, Product):
        N = R.ground
        items = []
        collisions = []
        for side, child in (("left", R.left), ("right", R.right)):
            ctx = PromotionContext(tuple(R.B), side, N)
            sub = irr(child)
            collisions.extend(sub.collisions)
            for e in sub:
                items.append(IrrElement(_psi_bar_cached(ctx, e.poly), e.chord, e.letter, e.aliases))
        items.extend(_new_variables(tuple(R.B), R.chord))
        res = _dedupe(items)
        return IrrSet(res.elements, tuple(collisions) + res.collisions)
    if isinstance(R, Pre):
        return irr(R.child)
    sub = irr(R.child)
    N = R.ground
    if isinstance(R, Cyc):
        f = lambda p: cyc_inv_pullback(p, N)  # noqa: E731
    else:
        f = lambda p: refl_pullback(p, N)  # noqa: E731
    return IrrSet(tuple(IrrElement(f(e.poly).normalized(), e.chord, e.letter, e.aliases) for e in sub), sub.collisions)


def eval_functionary(p: PluckerPoly, T) -> object:
    """Evaluate p with each Plücker symbol replaced by the twistor coordinate."""
    values = T if isinstance(T, dict) else getattr(T, "values", T)
    try:
        return p.evaluate(values)
    except KeyError as exc:
        raise PromotionError(f"missing twistor coordinate {exc.args[0]}") from None
