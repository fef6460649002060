from __future__ import annotations

import json

import pytest

from bcfwtile.bcfw import ChordDiagram, chord_relations, enumerate_chords, standard_recipe
from bcfwtile.cluster import (ClusterError, Quiver, check_compatible, classify_frozen,
                              quiver_from_chords, rectangle_symbol, rectangles_seed)
from bcfwtile.polynomial import numeric_equal, sym
from bcfwtile.promotion import irr

S_EX = ChordDiagram(7, ((1, 2, 3, 4), (3, 4, 5, 6)))


def test_path_mutation_by_hand():
    # [DERIVED] 0 -> 1 -> 2 mutated at 1 gives 1 -> 0, 2 -> 1 and the shortcut 0 -> 2
    Q = Quiver.from_arrows("abc", (True, True, True), [(0, 1), (1, 2)])
    M = Q.mutate(1)
    assert dict(M.arrows) == {(1, 0): 1, (2, 1): 1, (0, 2): 1}


def test_mutation_is_an_involution():
    S = rectangles_seed(4, 7)
    for v, m in enumerate(S.quiver.mutable):
        if m:
            assert S.quiver.mutate(v).mutate(v) == S.quiver
            assert S.mutate(v).mutate(v).cluster == S.cluster


def test_two_cycles_cancel_and_frozen_vertices_refuse():
    Q = Quiver.from_arrows("ab", (True, False), [(0, 1), (1, 0), (0, 1)])
    assert dict(Q.arrows) == {(0, 1): 1}
    with pytest.raises(ClusterError):
        Q.mutate(1)
    with pytest.raises(ClusterError):
        Quiver.from_arrows("a", (True,), [(0, 0)])


def test_rectangles_seed_gr47():
    # [DERIVED] 12 rectangles plus the empty one; (k-1)(n-k-1) = 6 mutable
    S = rectangles_seed(4, 7)
    assert len(S.cluster) == 13
    assert sum(S.quiver.mutable) == 6
    frozen = {x.compact() for x, m in zip(S.cluster, S.quiver.mutable) if not m}
    assert frozen == {"<1234>", "<2345>", "<3456>", "<4567>", "<1567>", "<1267>", "<1237>"}
    assert rectangle_symbol(4, 7, 0, 0) == (4, 5, 6, 7)


def test_exchange_relations_gr46():
    # [DERIVED] x * x' = P1 + P2 at random points for every mutable vertex
    S = rectangles_seed(4, 6)
    for v, m in enumerate(S.quiver.mutable):
        if not m:
            continue
        P1, P2 = S.exchange_monomials(v)
        new = S.mutate(v).cluster[v]
        lhs = S.cluster[v] * new
        assert numeric_equal(lhs, P1 + P2) or numeric_equal(lhs, -(P1 + P2))


def test_binomial_mutation_of_2367():
    S = rectangles_seed(4, 7)
    v = S.index_of(sym(2, 3, 6, 7))
    new = S.mutate(v).cluster[v]
    assert new.degree == 2 and len(new.terms) == 2


def test_frozen_only_set_is_compatible():
    S = rectangles_seed(4, 7)
    frozen = [x for x, m in zip(S.cluster, S.quiver.mutable) if not m]
    res = check_compatible(frozen, 4, 7, depth=2)
    assert res.status == "compatible" and res.sequence == ()


def test_s_ex_irr_compatible():
    res = check_compatible(irr(standard_recipe(S_EX)).polys, 4, 7, depth=8)
    assert res.status == "compatible"
    assert all(res.witness.index_of(p) is not None for p in irr(standard_recipe(S_EX)).polys)


def test_classify_frozen_single_chord():
    # a lone chord has no children and no neighbours, so everything is frozen
    D = ChordDiagram(7, ((1, 2, 4, 5),))
    assert set(classify_frozen(D).values()) == {"frozen"}


def test_classify_frozen_same_end_pair():
    D = ChordDiagram(7, ((1, 2, 4, 5), (2, 3, 4, 5)))
    c = classify_frozen(D)
    rel = chord_relations(D)
    parent = next(i for i in (1, 2) if rel.parent[i] is None)
    assert c[(parent, "delta")] == c[(parent, "epsilon")] == "mutable"
    assert c[(parent, "gamma")] == "frozen"


def test_witness_quiver_matches_table_n7():
    # [DERIVED] arrows at mutable vertices of an actual seed containing Irr agree with
    # the rule table; variables are compared as polynomials since labels may alias
    for D in enumerate_chords(7, 2):
        I = irr(standard_recipe(D))
        lab = I.by_label()
        res = check_compatible(I.polys, 4, 7, depth=8)
        assert res.status == "compatible"
        W = res.witness
        mutable = {lab[l].poly for l, s in classify_frozen(D).items() if s == "mutable"}
        table = {(lab[u].poly, lab[v].poly) for u, v in quiver_from_chords(D).arrow_set()}
        wit = set()
        for (u, v), _ in W.quiver.arrows:
            pu, pv = W.cluster[u], W.cluster[v]
            if {pu, pv, -pu, -pv} & mutable:
                wit.add((pu, pv))
        assert wit == table


def test_exports():
    CQ = quiver_from_chords(ChordDiagram(7, ((1, 2, 4, 5), (2, 3, 4, 5))))
    dot = CQ.quiver.to_dot(CQ.dotted)
    assert dot.startswith("digraph") and "style=dotted" in dot
    data = json.loads(json.dumps(CQ.quiver.to_json()))
    assert len(data["vertices"]) == 10
    seed_json = rectangles_seed(4, 6).to_json()
    assert seed_json["cluster"][0].startswith("<")
