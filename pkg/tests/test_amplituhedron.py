from __future__ import annotations

import random
from fractions import Fraction

import pytest

from bcfwtile.amplituhedron import (BOUNDARY, INSIDE, OUTSIDE, SignatureError, TileError,
                                    TwistorEngine, _projective_key, certify_signature,
                                    jacobian_rank, make_tile, membership, probe_adjacency,
                                    probe_injectivity, segment_crossing, top_cell_plucker_sample,
                                    verify_tiling, zmap, certified_tiles, cell_plucker_sample)
from bcfwtile.bcfw import ChordDiagram, standard_collection, standard_recipe
from bcfwtile.grassmannian import GrassmannPoint, oriented, same_point, sample_Z, twistors
from bcfwtile.bcfw import sample_recipe_point
from bcfwtile.polynomial import sym

S_EX = ChordDiagram(7, ((1, 2, 3, 4), (3, 4, 5, 6)))
Z72 = sample_Z(2, 7, 1)


def _s_ex_tile(samples=100):
    return certify_signature(make_tile(standard_recipe(S_EX), Z72), samples, 0)


def test_zmap_ignores_row_operations():
    C = oriented(sample_recipe_point(standard_recipe(S_EX), 2))
    r0, r1 = C.entries
    C2 = GrassmannPoint.from_rows([[a + 2 * b for a, b in zip(r0, r1)], r1])
    assert same_point(zmap(C, Z72), zmap(C2, Z72))


def test_k0_samples():
    assert top_cell_plucker_sample(0, 4, 1) == {(): 1}


def test_engine_matches_direct_twistors():
    # [DERIVED] direct (k+4) x (k+4) determinants of [Y; Z_I]
    Y = zmap(oriented(sample_recipe_point(standard_recipe(S_EX), 5)), Z72)
    e = TwistorEngine(Z72)
    direct = twistors(Y, Z72).values
    keys = list(direct)
    got = e.from_point(Y, keys)
    ratios = {got[I] / direct[I] for I in keys if direct[I]}
    assert len(ratios) == 1
    plk = cell_plucker_sample(standard_recipe(S_EX), random.Random(3))
    assert all(v is not None for v in e.from_pluckers(plk, keys).values())


def test_s_ex_signature():
    # [PAPER] the negative functionaries of the example tile are <2347>, <3457>, <3567>
    T = _s_ex_tile()
    neg = {e.poly for e in T.negatives()}
    assert neg == {sym(2, 3, 4, 7), sym(3, 4, 5, 7), sym(3, 5, 6, 7)}
    assert len(T.signature) == 10
    assert T.to_json()["functionaries"][0]["sign"] in (1, -1)


def test_uncertified_tile_refuses():
    T = make_tile(standard_recipe(S_EX), Z72)
    with pytest.raises(TileError):
        T.sign_map()
    with pytest.raises(TileError):
        make_tile(standard_recipe(S_EX), sample_Z(1, 7, 1))
    with pytest.raises(TileError):
        certify_signature(T, 0)


def test_membership_inside_outside_and_scaling():
    T = _s_ex_tile()
    R = standard_recipe(S_EX)
    for seed in range(5):
        Y = zmap(oriented(sample_recipe_point(R, seed)), Z72)
        assert membership(Y, T) == INSIDE
        flipped = GrassmannPoint.from_rows([[-3 * x for x in Y.entries[0]], list(Y.entries[1])])
        assert membership(flipped, T) == INSIDE
    others = [S for S in standard_collection(7, 2) if S != R]
    Y = zmap(oriented(sample_recipe_point(others[0], 1)), Z72)
    assert membership(Y, T) == OUTSIDE


def test_boundary_at_linear_root_k1():
    # [DERIVED] for k = 1 every functionary is linear along a segment, so the
    # first sign change is an exact rational root
    Z = sample_Z(1, 6, 2)
    coll = standard_collection(6, 1)
    tiles = certified_tiles(coll, Z, 50, 0)
    T, S = tiles[0], tiles[1]
    Yi = zmap(oriented(sample_recipe_point(T.recipe, 1)), Z)
    Yo = zmap(oriented(sample_recipe_point(S.recipe, 1)), Z)
    e = TwistorEngine(Z)

    def f(Y):
        tw = e.from_point(Y, T.keys)
        return [s * p.evaluate(tw) for p, s in zip(T.irr.polys, T.signature)]

    def at(t):
        return GrassmannPoint.from_rows([[(1 - t) * a + t * b for a, b in zip(Yi.entries[0], Yo.entries[0])]])

    f0, f1 = f(Yi), f(Yo)
    roots = [a / (a - b) for a, b in zip(f0, f1) if b < 0]
    t = min(roots)
    assert membership(at(t), T) == BOUNDARY
    assert membership(at(t - Fraction(1, 10 ** 6)), T) == INSIDE
    assert membership(at(t + Fraction(1, 10 ** 6)), T) == OUTSIDE


def test_verify_tiling_k1():
    rep = verify_tiling(standard_collection(6, 1), sample_Z(1, 6, 3), 200, 4, cell_samples=10)
    assert rep.passed and rep.coverage == 1.0
    assert rep.to_json()["hit_counts"] == {"1": 200 + 10 * 3}


def test_verify_tiling_single_tile():
    # Gr(1, 5) maps onto the whole amplituhedron for n = k + 4
    rep = verify_tiling(standard_collection(5, 1), sample_Z(1, 5, 3), 100, 1, cell_samples=5)
    assert rep.tiles == 1 and rep.passed


def test_signature_error_on_wrong_tile():
    # a functionary set from one tile changes sign on a different cell
    T = make_tile(standard_recipe(S_EX), Z72)
    other = [R for R in standard_collection(7, 2) if R != T.recipe][0]
    bad = T.__class__(other, Z72, T.irr)
    with pytest.raises(SignatureError):
        certify_signature(bad, 200, 0)


def test_injectivity_and_jacobian():
    T = _s_ex_tile(20)
    rep = probe_injectivity(T, 50, 1)
    assert rep.passed and rep.image_rank == 8 and rep.cell_rank == 8
    R1 = standard_collection(6, 1)[0]
    assert jacobian_rank(R1, sample_Z(1, 6, 2), 0) == (4, 4)


def test_projective_key_scale_invariant():
    p = {(1, 2): 2, (1, 3): 4, (2, 3): 0}
    q = {(1, 2): -1, (1, 3): -2}
    assert _projective_key(p) == _projective_key(q)


def test_segment_inconclusive_inside():
    T = _s_ex_tile(20)
    R = standard_recipe(S_EX)
    Y1 = zmap(oriented(sample_recipe_point(R, 1)), Z72)
    Y2 = zmap(oriented(sample_recipe_point(R, 2)), Z72)
    # the tile is not convex in general, so only check the statuses
    assert segment_crossing(T, Y1, Y2).status in ("inconclusive", "crossed")
    assert segment_crossing(T, Y1, Y1).status == "inconclusive"
    others = [S for S in standard_collection(7, 2) if S != R]
    with pytest.raises(TileError):
        Yo = zmap(oriented(sample_recipe_point(others[0], 1)), Z72)
        segment_crossing(T, Yo, Y1)


def test_adjacency_small_run():
    tiles = certified_tiles(standard_collection(7, 2), Z72, 30, 0)
    rep = probe_adjacency(tiles[0], tiles, 6, 1)
    assert rep.crossed + rep.inconclusive == 6
    assert rep.no_flip == 0 and rep.crossed > 0
    assert rep.to_json()["trials"] == 6
