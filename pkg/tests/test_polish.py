from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, strategies as st

from boolvalued import (
    INFINITY, Basic, BasisBall, Compl, PolishPresentation, Prim, SpaceError, UnionFin,
    ball_membership, basis_enumerate, eval_borel, intersection, point,
)
from boolvalued.polish import code_depth, diagonal_code, set_code, singleton_code, sq_dist

C = PolishPresentation.complex()
UNIT = BasisBall(point(0, 0), F(1))


def test_ball_membership_examples():
    assert ball_membership(C, point(0, 0), UNIT)
    assert not ball_membership(C, point(1, 0), UNIT)  # open ball
    # |p|^2 = 1/4 + 1/4 = 8/16 < 9/16 = r^2
    assert ball_membership(C, point(F(1, 2), F(1, 2)), BasisBall(point(0, 0), F(3, 4)))
    with pytest.raises(SpaceError):
        ball_membership(C, point(0), UNIT)


def test_borel_examples():
    p = point(0, 0)
    assert not eval_borel(C, Compl(Basic(0)), [p])
    assert not eval_borel(C, UnionFin(()), [p])
    everything = UnionFin((Basic(0), Compl(Basic(0))))
    for q in (point(0, 0), point(5, -3), point(1, 0)):
        assert eval_borel(C, everything, [q])
    with pytest.raises(SpaceError):
        eval_borel(C, Basic(0, 1), [p])


def test_complex_enumeration_is_fixed():
    assert basis_enumerate(C, 0) == []
    b0 = basis_enumerate(C, 1)[0]
    assert (b0.center, b0.radius) == (point(0, 0), 1)
    first = basis_enumerate(C, 9)
    assert {b.center for b in first} == {point(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)}
    assert all(b.radius == 1 for b in first)
    # stage 2 starts with half-integer centres at radius 1
    assert (C.ball(9).center, C.ball(9).radius) == (point(F(-1, 2), F(-1, 2)), 1)
    # a fresh presentation reproduces the same order
    again = PolishPresentation.complex()
    assert [again.ball(i) for i in range(60)] == [C.ball(i) for i in range(60)]


def test_finite_enumeration_eventually_isolates_points():
    Y = PolishPresentation.finite([0, 1, 2])
    for p in Y.points:
        i = singleton_code(Y, p).index
        assert Y.ball_points(i) == {p}


def test_naturals_balls():
    N = PolishPresentation.naturals()
    for i in range(30):
        b = N.ball(i)
        assert b.radius > 0
    assert N.contains(point(3)) and not N.contains(point(F(1, 2)))
    assert not N.contains(point(-1))


def test_hilbert_fragment_membership():
    H = PolishPresentation.hilbert(2, [[(point(F(1, 2), F(1, 2)), F(1, 4))]])
    assert H.contains(point(F(1, 2), F(1, 2)))
    assert not H.contains(point(0, 0))
    assert H.contains(H.base_point)
    with pytest.raises(SpaceError):
        PolishPresentation.hilbert(0)


def test_infinity_is_not_a_point():
    assert not C.contains(INFINITY)


def test_set_codes_on_finite_spaces():
    Y = PolishPresentation.finite([0, 1, 2])
    p = Y.points
    pairs = {(p[0], p[1]), (p[2], p[2])}
    code = set_code(Y, pairs)
    for t in product(p, repeat=2):
        assert eval_borel(Y, code, t) == (t in pairs)
    diag = diagonal_code(Y)
    for t in product(p, repeat=2):
        assert eval_borel(Y, diag, t) == (t[0] == t[1])


def test_primitives():
    assert eval_borel(C, Prim("add", (0, 1, 2)), [point(1, 2), point(3, 4), point(4, 6)])
    assert eval_borel(C, Prim("mul", (0, 1, 2)), [point(0, 1), point(0, 1), point(-1, 0)])
    assert eval_borel(C, Prim("neg", (0, 1)), [point(1, 2), point(-1, -2)])
    assert eval_borel(C, Prim("conj", (0, 1)), [point(1, 2), point(1, -2)])
    assert eval_borel(C, Prim("inv", (0, 1)), [point(0, 2), point(0, F(-1, 2))])
    assert not eval_borel(C, Prim("inv", (0, 1)), [point(0, 0), point(0, 0)])
    with pytest.raises(SpaceError):
        Prim("sqrt", (0, 1))


def test_depth_convention():
    assert code_depth(Basic(0)) == 1
    assert code_depth(Compl(Basic(0))) == 2
    assert code_depth(intersection(Basic(0), Basic(1))) == 4


coords = st.fractions(min_value=-3, max_value=3, max_denominator=8)


@given(coords, coords)
def test_complement_and_union_laws(x, y):
    p = point(x, y)
    for i in range(12):
        a, b = Basic(i), Basic(i + 3)
        assert eval_borel(C, Compl(a), [p]) != eval_borel(C, a, [p])
        assert eval_borel(C, UnionFin((a, b)), [p]) == (eval_borel(C, a, [p]) or eval_borel(C, b, [p]))
        assert eval_borel(C, a, [p]) == (sq_dist(p, C.ball(i).center) < C.ball(i).radius ** 2)


@given(st.integers(0, 80), st.integers(0, 80))
def test_closure_relations_agree_with_arithmetic(m, n):
    bm, bn = C.ball(m), C.ball(n)
    d2 = sq_dist(bm.center, bn.center)
    assert C.closures_disjoint(m, n) == (d2 > (bm.radius + bn.radius) ** 2)
    # Cl(U_m) ⊆ U_n iff the far side of U_m stays strictly inside U_n
    gap = bn.radius - bm.radius
    assert C.closure_subset(m, n) == (gap > 0 and d2 < gap ** 2)
    assert not C.closure_subset(m, m)


@given(coords, coords, st.integers(1, 120))
def test_ball_bits_match_direct_checks(x, y, k):
    p = point(x, y)
    op, cl = C.ball_bits(p, k)
    for i in range(k):
        assert bool(op >> i & 1) == C.ball(i).contains(p)
        assert bool(cl >> i & 1) == C.in_closure(p, i)
    assert op & ~cl == 0


def test_adequate_bound_separates():
    pts = [point(0, 0), point(1, 0), point(F(1, 2), F(1, 2))]
    k = C.adequate_bound(pts)
    for a, b in product(pts, repeat=2):
        if a != b:
            assert any(C.separates(i, a, b) for i in range(k))
