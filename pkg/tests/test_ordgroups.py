import random
from fractions import Fraction
from itertools import product

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from starforge import ordgroups as og
from starforge.ordgroups import LexGroup, QuadraticSurd, ValueVector

from conftest import D2, Q, S2, Z, random_cut

SPACES = [LexGroup((Z,)), LexGroup((Q,)), LexGroup((Z, Q)), LexGroup((Q, Z)), LexGroup((Z, Z)),
          LexGroup((D2, S2)), LexGroup((Z, Q, Z))]


def spaces_and_rng():
    return st.tuples(st.sampled_from(SPACES), st.randoms(use_true_random=False))


# groups and scalars -----------------------------------------------------------


@pytest.mark.parametrize("text,dense", [("Z", False), ("Q", True), ("Z[1/3]", True),
                                        ("Z+Z*(sqrt(2))", True), ("Z+Z*(1/2+3*sqrt(5))", True)])
def test_group_literals_roundtrip(text, dense):
    g = og.RankOneGroup.parse(text)
    assert g.is_dense is dense
    assert og.RankOneGroup.parse(g.name) == g


@pytest.mark.parametrize("bad", ["Z[1/1]", "Z+Z*(3)", "Z+Z*(sqrt(4))", "R", "Z[1/x]"])
def test_bad_group_literals(bad):
    with pytest.raises(ValueError):
        og.RankOneGroup.parse(bad)


def test_membership_is_enforced():
    assert D2.contains(Fraction(3, 8)) and not D2.contains(Fraction(1, 3))
    assert S2.contains(og.parse_scalar("3-2*sqrt(2)")) and not S2.contains(Fraction(1, 2))
    assert not Z.contains(Fraction(1, 2))
    with pytest.raises(og.MembershipError):
        og.GroupElement(D2, Fraction(1, 3))


def test_surd_comparison_matches_interval_arithmetic():
    # 1/2 against sqrt(2) - 1 ~ 0.414: the half is larger
    half, surd = Fraction(1, 2), og.parse_scalar("sqrt(2)-1")
    assert og.compare_scalars(half, surd) == 1
    mpmath.mp.prec = 64
    rng = random.Random(5)
    for _ in range(300):
        x = QuadraticSurd(Fraction(rng.randint(-50, 50), rng.randint(1, 9)),
                          Fraction(rng.randint(-50, 50), rng.randint(1, 9)), 2)
        y = QuadraticSurd(Fraction(rng.randint(-50, 50), rng.randint(1, 9)),
                          Fraction(rng.randint(-50, 50), rng.randint(1, 9)), 2)
        iv = lambda s: mpmath.mpi(s.p.numerator) / s.p.denominator + \
            mpmath.mpi(s.q.numerator) / s.q.denominator * mpmath.sqrt(mpmath.mpi(2))
        lo = iv(x) - iv(y)
        if lo.a > 0:
            assert x > y
        elif lo.b < 0:
            assert x < y


def test_quadratic_epsilons_decrease_to_zero():
    eps = [S2.small_positive(k) for k in range(1, 7)]
    assert all(og.sign(e) > 0 for e in eps)
    assert all(a > b for a, b in zip(eps, eps[1:]))
    assert float(eps[-1]) < 0.01


def test_floor_of_surds():
    assert og.floor_scalar(og.parse_scalar("-sqrt(2)")) == -2
    assert og.floor_scalar(og.parse_scalar("3/2+sqrt(2)")) == 2
    assert og.floor_scalar(Fraction(-7, 2)) == -4


# vectors --------------------------------------------------------------------------


def test_compare_examples():
    zz, zq = LexGroup((Z, Z)), LexGroup((Z, Q))
    assert og.compare(ValueVector(zz, (0, 0)), ValueVector(zz, (0, 0))) == 0
    assert og.compare(ValueVector(zq, (1, -5)), ValueVector(zq, (0, 100))) == 1
    with pytest.raises(og.DimensionError):
        og.compare(ValueVector(zz, (0, 0)), ValueVector(zq, (0, 0)))


@given(spaces_and_rng())
def test_order_is_compatible_with_addition(data):
    space, rng = data
    x, y, z = ([g.random_element(rng) for g in space.factors] for _ in range(3))
    if og.lex_cmp(x, y) <= 0:
        assert og.lex_cmp(og.vadd(x, z), og.vadd(y, z)) <= 0


# cuts ---------------------------------------------------------------------------------


def test_member_examples():
    zz, zq = LexGroup((Z, Z)), LexGroup((Z, Q))
    assert og.cut_member(og.make_cut(zz, 2, (0, 0), True), (0, 0))
    assert not og.cut_member(og.make_cut(zq, 2, (0, 0), False), (0, 0))
    assert og.cut_member(og.make_cut(zz, 1, (0, 0), True), (0, -7))


def test_open_discrete_cut_is_rewritten():
    zz = LexGroup((Z, Z))
    c = og.make_cut(zz, 2, (0, 0), False)
    assert c.closed and c.pivot == (0, 1)


@given(spaces_and_rng())
def test_canonicalization_is_idempotent_and_faithful(data):
    space, rng = data
    c = random_cut(space, rng)
    assert og.canon(og.canon(c)) == og.canon(c) == c
    raw = og.Cut(space, c.level, c.pivot, c.closed)
    assert og.canon(raw) == c


@given(spaces_and_rng())
def test_cuts_are_upward_closed(data):
    space, rng = data
    c = random_cut(space, rng)
    pts = og.probes(c)
    for x in pts:
        for y in pts:
            if og.lex_cmp(x, y) <= 0 and og.cut_member(c, x):
                assert og.cut_member(c, y)


@given(spaces_and_rng())
def test_meet_and_join_agree_with_probes(data):
    space, rng = data
    a, b = random_cut(space, rng), random_cut(space, rng)
    meet, join = og.cut_lattice(a, b, "meet_set"), og.cut_lattice(a, b, "join_set")
    for x in og.probes(a) + og.probes(b):
        assert og.cut_member(meet, x) == (og.cut_member(a, x) and og.cut_member(b, x))
        assert og.cut_member(join, x) == (og.cut_member(a, x) or og.cut_member(b, x))


@given(spaces_and_rng())
@settings(max_examples=200)
def test_colon_is_adjoint_to_sum(data):
    """x + b inside a  iff  x inside (a : b), for cuts x."""
    space, rng = data
    a, b, x = (random_cut(space, rng) for _ in range(3))
    assert og.cut_subset(og.sum_set(x, b), a) == og.cut_subset(x, og.colon_set(a, b))


@given(spaces_and_rng())
def test_sum_laws(data):
    space, rng = data
    a, b, c = (random_cut(space, rng) for _ in range(3))
    assert og.sum_set(a, b) == og.sum_set(b, a)
    assert og.sum_set(og.sum_set(a, b), c) == og.sum_set(a, og.sum_set(b, c))
    assert og.sum_set(a, og.join_set(b, c)) == og.join_set(og.sum_set(a, b), og.sum_set(a, c))
    one = og.unit_cut(space)
    assert og.sum_set(a, one) == a


@given(spaces_and_rng())
def test_sum_contains_pairwise_sums_of_probes(data):
    space, rng = data
    a, b = random_cut(space, rng), random_cut(space, rng)
    s = og.sum_set(a, b)
    ins_a = [x for x in og.probes(a) if og.cut_member(a, x)]
    ins_b = [y for y in og.probes(b) if og.cut_member(b, y)]
    for x in ins_a:
        for y in ins_b:
            assert og.cut_member(s, og.vadd(x, y))


def test_dense_examples():
    q = LexGroup((Q,))
    open0 = og.make_cut(q, 1, (0,), False)
    assert og.sum_set(open0, open0) == open0
    zq = LexGroup((Z, Q))
    closed = og.make_cut(zq, 2, (0, 0), True)
    opened = og.make_cut(zq, 2, (0, 0), False)
    assert og.colon_set(closed, opened) == closed


def test_sentinels():
    zq = LexGroup((Z, Q))
    a = og.make_cut(zq, 2, (1, 0), False)
    assert og.sum_set(a, og.zero(zq)) == og.zero(zq)
    assert og.colon_set(a, og.zero(zq)).is_full
    assert og.colon_set(og.full(zq), a).is_full
    assert og.colon_set(a, og.full(zq)).is_zero
    assert og.meet_set(a, og.full(zq)) == a and og.join_set(a, og.zero(zq)) == a


def _grid(radius, n):
    return list(product(range(-radius, radius + 1), repeat=n))


@pytest.mark.parametrize("space", [LexGroup((Z,)), LexGroup((Z, Z))])
def test_all_four_operations_exhaustively_on_integer_grids(space):
    n = len(space)
    cuts = [og.make_cut(space, lv, h, True)
            for lv in range(1, n + 1) for h in product(range(-2, 3), repeat=lv)]
    inner, wide = _grid(5, n), _grid(12, n)
    mem = {c: {x for x in wide if og.cut_member(c, x)} for c in cuts}
    for a in cuts:
        for b in cuts:
            meet, join = og.meet_set(a, b), og.join_set(a, b)
            total, res = og.sum_set(a, b), og.colon_set(a, b)
            for x in inner:
                assert og.cut_member(meet, x) == (x in mem[a] and x in mem[b])
                assert og.cut_member(join, x) == (x in mem[a] or x in mem[b])
                near = [y for y in mem[b] if max(map(abs, y)) <= 8]
                in_sum = any(og.vsub(x, y) in mem[a] for y in near)
                assert og.cut_member(total, x) == in_sum
                fits = all(og.vadd(x, y) in mem[a] or max(map(abs, og.vadd(x, y))) > 12
                           for y in near)
                assert og.cut_member(res, x) == fits


def test_parse_and_render_cuts():
    zq = LexGroup((Z, Q))
    for text in [">= (1,-1/2) @2", "> (0,0) @2", ">= (3) @1", "K"]:
        assert og.render_cut(og.parse_cut(text, zq)) == text
    with pytest.raises(og.MembershipError):
        og.parse_cut(">= (1/2) @1", zq)
    with pytest.raises(og.DimensionError):
        og.parse_cut(">= (1,1,1) @3", zq)
