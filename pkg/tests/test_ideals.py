import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from starforge import ideals as ie
from starforge import ordgroups as og
from starforge.forest import ScopeError, standard_decomposition

from conftest import fx_a, fx_b, fx_c, fx_d

FORESTS = [fx_a(), fx_b(), fx_c(), fx_d()]


def forest_and_rng():
    return st.tuples(st.sampled_from(FORESTS), st.randoms(use_true_random=False))


def test_intersect_is_idempotent_and_r_absorbs():
    f = fx_a()
    i = ie.parse_ideal("M1: >= (1) @1", f)
    assert (i & i) == i
    assert i + ie.unit(f) == ie.unit(f)


def test_principal_intersection_on_fx_d_against_grid():
    f = fx_d()
    x = ie.parse_ideal("M1: >= (1,0) @2; M2: >= (1,0) @2", f)
    y = ie.parse_ideal("M1: >= (0,1) @2; M2: >= (0,1) @2", f)
    meet = x & y
    for m in f.leaves:
        for pt in product(range(-3, 4), repeat=2):
            inside = og.cut_member(x[m], pt) and og.cut_member(y[m], pt)
            assert og.cut_member(meet[m], pt) == inside
    assert meet[m].pivot == (1, 0)


def test_colon_examples():
    a, c = fx_a(), fx_c()
    assert ie.colon(ie.unit(a), ie.unit(a)) == ie.unit(a)
    m = ie.maximal_ideal(c, "M")
    assert ie.colon(ie.unit(c), m) == ie.unit(c)
    x = ie.parse_ideal("M1: >= (2) @1; M2: >= (-1) @1", a)
    assert ie.colon(ie.unit(a), x) == ie.parse_ideal("M1: >= (-2) @1; M2: >= (1) @1", a)


def test_colon_by_zero_and_zero_colon():
    f = fx_a()
    assert ie.colon(ie.unit(f), ie.ZERO) == ie.quotient_field(f)
    assert ie.colon(ie.unit(f), ie.quotient_field(f)) is ie.ZERO


def test_localize_examples():
    b = fx_b()
    for p in b.nodes:
        c = ie.localize(ie.unit(b), p)
        assert c.closed and c.level == b.depth(p) and all(x == 0 for x in c.pivot)
    m1 = ie.maximal_ideal(b, "M1")
    assert og.render_cut(ie.localize(m1, "P")) == ">= (0) @1"
    x = ie.parse_ideal("M1: >= (2,1/3) @2; M2: >= (2,5) @2", b)
    assert og.render_cut(ie.localize(x, "P")) == ">= (2) @1"


def test_restrict_and_contract():
    a = fx_a()
    for br in standard_decomposition(a):
        assert ie.restrict(ie.unit(a), br.forest) == ie.unit(br.forest)
    t1 = standard_decomposition(a)[0].forest
    back = ie.contract(ie.maximal_ideal(t1, "M1"), a)
    assert back == ie.parse_ideal("M1: > (0) @1", a)


@given(forest_and_rng())
@settings(max_examples=60)
def test_glue_inverts_restriction(data):
    f, rng = data
    i = ie.random_ideal(f, rng)
    parts = [ie.restrict(i, b.forest) for b in standard_decomposition(f)]
    assert ie.glue(f, parts) == i


@given(forest_and_rng())
@settings(max_examples=60)
def test_restrict_after_contract_is_identity(data):
    f, rng = data
    for b in standard_decomposition(f):
        j = ie.random_integral_ideal(b.forest, rng)
        assert ie.restrict(ie.contract(j, f), b.forest) == j


def test_is_fractional_examples():
    a, b = fx_a(), fx_b()
    ok, d = ie.is_fractional(ie.unit(a))
    assert ok and all(all(x == 0 for x in vals) for vals in d.values.values())
    t_p = ie.module_at(b, "P")
    ok, d = ie.is_fractional(t_p)
    assert ok and t_p.shifted(d.values).is_integral
    k_on_m1 = ie.IdealFamily(a, {"M1": og.full(a.lex_group("M1")), "M2": ie.unit(a)["M2"]})
    assert ie.is_fractional(k_on_m1) == (False, None)


@given(forest_and_rng())
@settings(max_examples=80)
def test_random_ideals_are_fractional(data):
    f, rng = data
    i = ie.random_ideal(f, rng)
    ok, d = ie.is_fractional(i)
    assert ok and i.shifted(d.values).is_integral


@given(forest_and_rng())
@settings(max_examples=80)
def test_operations_keep_compatibility(data):
    f, rng = data
    i, j = ie.random_ideal(f, rng), ie.random_ideal(f, rng)
    for r in (i & j, i + j, i * j):
        assert isinstance(r, ie.IdealFamily)
    assert (i & j) <= i <= (i + j)
    c = ie.colon(i, j)
    assert c is ie.ZERO or (c * j) <= i


@given(forest_and_rng())
@settings(max_examples=80)
def test_colon_by_principal_commutes_with_localization(data):
    f, rng = data
    i, j = ie.random_ideal(f, rng), ie.random_witness(f, rng).ideal()
    c = ie.colon(i, j)
    for p in f.nodes:
        t = f.overring([p])
        assert ie.restrict(c, t) == ie.colon(ie.restrict(i, t), ie.restrict(j, t))


@given(forest_and_rng())
@settings(max_examples=80)
def test_colon_commutes_with_branch_restriction(data):
    f, rng = data
    i, j = ie.random_ideal(f, rng), ie.random_ideal(f, rng)
    c = ie.colon(i, j)
    for b in standard_decomposition(f):
        rhs = ie.colon(ie.restrict(i, b.forest), ie.restrict(j, b.forest))
        assert (c is ie.ZERO and rhs is ie.ZERO) or ie.restrict(c, b.forest) == rhs


@given(forest_and_rng())
@settings(max_examples=40)
def test_lift_restricts_back(data):
    f, rng = data
    for p in f.nodes:
        t = f.overring([p])
        j = ie.restrict(ie.random_ideal(f, rng), t)
        assert ie.restrict(ie.lift(j, f), t) == j


def test_principal_witness_inverse():
    rng = random.Random(3)
    f = fx_b()
    w = ie.random_witness(f, rng)
    prod = w.ideal() * w.inverse().ideal()
    assert prod == ie.unit(f)


def test_text_roundtrip_and_errors():
    f = fx_b()
    rng = random.Random(0)
    for _ in range(50):
        i = ie.random_ideal(f, rng)
        assert ie.parse_ideal(ie.render_ideal(i), f) == i
    with pytest.raises(ScopeError):
        ie.parse_ideal("Q: >= (0) @1", f)
    with pytest.raises(ie.CompatibilityError):
        ie.parse_ideal("M1: >= (1,0) @2; M2: >= (2,0) @2", f)
