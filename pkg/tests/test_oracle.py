import random

import pytest

from starforge import ideals as ie
from starforge import oracle

from conftest import fx_a, fx_b, fx_c, fx_d


def test_grid_element_sets_match_membership():
    f = fx_d()
    model = oracle.GridModel(f, 2)
    rng = random.Random(0)
    i = ie.random_ideal(f, rng, 2)
    mask = model.element_set(i)
    assert mask.any() and not mask.all()


def test_canonical_ideals_are_distinct():
    model = oracle.GridModel(fx_d(), 2)
    ideals = model.canonical_ideals()
    assert len(set(ideals)) == len(ideals) > 0
    assert all(i.is_integral for i in model.canonical_ideals(integral=True))


@pytest.mark.parametrize("law", oracle.LAWS)
def test_laws_on_small_box(law):
    res = oracle.exhaustive_law_check(fx_d(), 1, law)
    assert res.passed and res.cases > 0 and res.counterexample is None


def test_tcolon_on_fx_d_box_two():
    assert oracle.exhaustive_law_check(fx_d(), 2, "tcolon.branch").passed


def test_unknown_law():
    with pytest.raises(ValueError):
        oracle.exhaustive_law_check(fx_d(), 1, "nope")


@pytest.mark.parametrize("forest", [fx_b(), fx_d()], ids=["fx-b", "fx-d"])
def test_intersez_witness(forest):
    w = oracle.witness_intersez(forest)
    assert w.verified and len(w.obligations) == 4
    assert w.to_dict()["verified"] is True


def test_intersez_refused_on_h_local():
    with pytest.raises(ValueError):
        oracle.witness_intersez(fx_a())


def test_membership_equivalence_basics():
    c = fx_c()
    m, one = ie.maximal_ideal(c, "M"), ie.unit(c)
    assert oracle.membership_equivalence(one, one).equal
    eq = oracle.membership_equivalence(m, one)
    assert not eq.equal and eq.leaf == "M" and all(x == 0 for x in eq.probe)


@pytest.mark.parametrize("forest", [fx_a(), fx_b(), fx_c(), fx_d()], ids=["a", "b", "c", "d"])
def test_membership_equivalence_agrees_with_canonical_equality(forest):
    rng = random.Random(11)
    pool = [ie.random_ideal(forest, rng, 1) for _ in range(60)]
    for _ in range(1000):
        x, y = rng.choice(pool), rng.choice(pool)
        assert oracle.membership_equivalence(x, y).equal == (x == y)
