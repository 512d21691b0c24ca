import random

import pytest

from starforge import classgroups as cg
from starforge import ideals as ie
from starforge.forest import ScopeError, SpectralForest
from starforge.ordgroups import RankOneGroup
from starforge.star import d, v

from conftest import Q, fx_a, fx_b, fx_c, fx_d


def test_descriptor_rendering():
    assert str(cg.GroupDescriptor.zero()) == "0"
    assert str(cg.GroupDescriptor.r_mod(Q)) == "R/Q"
    assert str(cg.GroupDescriptor.r_mod(RankOneGroup.nadic(2))) == "R/Z[1/2]"
    two = cg.direct_sum([cg.GroupDescriptor.r_mod(Q), cg.GroupDescriptor.r_mod(RankOneGroup.quadratic(0, 1, 2))])
    assert str(two) == "R/Q ⊕ R/(Z+Z*sqrt(2))"
    assert two.is_divisible and not two.is_zero


def test_principal_ideals_are_invertible():
    rng = random.Random(0)
    for f in (fx_a(), fx_b(), fx_c(), fx_d()):
        for s in (d, v):
            x = ie.random_witness(f, rng).ideal()
            ok, cert = cg.is_star_invertible(s, x)
            assert ok and ie.unit(f) == x * cert.inverse


def test_dense_maximal_ideal_invertibility():
    c = fx_c()
    m = ie.maximal_ideal(c, "M")
    assert cg.is_star_invertible(d, m) == (False, None)
    ok, cert = cg.is_star_invertible(v, m)
    assert ok and cert.inverse == ie.unit(c)


def test_non_fractional_is_refused():
    a = fx_a()
    with pytest.raises(ie.NotFractional):
        cg.is_star_invertible(v, ie.quotient_field(a))


def test_clv_of_valuation():
    assert str(cg.clv_of_valuation(fx_c())) == "R/Q"
    assert str(cg.clv_of_valuation(SpectralForest.chain(["P", "M"], ["Z", "Z"]))) == "0"
    assert str(cg.clv_of_valuation(SpectralForest.chain(["P", "M"], ["Q", "Z"]))) == "0"
    with pytest.raises(ScopeError):
        cg.clv_of_valuation(fx_a())


def test_local_class_groups():
    assert str(cg.local_class_group(fx_a(), v)) == "R/Q"
    assert str(cg.local_class_group(fx_b(), v)) == "R/Q"
    assert str(cg.local_class_group(fx_d(), v)) == "0"
    for f in (fx_a(), fx_b(), fx_c(), fx_d()):
        assert str(cg.local_class_group(f, d)) == "0"
        assert cg.picard_group(f).is_zero


def test_localization_surjection():
    a = fx_a()
    whole, image, _ = cg.localization_surjection(a, v, a.leaves)
    assert whole == image
    assert tuple(map(str, cg.localization_surjection(a, v, ["M2"])[:2])) == ("R/Q", "0")
    assert tuple(map(str, cg.localization_surjection(a, v, ["M1"])[:2])) == ("R/Q", "R/Q")
    with pytest.raises(ScopeError):
        cg.localization_surjection(a, v, ["P"])


@pytest.mark.parametrize("forest", [fx_a(), fx_b(), fx_c()], ids=["fx-a", "fx-b", "fx-c"])
def test_invertible_sums_and_gamma(forest):
    assert cg.invertible_sum_check(forest, v, samples=50).ok
    assert cg.gamma_decomposition_check(forest, v, samples=30).ok
