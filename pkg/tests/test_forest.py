import pytest

from starforge.forest import (RANK_ONE_LOCAL, InvalidForest, ScopeError, SpectralForest,
                              branch_core_prime, cut_branch, dependence_classes, is_h_local,
                              resolve_branch, standard_decomposition, validate)
from starforge.ordgroups import RankOneGroup

from conftest import Q, Z, fx_a, fx_b, fx_c, fx_d


def test_fixtures_validate():
    for f in (fx_a(), fx_b(), fx_c(), fx_d()):
        assert validate(dict((n, f.parent(n)) for n in f.nodes),
                        {n: f.group(n) for n in f.nodes}, f.leaves) == []


def test_internal_node_marked_maximal():
    problems = validate({"P": None, "M": "P"}, {"P": Z, "M": Z}, maximal=["P", "M"])
    assert any("internal node marked maximal" in p for p in problems)


def test_orphans_and_cycles_are_reported():
    assert any("orphan" in p for p in validate({"M": "X"}, {"M": Z}))
    assert any("cycle" in p for p in validate({"A": "B", "B": "A"}, {"A": Z, "B": Z}))
    with pytest.raises(InvalidForest):
        SpectralForest({"A": "B", "B": "A"}, {"A": Z, "B": Z})


def test_paths_and_value_groups():
    f = fx_b()
    assert f.path("M1") == ("P", "M1")
    assert f.lex_group("M1").factors == (Z, Q)
    assert f.meet("M1", "M2") == "P" and f.meet_depth("M1", "M2") == 1
    assert fx_a().meet_depth("M1", "M2") == 0


def test_dependence_classes():
    assert sorted(map(sorted, dependence_classes(fx_a()))) == [["M1"], ["M2"]]
    assert dependence_classes(fx_b()) == [frozenset({"M1", "M2"})]
    assert dependence_classes(fx_d()) == [frozenset({"M1", "M2"})]


def test_standard_decomposition():
    a = standard_decomposition(fx_a())
    assert [b.id for b in a] == ["T[M1]", "T[M2]"]
    assert all(len(b.forest.leaves) == 1 for b in a)
    (b,) = standard_decomposition(fx_b())
    assert b.forest == fx_b()
    assert len(standard_decomposition(fx_c())) == 1
    assert resolve_branch(fx_a(), "M2").id == "T[M2]"
    with pytest.raises(ScopeError):
        resolve_branch(fx_a(), "T[P]")


def test_h_local():
    assert is_h_local(fx_a()) and is_h_local(fx_c())
    assert not is_h_local(fx_b()) and not is_h_local(fx_d())


def test_branch_core_prime():
    assert branch_core_prime(fx_b()) == "P"
    assert branch_core_prime(fx_c()) == "P"
    assert branch_core_prime(standard_decomposition(fx_a())[1]) == RANK_ONE_LOCAL


def test_cut_branch():
    cut = cut_branch(fx_b(), "P")
    assert set(cut.roots) == {"M1", "M2"}
    assert cut.group("M1") == Q and cut.group("M2") == Z
    assert cut_branch(fx_c(), "P") == SpectralForest.chain(["M"], ["Q"])
    with pytest.raises(ScopeError):
        cut_branch(fx_b(), "M1")


def test_overrings_and_trees():
    f = fx_b()
    t = f.overring(["P"])
    assert t.leaves == ("P",) and t.is_subforest_of(f)
    assert f.tree("P") == f
    with pytest.raises(ScopeError):
        f.require("Q")


def test_tree_roundtrip():
    for f in (fx_a(), fx_b(), fx_c(), fx_d()):
        assert SpectralForest.from_trees(f.to_trees()) == f


def test_group_strings_accepted():
    f = SpectralForest.chain(["P", "M"], ["Z[1/2]", RankOneGroup.parse("Q")])
    assert f.group("P").name == "Z[1/2]"
