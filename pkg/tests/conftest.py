import random

import pytest

from starforge import ordgroups as og
from starforge.forest import SpectralForest

Z = og.RankOneGroup.integers()
Q = og.RankOneGroup.rationals()
D2 = og.RankOneGroup.nadic(2)
S2 = og.RankOneGroup.quadratic(0, 1, 2)


def fx_a():
    return SpectralForest.from_trees([{"name": "M1", "group": "Q"}, {"name": "M2", "group": "Z"}])


def fx_b():
    return SpectralForest.from_trees([{"name": "P", "group": "Z", "children": [
        {"name": "M1", "group": "Q"}, {"name": "M2", "group": "Z"}]}])


def fx_c():
    return SpectralForest.chain(["P", "M"], ["Z", "Q"])


def fx_d():
    return SpectralForest.from_trees([{"name": "P", "group": "Z", "children": [
        {"name": "M1", "group": "Z"}, {"name": "M2", "group": "Z"}]}])


def chain_z():
    return SpectralForest.chain(["M"], ["Z"])


FIXTURES = {"fx-a": fx_a, "fx-b": fx_b, "fx-c": fx_c, "fx-d": fx_d}


@pytest.fixture(params=sorted(FIXTURES))
def any_forest(request):
    return FIXTURES[request.param]()


def random_cut(space: og.LexGroup, rng: random.Random, bound: int = 3, sentinels: bool = False):
    if sentinels and rng.random() < 0.1:
        return og.full(space) if rng.random() < 0.5 else og.zero(space)
    level = rng.randint(1, len(space))
    pivot = [g.random_element(rng, bound) for g in space.factors]
    return og.make_cut(space, level, pivot, rng.random() < 0.5)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
