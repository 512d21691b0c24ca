"""Nonzero R-submodules of K as compatible families of per-leaf cuts.

The module I is stored through its localizations I*R_M at the maximal
ideals.  Localizations at smaller primes are prefix projections, and
compatibility means two leaves agree on every prime they share.
"""
from __future__ import annotations

import random
import re
from typing import Iterable, Mapping

from . import ordgroups as og
from .forest import ScopeError, SpectralForest
from .ordgroups import Cut


class CompatibilityError(ValueError):
    """Leaf cuts disagree on a shared prime."""


class NotFractional(ValueError):
    pass


class _ZeroModule:
    """The zero module; produced by colons such as (R : K)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ZERO"

    def __str__(self):
        return "0"

    def __bool__(self):
        return False


ZERO = _ZeroModule()


def _check_compatible(forest: SpectralForest, cuts: Mapping[str, Cut]):
    leaves = forest.leaves
    for i, m in enumerate(leaves):
        for n in leaves[i + 1:]:
            d = forest.meet_depth(m, n)
            if d and og.project(cuts[m], d) != og.project(cuts[n], d):
                raise CompatibilityError(
                    f"{m} and {n} disagree at {forest.meet(m, n)}: "
                    f"{og.project(cuts[m], d)} vs {og.project(cuts[n], d)}")


class IdealFamily:
    __slots__ = ("forest", "cuts", "_hash")

    def __init__(self, forest: SpectralForest, cuts: Mapping[str, Cut], check: bool = True):
        self.forest = forest
        if check:
            if set(cuts) != set(forest.leaves):
                raise ScopeError(f"cuts given for {sorted(cuts)}, leaves are {list(forest.leaves)}")
            for m in forest.leaves:
                c = cuts[m]
                if c.space != forest.lex_group(m):
                    raise og.DimensionError(f"cut at {m} lives in {c.space.name}")
                if c.is_zero:
                    raise ValueError(f"zero cut at {m}: families denote nonzero modules")
            _check_compatible(forest, cuts)
        self.cuts = {m: cuts[m] for m in forest.leaves}
        self._hash = None

    def __eq__(self, other):
        return (isinstance(other, IdealFamily) and self.forest == other.forest
                and self.cuts == other.cuts)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.forest, tuple(self.cuts.values())))
        return self._hash

    def __repr__(self):
        return f"IdealFamily({render_ideal(self)})"

    def __str__(self):
        return render_ideal(self)

    def __getitem__(self, leaf: str) -> Cut:
        return self.cuts[leaf]

    def __and__(self, other: "IdealFamily") -> "IdealFamily":
        return ideal_op(self, other, "intersect")

    def __add__(self, other: "IdealFamily") -> "IdealFamily":
        return ideal_op(self, other, "sum")

    def __mul__(self, other: "IdealFamily") -> "IdealFamily":
        return ideal_op(self, other, "product")

    def __le__(self, other: "IdealFamily") -> bool:
        _same_domain(self, other)
        return all(og.cut_subset(self.cuts[m], other.cuts[m]) for m in self.forest.leaves)

    def __ge__(self, other: "IdealFamily") -> bool:
        return other <= self

    def __lt__(self, other):
        return self <= other and self != other

    def __gt__(self, other):
        return other < self

    @property
    def is_principal(self) -> bool:
        return all(c.closed and c.level == len(c.space) for c in self.cuts.values())

    @property
    def is_integral(self) -> bool:
        return self <= unit(self.forest)

    def shifted(self, values: Mapping[str, tuple]) -> "IdealFamily":
        """Multiply by the element with the given per-leaf values."""
        return IdealFamily(self.forest, {m: og.shift(c, values[m]) for m, c in self.cuts.items()},
                           check=False)


class PrincipalWitness:
    """A nonzero element of K given by its values at the maximal ideals."""

    __slots__ = ("forest", "values")

    def __init__(self, forest: SpectralForest, values: Mapping[str, Iterable]):
        self.forest = forest
        vals = {}
        for m in forest.leaves:
            vals[m] = forest.lex_group(m).check(tuple(values[m]))
        for i, m in enumerate(forest.leaves):
            for n in forest.leaves[i + 1:]:
                d = forest.meet_depth(m, n)
                if og.lex_cmp(vals[m][:d], vals[n][:d]) != 0:
                    raise CompatibilityError(f"values at {m} and {n} differ below {forest.meet(m, n)}")
        self.values = vals

    @classmethod
    def one(cls, forest: SpectralForest) -> "PrincipalWitness":
        return cls(forest, {m: forest.lex_group(m).zero() for m in forest.leaves})

    @classmethod
    def extend(cls, forest: SpectralForest, partial: Mapping[str, tuple]) -> "PrincipalWitness":
        """Complete values prescribed at some primes to every maximal ideal.

        A leaf takes the prefix of the prescribed value sharing its deepest
        prime, padded with zeros.
        """
        vals = {}
        for m in forest.leaves:
            best, depth = None, 0
            for s, v in partial.items():
                d = forest.meet_depth(s, m)
                if d > depth:
                    best, depth = v, d
            n = forest.depth(m)
            vals[m] = (tuple(best[:depth]) if best is not None else ()) + (0,) * (n - depth)
        return cls(forest, vals)

    def ideal(self) -> IdealFamily:
        return IdealFamily(self.forest, {
            m: og.make_cut(self.forest.lex_group(m), self.forest.depth(m), v, True)
            for m, v in self.values.items()}, check=False)

    def inverse(self) -> "PrincipalWitness":
        return PrincipalWitness(self.forest, {m: og.vneg(v) for m, v in self.values.items()})

    def __mul__(self, other: "PrincipalWitness") -> "PrincipalWitness":
        return PrincipalWitness(self.forest, {m: og.vadd(v, other.values[m])
                                              for m, v in self.values.items()})

    def __eq__(self, other):
        return isinstance(other, PrincipalWitness) and self.values == other.values

    def __repr__(self):
        inner = "; ".join(f"{m}: ({','.join(og.render_scalar(x) for x in v)})"
                          for m, v in self.values.items())
        return f"PrincipalWitness({inner})"


def _same_domain(a: IdealFamily, b: IdealFamily):
    if a.forest != b.forest:
        raise ScopeError("ideals live over different forests")


def unit(forest: SpectralForest) -> IdealFamily:
    """R itself."""
    return IdealFamily(forest, {m: og.unit_cut(forest.lex_group(m)) for m in forest.leaves},
                       check=False)


def quotient_field(forest: SpectralForest) -> IdealFamily:
    return IdealFamily(forest, {m: og.full(forest.lex_group(m)) for m in forest.leaves},
                       check=False)


def transfer(forest: SpectralForest, sources: Mapping[str, Cut]) -> dict[str, Cut]:
    """Leaf cuts of the intersection of modules X_s, each given as a cut over R_s.

    (X_s) R_M = X_s R_Q with Q the largest prime under both s and M, and K
    when there is none; finite intersections commute with localization.
    """
    out = {}
    for m in forest.leaves:
        space = forest.lex_group(m)
        acc = og.full(space)
        for s, c in sources.items():
            if s == m:
                acc = og.meet_set(acc, c)
                continue
            d = forest.meet_depth(s, m)
            if d == 0:
                continue
            acc = og.meet_set(acc, og.lift(og.project(c, d), space))
        out[m] = acc
    return out


def _wrap(forest: SpectralForest, cuts: Mapping[str, Cut]):
    if any(c.is_zero for c in cuts.values()):
        return ZERO
    return IdealFamily(forest, cuts)


def ideal_op(a: IdealFamily, b: IdealFamily, which: str) -> IdealFamily:
    _same_domain(a, b)
    op = {"sum": og.join_set, "intersect": og.meet_set, "product": og.sum_set}.get(which)
    if op is None:
        raise ValueError(f"unknown ideal operation {which!r}")
    cuts = {m: op(a.cuts[m], b.cuts[m]) for m in a.forest.leaves}
    try:
        return IdealFamily(a.forest, cuts)
    except CompatibilityError as exc:
        raise AssertionError(f"{which} broke compatibility: {exc}") from exc


def colon(a: IdealFamily, b) -> IdealFamily | _ZeroModule:
    """(a : b) = {x in K : x b inside a}; returns :data:`ZERO` for the zero module."""
    if b is ZERO:
        return quotient_field(a.forest)
    _same_domain(a, b)
    residuals = {m: og.colon_set(a.cuts[m], b.cuts[m]) for m in a.forest.leaves}
    if any(r.is_zero for r in residuals.values()):
        return ZERO
    return _wrap(a.forest, transfer(a.forest, residuals))


def localize(a: IdealFamily, p: str) -> Cut:
    """I R_P as a cut of the value group of R_P."""
    f = a.forest
    f.require(p)
    m = f.leaves_above(p)[0]
    return og.project(a.cuts[m], f.depth(p))


def module_at(forest: SpectralForest, p: str, cut: Cut | None = None) -> IdealFamily:
    """The R-module X R_P for a cut X of R_P's value group (default: R_P itself)."""
    cut = cut if cut is not None else og.unit_cut(forest.lex_group(p))
    return _wrap(forest, transfer(forest, {p: cut}))


def maximal_ideal(forest: SpectralForest, m: str) -> IdealFamily:
    forest.require(m)
    if not forest.is_leaf(m):
        raise ScopeError(f"{m!r} is not maximal")
    return prime_ideal(forest, m)


def prime_ideal(forest: SpectralForest, p: str) -> IdealFamily:
    """P as an ideal of R: P R_M = P R_P for M above P, and R_M elsewhere."""
    d = forest.depth(p)
    cuts = {}
    for m in forest.leaves:
        space = forest.lex_group(m)
        if forest.is_below(p, m):
            cuts[m] = og.make_cut(space, d, None, False)
        else:
            cuts[m] = og.unit_cut(space)
    return IdealFamily(forest, cuts)


def restrict(a: IdealFamily, target: SpectralForest) -> IdealFamily:
    """I T for the overring T presented by ``target`` (a subforest with primes as leaves)."""
    if not target.is_subforest_of(a.forest):
        raise ScopeError("target is not an overring presentation of this forest")
    return IdealFamily(target, {c: localize(a, c) for c in target.leaves}, check=False)


def contract(j: IdealFamily, forest: SpectralForest) -> IdealFamily:
    """Branch ideal J of T pulled back to R, with R_M at the maximal ideals outside T."""
    sub = j.forest
    if not sub.is_subforest_of(forest) or not all(forest.is_leaf(c) for c in sub.leaves):
        raise ScopeError("contract needs an ideal over a branch of the forest")
    roots = set(sub.roots)
    if set(sub.leaves) != {m for m in forest.leaves if forest.root_of(m) in roots}:
        raise ScopeError("contract needs whole branches")
    cuts = {m: j.cuts[m] if m in j.cuts else og.unit_cut(forest.lex_group(m))
            for m in forest.leaves}
    return IdealFamily(forest, cuts, check=False)


def glue(forest: SpectralForest, parts: Iterable[IdealFamily]) -> IdealFamily:
    """The intersection of the modules J_T over branches T partitioning the maximal ideals."""
    cuts = {}
    for j in parts:
        cuts.update(j.cuts)
    return IdealFamily(forest, cuts)


def lift(j: IdealFamily, forest: SpectralForest) -> IdealFamily:
    """A fractional ideal I of R with I T = J, for any overring presentation T.

    I = d^-1 (dJ intersect R) where d clears the denominators of J.
    """
    sub = j.forest
    if not sub.is_subforest_of(forest):
        raise ScopeError("not an overring presentation of this forest")
    ok, d = is_fractional(j)
    if not ok:
        raise NotFractional(f"{j} is not fractional over its overring")
    integral = j.shifted(d.values)
    one = unit(forest)
    cuts = transfer(forest, integral.cuts)
    cuts = {m: og.meet_set(c, one.cuts[m]) for m, c in cuts.items()}
    d_r = PrincipalWitness.extend(forest, d.values)
    return IdealFamily(forest, cuts).shifted(d_r.inverse().values)


def is_fractional(a: IdealFamily) -> tuple[bool, PrincipalWitness | None]:
    """Whether some nonzero d of R has d a inside R; returns such a d."""
    f = a.forest
    if any(c.is_full for c in a.cuts.values()):
        return False, None
    if a.is_integral:
        return True, PrincipalWitness.one(f)
    # a positive first component at every leaf pushes any cut into R_M
    vals = {}
    for root in f.roots:
        leaves = f.leaves_above(root)
        worst = max((-a.cuts[m].pivot[0] for m in leaves), key=og.floor_scalar)
        c = og.floor_scalar(worst) + 1
        if og.sign(c) <= 0:
            c = 1
        for m in leaves:
            vals[m] = (c,) + (0,) * (f.depth(m) - 1)
    d = PrincipalWitness(f, vals)
    assert a.shifted(d.values).is_integral
    return True, d


# sampling --------------------------------------------------------------


def random_witness(forest: SpectralForest, rng: random.Random, bound: int = 3) -> PrincipalWitness:
    draws = {n: forest.group(n).random_element(rng, bound) for n in forest.nodes}
    return PrincipalWitness(forest, {m: tuple(draws[n] for n in forest.path(m))
                                     for m in forest.leaves})


def random_ideal(forest: SpectralForest, rng: random.Random, bound: int = 3) -> IdealFamily:
    """Random nonzero fractional ideal.

    Leaf cuts are drawn independently (uniform level and closedness) and then
    made compatible by overwriting each prefix from the earlier leaf sharing
    the deepest prime.
    """
    cuts: dict[str, Cut] = {}
    for m in forest.leaves:
        space = forest.lex_group(m)
        n = len(space)
        level = rng.randint(1, n)
        closed = rng.random() < 0.5
        pivot = [g.random_element(rng, bound) for g in space.factors]
        anchor, d = None, 0
        for prev in cuts:
            k = forest.meet_depth(prev, m)
            if k > d:
                anchor, d = prev, k
        if anchor is not None:
            lower = og.project(cuts[anchor], d)
            if lower.level < d or not lower.closed:
                cuts[m] = og.lift(lower, space)
                continue
            pivot[:d] = lower.pivot
            if level <= d:
                level, closed = d, True
        cuts[m] = og.make_cut(space, level, pivot, closed)
    return IdealFamily(forest, cuts)


def random_integral_ideal(forest: SpectralForest, rng: random.Random, bound: int = 3) -> IdealFamily:
    i = random_ideal(forest, rng, bound)
    return i & unit(forest)


# text format -----------------------------------------------------------


def render_ideal(a: IdealFamily) -> str:
    if a == unit(a.forest):
        return "R"
    return "; ".join(f"{m}: {og.render_cut(c)}" for m, c in a.cuts.items())


_ENTRY = re.compile(r"\s*([^:;]+?)\s*:\s*([^;]+)")


def parse_ideal(text: str, forest: SpectralForest) -> IdealFamily:
    """Parse ``"M1: >= (0,1) @2; M2: > (0) @1"``; ``R`` alone is the unit ideal.

    Leaves left out default to R_M.
    """
    t = text.strip()
    if t == "R":
        return unit(forest)
    if t == "K":
        return quotient_field(forest)
    cuts = {m: og.unit_cut(forest.lex_group(m)) for m in forest.leaves}
    for part in filter(None, (p.strip() for p in t.split(";"))):
        m = _ENTRY.fullmatch(part)
        if not m:
            raise ValueError(f"cannot parse ideal entry {part!r}")
        leaf = m.group(1)
        if leaf not in forest or not forest.is_leaf(leaf):
            raise ScopeError(f"unknown maximal ideal {leaf!r}")
        cuts[leaf] = og.parse_cut(m.group(2), forest.lex_group(leaf))
    return IdealFamily(forest, cuts)
