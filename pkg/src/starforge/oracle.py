"""Independent checks: brute-force grid models, probe equivalence, and the crossed witness.

The grid model never calls the cut algebra.  An element x of K is a tuple
of integers, one per prime of the forest (its value at a maximal ideal M is
the sub-tuple along the path to M), and an ideal is the set of grid points
allowed by every leaf cut's set denotation.  Localizations are projections,
intersections are pointwise, and colons and products are found by brute
force in each valuation ring (both commute with localization).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from . import ideals as ie
from . import ordgroups as og
from .forest import SpectralForest, is_h_local, standard_decomposition
from .ideals import IdealFamily
from .star import divisorial, crossed_pair

LAWS = ("flatness.finite-intersection", "tcolon.branch", "icapr.product", "integintersect.survival")
MAX_CELLS = 2_000_000


class NotDiscrete(ValueError):
    pass


def _denote(cut: og.Cut, coords: list) -> np.ndarray:
    """Boolean membership of the points with the given per-component coordinates."""
    if cut.level == 0:
        shape = np.broadcast_shapes(*(np.shape(c) for c in coords))
        return np.full(shape, cut.closed)
    res = np.asarray(cut.closed)
    for k in reversed(range(cut.level)):
        g = int(cut.pivot[k])
        res = (coords[k] > g) | ((coords[k] == g) & res)
    return res


def _points(radius: int, dim: int) -> np.ndarray:
    axis = np.arange(-radius, radius + 1)
    return np.array(list(product(axis, repeat=dim)), dtype=np.int64).reshape(-1, dim)


class GridModel:
    """Ideals of an all-Z forest as explicit sets of grid points with coordinates in [-K, K]."""

    def __init__(self, forest: SpectralForest, bound: int = 3):
        bad = [n for n in forest.nodes if forest.group(n).is_dense]
        if bad:
            raise NotDiscrete(f"grid models need Z edges; dense edges at {bad}")
        if not 1 <= bound <= 4:
            raise ValueError("box bound must lie in 1..4")
        self.forest = forest
        self.bound = bound
        self.radius = 2 * bound + 1          # results of the four operations stay inside
        self.witness_radius = 3 * bound + 2  # enough room for failing witnesses in colons
        self.axis = {n: i for i, n in enumerate(forest.nodes)}
        self.side = 2 * self.radius + 1
        if self.side ** len(forest.nodes) > MAX_CELLS:
            raise ValueError("grid too large; lower the box bound")
        self.shape = (self.side,) * len(forest.nodes)
        self._masks: dict = {}
        self._local: dict = {}
        self._residual: dict = {}
        self._product: dict = {}

    # sets ------------------------------------------------------------------

    def _axes_coords(self, path) -> list:
        out = []
        vals = np.arange(-self.radius, self.radius + 1)
        for node in path:
            shape = [1] * len(self.shape)
            shape[self.axis[node]] = self.side
            out.append(vals.reshape(shape))
        return out

    def leaf_mask(self, cut: og.Cut, leaf: str) -> np.ndarray:
        key = (cut, leaf)
        if key not in self._masks:
            self._masks[key] = _denote(cut, self._axes_coords(self.forest.path(leaf)))
        return self._masks[key]

    def local_mask(self, cut: og.Cut) -> np.ndarray:
        """Membership over [-K, K]^depth for a cut of a prefix group."""
        if cut not in self._local:
            n = len(cut.space)
            vals = np.arange(-self.radius, self.radius + 1)
            coords = [vals.reshape([self.side if j == k else 1 for j in range(n)]) for k in range(n)]
            self._local[cut] = np.broadcast_to(_denote(cut, coords), (self.side,) * n)
        return self._local[cut]

    def element_set(self, a: IdealFamily) -> np.ndarray:
        out = np.ones(self.shape, dtype=bool)
        for m, c in a.cuts.items():
            out &= self.leaf_mask(c, m)
        return out

    def from_leaf_sets(self, sets: dict, batch: bool = False) -> np.ndarray:
        """Points whose value at each leaf M lies in the grid set ``sets[M]``.

        With ``batch`` every set carries a leading axis and so does the result.
        """
        lead = ()
        if batch:
            lead = (len(next(iter(sets.values()))),)
        out = np.ones(lead + self.shape, dtype=bool)
        for m, s in sets.items():
            shape = [1] * len(self.shape)
            for node in self.forest.path(m):
                shape[self.axis[node]] = self.side
            out &= s.reshape(lead + tuple(shape))
        return out

    def localize(self, e: np.ndarray, p: str, batch: bool = False) -> np.ndarray:
        """Value set of the localization at p: project onto the coordinates of p's path."""
        keep = {self.axis[n] for n in self.forest.path(p)}
        off = 1 if batch else 0
        drop = tuple(k + off for k in range(len(self.shape)) if k not in keep)
        return e.any(axis=drop) if drop else e

    # brute-force algebra in one valuation ring --------------------------------

    def residual(self, a: og.Cut, b: og.Cut) -> np.ndarray:
        """{x : x + S_b inside S_a} on the leaf grid."""
        key = (a, b)
        if key not in self._residual:
            n = len(a.space)
            xs = _points(self.radius, n)
            bs = _points(self.witness_radius, n)
            bs = bs[_denote(b, list(bs.T))]
            ok = np.ones(len(xs), dtype=bool)
            for chunk in range(0, len(xs), 256):
                sums = xs[chunk:chunk + 256, None, :] + bs[None, :, :]
                ok[chunk:chunk + 256] = _denote(a, [sums[..., k] for k in range(n)]).all(axis=1)
            self._residual[key] = ok.reshape((self.side,) * n)
        return self._residual[key]

    def minkowski(self, a: og.Cut, b: og.Cut) -> np.ndarray:
        """S_a + S_b on the leaf grid."""
        key = (a, b)
        if key not in self._product:
            n = len(a.space)
            xs = _points(self.radius, n)
            as_ = _points(self.witness_radius, n)
            as_ = as_[_denote(a, list(as_.T))]
            ok = np.zeros(len(xs), dtype=bool)
            for chunk in range(0, len(xs), 256):
                diff = xs[chunk:chunk + 256, None, :] - as_[None, :, :]
                ok[chunk:chunk + 256] = _denote(b, [diff[..., k] for k in range(n)]).any(axis=1)
            self._product[key] = ok.reshape((self.side,) * n)
        return self._product[key]

    def colon(self, a: IdealFamily, b: IdealFamily) -> np.ndarray:
        return self.from_leaf_sets({m: self.residual(a.cuts[m], b.cuts[m]) for m in a.forest.leaves})

    def product(self, a: IdealFamily, b: IdealFamily) -> np.ndarray:
        return self.from_leaf_sets({m: self.minkowski(a.cuts[m], b.cuts[m]) for m in a.forest.leaves})

    # enumeration -------------------------------------------------------------

    def canonical_ideals(self, integral: bool = False) -> list[IdealFamily]:
        """Every canonical nonzero fractional ideal with pivots in [-B, B], smallest pivots first."""
        f = self.forest
        per_leaf = {}
        vals = range(-self.bound, self.bound + 1)
        for m in f.leaves:
            space = f.lex_group(m)
            cuts = []
            for level in range(1, len(space) + 1):
                for head in product(vals, repeat=level):
                    cuts.append(og.make_cut(space, level, head, True))
            per_leaf[m] = cuts
        out = []

        def walk(k, chosen):
            if k == len(f.leaves):
                out.append(IdealFamily(f, dict(chosen), check=False))
                return
            m = f.leaves[k]
            for c in per_leaf[m]:
                if all(og.project(c, d) == og.project(chosen[n], d)
                       for n in chosen if (d := f.meet_depth(n, m))):
                    chosen[m] = c
                    walk(k + 1, chosen)
                    del chosen[m]

        walk(0, {})
        if integral:
            one = ie.unit(f)
            out = [i for i in out if i <= one]
        return sorted(out, key=_size_key)


def _size_key(a: IdealFamily):
    return (sum(abs(int(x)) for c in a.cuts.values() for x in c.head), str(a))


@dataclass
class LawResult:
    law: str
    passed: bool
    cases: int
    counterexample: tuple | None = None
    evidence: str = "exhaustive"
    anchor: str = ""

    def to_dict(self) -> dict:
        return {"law": self.law, "passed": self.passed, "cases": self.cases,
                "counterexample": list(self.counterexample) if self.counterexample else None,
                "evidence": self.evidence, "anchor": self.anchor}


ANCHORS = {
    "flatness.finite-intersection": "(I_1∩…∩I_n)T = I_1T∩…∩I_nT",
    "tcolon.branch": "(I:J)T = (IT:JT) for T in the standard decomposition",
    "icapr.product": "(I∩R)(J∩R) = IJ∩R and I∩R finitely generated",
    "integintersect.survival": "(∩ I_k)T ≠ T implies some I_k T ≠ T",
}


def _overrings(forest: SpectralForest) -> list[SpectralForest]:
    out = [b.forest for b in standard_decomposition(forest)]
    for p in forest.nodes:
        t = forest.overring([p])
        if t not in out:
            out.append(t)
    return out


def exhaustive_law_check(forest: SpectralForest, bound: int = 3, law: str = LAWS[0]) -> LawResult:
    """Check one law on every pair of canonical ideals with pivots in the box."""
    if law not in LAWS:
        raise ValueError(f"unknown law id {law!r}; known: {', '.join(LAWS)}")
    model = GridModel(forest, bound)
    check = {"flatness.finite-intersection": _law_flatness, "tcolon.branch": _law_tcolon,
             "icapr.product": _law_icapr, "integintersect.survival": _law_survival}[law]
    cases, bad = check(model)
    return LawResult(law, bad is None, cases, bad, "exhaustive", ANCHORS[law])


def _distinct(cuts) -> tuple[list, np.ndarray]:
    """Distinct cuts in first-seen order, and the index of each input among them."""
    pos: dict = {}
    idx = np.fromiter((pos.setdefault(c, len(pos)) for c in cuts), dtype=np.intp)
    return list(pos), idx


def _engine_stack(model: GridModel, cuts) -> np.ndarray:
    uniq, idx = _distinct(cuts)
    return np.stack([model.local_mask(c) for c in uniq])[idx]


def _rest(arr: np.ndarray) -> tuple:
    return tuple(range(1, arr.ndim))


def _law_flatness(model: GridModel):
    f = model.forest
    ideals = model.canonical_ideals()
    sets = np.stack([model.element_set(i) for i in ideals])
    # every overring here is an intersection of localizations at its centers
    centers = sorted({c for t in _overrings(f) for c in t.leaves}, key=f.nodes.index)
    loc = {c: model.localize(sets, c, batch=True) for c in centers}
    cases = 0
    for x, i in enumerate(ideals):
        both = sets & sets[x]
        meets = [i & j for j in ideals]
        for c in centers:
            lhs = model.localize(both, c, batch=True)
            rhs = loc[c] & loc[c][x]
            eng = _engine_stack(model, [ie.localize(m, c) for m in meets])
            good = (lhs == rhs).all(axis=_rest(lhs)) & (lhs == eng).all(axis=_rest(lhs))
            cases += len(ideals)
            if not good.all():
                y = int(np.argmin(good))
                return cases, (f"I = {i}", f"J = {ideals[y]}", f"localized at {c}")
    return cases, None


def _law_tcolon(model: GridModel):
    f = model.forest
    ideals = model.canonical_ideals()
    cases = 0
    for b in standard_decomposition(f):
        sub = GridModel(b.forest, model.bound) if b.forest != f else model
        whole = b.forest == f
        local = ideals if whole else [ie.restrict(i, b.forest) for i in ideals]
        columns = {m: _distinct([lj.cuts[m] for lj in local]) for m in b.forest.leaves}
        for x, i in enumerate(ideals):
            engine = []
            for j in ideals:
                eng = ie.colon(i, j)
                if eng is ie.ZERO:
                    return cases, (f"I = {i}", f"J = {j}", "zero colon")
                engine.append(eng if whole else ie.restrict(eng, b.forest))
            ext = sub.from_leaf_sets({m: np.stack([sub.residual(local[x].cuts[m], c)
                                                   for c in uniq])[idx]
                                      for m, (uniq, idx) in columns.items()}, batch=True)
            cases += len(ideals)
            for c in b.forest.leaves:
                got = sub.localize(ext, c, batch=True)
                want = _engine_stack(sub, [e.cuts[c] for e in engine])
                good = (got == want).all(axis=_rest(got))
                if not good.all():
                    y = int(np.argmin(good))
                    return cases, (f"I = {i}", f"J = {ideals[y]}", f"at {c}")
    return cases, None


def _is_principal_in_box(mask: np.ndarray) -> bool:
    """An upward-closed grid set is principal when its least point lies inside the box."""
    flat = np.flatnonzero(mask.reshape(-1))
    if not len(flat):
        return False
    first = np.unravel_index(flat[0], mask.shape)
    side = mask.shape[0]
    return all(0 < k < side - 1 for k in first)


def _law_icapr(model: GridModel):
    f = model.forest
    r_set = model.element_set(ie.unit(f))
    cases = 0
    for b in standard_decomposition(f):
        sub = GridModel(b.forest, model.bound) if b.forest != f else model
        ideals = sub.canonical_ideals(integral=True)
        contracted = [ie.contract(i, f) for i in ideals]
        for x, i in enumerate(ideals):
            c_i = contracted[x]
            if i.is_principal:
                e = model.element_set(c_i)
                if not all(_is_principal_in_box(model.localize(e, m)) for m in f.leaves):
                    return cases, (f"I = {i}", "I∩R not principal within the box")
                if not c_i.is_principal:
                    return cases, (f"I = {i}", "engine: I∩R not principal")
            lhs = model.from_leaf_sets({m: np.stack([model.minkowski(c_i.cuts[m], c_j.cuts[m])
                                                     for c_j in contracted]) for m in f.leaves},
                                       batch=True)
            prod_t = sub.from_leaf_sets({m: np.stack([sub.minkowski(i.cuts[m], j.cuts[m])
                                                      for j in ideals]) for m in b.forest.leaves},
                                        batch=True)
            # contraction of IJ: no condition outside T, then meet R
            rhs = model.from_leaf_sets({m: sub.localize(prod_t, m, batch=True)
                                        for m in b.forest.leaves}, batch=True) & r_set
            engine = []
            for y, j in enumerate(ideals):
                eng = ie.contract(i * j, f)
                if eng != c_i * contracted[y]:
                    return cases, (f"I = {i}", f"J = {j}", "engine: (I∩R)(J∩R) ≠ IJ∩R")
                engine.append(eng)
            cases += len(ideals)
            for m in f.leaves:
                l_m = model.localize(lhs, m, batch=True)
                good = (l_m == model.localize(rhs, m, batch=True)).all(axis=_rest(l_m))
                good &= (l_m == _engine_stack(model, [e.cuts[m] for e in engine])).all(axis=_rest(l_m))
                if not good.all():
                    y = int(np.argmin(good))
                    return cases, (f"I = {i}", f"J = {ideals[y]}", f"at {m}")
    return cases, None


def _law_survival(model: GridModel):
    f = model.forest
    ideals = model.canonical_ideals(integral=True)
    sets = np.stack([model.element_set(i) for i in ideals])
    r_set = model.element_set(ie.unit(f))
    cases = 0
    for t in _overrings(f):
        unit_t = ie.unit(t)

        def survives(batch_sets):
            out = np.zeros(batch_sets.shape[0], dtype=bool)
            for c in t.leaves:
                loc = model.localize(batch_sets, c, batch=True)
                ref = model.localize(r_set, c)
                out |= (loc != ref).any(axis=_rest(loc))
            return out

        alone = survives(sets)
        eng_alone = np.array([ie.restrict(i, t) != unit_t for i in ideals])
        if not np.array_equal(alone, eng_alone):
            k = int(np.argmax(alone != eng_alone))
            return cases, (f"I = {ideals[k]}", f"survival in {t.describe()} disagrees")
        for x, i in enumerate(ideals):
            both = survives(sets & sets[x])
            cases += len(ideals)
            bad = both & ~(alone | alone[x])
            if bad.any():
                y = int(np.argmax(bad))
                return cases, (f"I = {i}", f"J = {ideals[y]}", f"T = {t.describe()}")
    return cases, None


# witnesses and equality --------------------------------------------------------


@dataclass
class Obligation:
    claim: str
    lhs: IdealFamily
    rhs: IdealFamily
    holds: bool
    probe: tuple | None = None

    def to_dict(self) -> dict:
        return {"claim": self.claim, "lhs": str(self.lhs), "rhs": str(self.rhs), "holds": self.holds}


@dataclass
class IntersezWitness:
    first: IdealFamily
    second: IdealFamily
    obligations: list = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return all(o.holds for o in self.obligations)

    def to_dict(self) -> dict:
        return {"I1": str(self.first), "I2": str(self.second), "verified": self.verified,
                "obligations": [o.to_dict() for o in self.obligations]}


def witness_intersez(forest: SpectralForest) -> IntersezWitness:
    """Two ideals on which the v-operation fails to distribute over intersection."""
    if is_h_local(forest):
        raise ValueError("h-local forest: v distributes over finite intersections, no witness exists")
    i1, i2 = crossed_pair(forest)
    core = _core_of_pair(forest, i1)
    t_q = ie.module_at(forest, core)
    one = ie.unit(forest)
    v1, v2, v12 = divisorial(i1), divisorial(i2), divisorial(i1 & i2)
    out = IntersezWitness(i1, i2)
    for claim, lhs, rhs in ((f"I1^v = R_{core}", v1, t_q), (f"I2^v = R_{core}", v2, t_q),
                            ("(I1∩I2)^v = R", v12, one),
                            ("I1^v ∩ I2^v ≠ (I1∩I2)^v", v1 & v2, v12)):
        eq = membership_equivalence(lhs, rhs)
        holds = (not eq.equal) if "≠" in claim else eq.equal
        out.obligations.append(Obligation(claim, lhs, rhs, holds, eq.probe))
    return out


def _core_of_pair(forest: SpectralForest, i1: IdealFamily) -> str:
    for m, c in i1.cuts.items():
        if c.level < len(c.space):
            return forest.path(m)[c.level - 1]
    raise AssertionError("crossed pair has no R_Q component")


@dataclass(frozen=True)
class Equivalence:
    equal: bool
    leaf: str | None = None
    probe: tuple | None = None


def membership_equivalence(a: IdealFamily, b: IdealFamily) -> Equivalence:
    """Decide equality by probing memberships; a difference comes with a separating probe."""
    if a.forest != b.forest:
        raise ValueError("ideals live over different forests")
    for m in a.forest.leaves:
        ca, cb = a.cuts[m], b.cuts[m]
        for x in _probe_set(ca, cb):
            if og.cut_member(ca, x) != og.cut_member(cb, x):
                return Equivalence(False, m, x)
    return Equivalence(True)


@lru_cache(maxsize=50_000)
def _probe_set(a: og.Cut, b: og.Cut) -> tuple:
    seen, out = set(), []
    for x in og.probes(a) + og.probes(b):
        if x not in seen:
            seen.add(x)
            out.append(x)
    return tuple(out)
