"""Star operations as expression trees evaluated on ideal families."""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from . import ideals as ie
from . import ordgroups as og
from .forest import (ScopeError, SpectralForest, branch_core_prime, branch_id, cut_branch,
                     is_h_local, resolve_branch, standard_decomposition)
from .ideals import IdealFamily


class ModelingError(RuntimeError):
    """Evaluation hit a case the underlying theory rules out (a bug signal)."""


class NotExtendable(ValueError):
    pass


# expressions -------------------------------------------------------------


class StarExpr:
    def __str__(self):
        return render_star(self)


@dataclass(frozen=True)
class Identity(StarExpr):
    pass


@dataclass(frozen=True)
class Divisorial(StarExpr):
    pass


@dataclass(frozen=True)
class Spectral(StarExpr):
    primes: tuple


@dataclass(frozen=True)
class Meet(StarExpr):
    parts: tuple


@dataclass(frozen=True)
class BranchProduct(StarExpr):
    """I -> intersection over branches T of (IT)^{*_T}; ``parts`` maps height-one primes to expressions."""

    parts: tuple

    def part(self, root: str) -> StarExpr:
        return dict(self.parts).get(root, Identity())


@dataclass(frozen=True)
class Localized(StarExpr):
    """I -> intersection over maximal M of (I R_M)^{*_M}, each *_M a star operation on R_M."""

    parts: tuple

    def part(self, leaf: str) -> StarExpr:
        return dict(self.parts).get(leaf, Identity())


@dataclass(frozen=True)
class Transport(StarExpr):
    """The operation on R induced by a star operation on R/Q (Q under every maximal ideal)."""

    core: str
    inner: StarExpr


@dataclass(frozen=True)
class Extended(StarExpr):
    """*_T on the overring T: IT -> I^* T."""

    base: StarExpr
    centers: tuple
    parent: SpectralForest = field(compare=True, repr=False)
    branch: bool = False

    @property
    def domain(self) -> SpectralForest:
        if self.branch:
            return self.parent.tree(self.centers[0])
        return self.parent.overring(self.centers)


d = Identity()
v = Divisorial()


def branch_product(parts: Mapping[str, StarExpr]) -> BranchProduct:
    return BranchProduct(tuple(sorted((_root_name(k), e) for k, e in parts.items())))


def localized(parts: Mapping[str, StarExpr]) -> Localized:
    return Localized(tuple(sorted(parts.items())))


def extend(base: StarExpr, parent: SpectralForest, target: str) -> Extended:
    """Extension to a branch (``T[P]``) or to the localization at a prime."""
    if target.startswith("T[") and target.endswith("]"):
        b = resolve_branch(parent, target)
        return Extended(base, (b.id[2:-1],), parent, True)
    parent.require(target)
    return Extended(base, (target,), parent, False)


def _root_name(key: str) -> str:
    return key[2:-1] if key.startswith("T[") and key.endswith("]") else key


# evaluation ------------------------------------------------------------------

_CACHE: dict = {}
_CACHE_LIMIT = 500_000


def apply(s: StarExpr, a: IdealFamily) -> IdealFamily:
    """The closure a^s."""
    key = (s, a)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    out = _apply(s, a)
    if len(_CACHE) > _CACHE_LIMIT:
        _CACHE.clear()
    _CACHE[key] = out
    return out


def _apply(s: StarExpr, a: IdealFamily) -> IdealFamily:
    f = a.forest
    if isinstance(s, Identity):
        return a
    if isinstance(s, Divisorial):
        return divisorial(a)
    if isinstance(s, Spectral):
        sources = {p: ie.localize(a, f.require(p)) for p in s.primes}
        return IdealFamily(f, ie.transfer(f, sources))
    if isinstance(s, Meet):
        if not s.parts:
            raise ScopeError("empty meet")
        out = apply(s.parts[0], a)
        for part in s.parts[1:]:
            out = out & apply(part, a)
        return out
    if isinstance(s, BranchProduct):
        for k, _ in s.parts:
            if k not in f.roots:
                raise ScopeError(f"unknown branch {branch_id(k)}")
        cuts = {}
        for r in f.roots:
            sub = f.tree(r)
            cuts.update(apply(s.part(r), ie.restrict(a, sub)).cuts)
        return IdealFamily(f, cuts, check=False)
    if isinstance(s, Localized):
        for k, _ in s.parts:
            if k not in f or not f.is_leaf(k):
                raise ScopeError(f"unknown maximal ideal {k!r}")
        sources = {}
        for m in f.leaves:
            chain = f.overring([m])
            sources[m] = apply(s.part(m), ie.restrict(a, chain)).cuts[m]
        return IdealFamily(f, ie.transfer(f, sources))
    if isinstance(s, Transport):
        return _transport(s, a)
    if isinstance(s, Extended):
        if a.forest != s.domain:
            raise ScopeError("ideal does not live over the extension's overring")
        if s.branch:
            pre = ie.contract(a, s.parent)
        else:
            _require_extendable(s)
            pre = ie.lift(a, s.parent)
        return ie.restrict(apply(s.base, pre), a.forest)
    raise TypeError(f"not a star expression: {s!r}")


def divisorial(a: IdealFamily) -> IdealFamily:
    one = ie.unit(a.forest)
    inv = ie.colon(one, a)
    if inv is ie.ZERO:
        return ie.quotient_field(a.forest)
    out = ie.colon(one, inv)
    assert out is not ie.ZERO
    return out


def _transport(s: Transport, a: IdealFamily) -> IdealFamily:
    f = a.forest
    q = f.require(s.core)
    quotient = cut_branch(f, q)
    if a == divisorial(a):
        return a
    depth = f.depth(q)
    low = ie.localize(a, q)
    if low.level < depth or not low.closed:
        raise ModelingError(f"{a} is not divisorial yet I R_{q} = {low} admits no normalizing element")
    w = ie.PrincipalWitness.extend(f, {q: low.pivot})
    normalized = a.shifted(w.inverse().values)  # P <= alpha I <= R_P
    image = {}
    for m in f.leaves:
        c = normalized.cuts[m]
        image[m] = og.make_cut(quotient.lex_group(m), c.level - depth, c.pivot[depth:], c.closed)
    if any(c.is_full for c in image.values()):
        closed_image = None  # not fractional over R/Q: the trivial extension sends it to the field
    else:
        closed_image = apply(s.inner, IdealFamily(quotient, image))
    cuts = {}
    for m in f.leaves:
        space = f.lex_group(m)
        c = None if closed_image is None else closed_image.cuts[m]
        if c is None or c.is_full:
            cuts[m] = og.make_cut(space, depth, None, True)
        else:
            cuts[m] = og.make_cut(space, c.level + depth, (0,) * depth + c.pivot, c.closed)
    return IdealFamily(f, cuts).shifted(w.values)


_EXTENDABLE: dict = {}


def _require_extendable(s: Extended):
    key = (s.base, s.centers, s.parent)
    if key not in _EXTENDABLE:
        report = extendability_check(s.base, s.parent, s.centers[0], samples=60, seed=0)
        _EXTENDABLE[key] = report
    report = _EXTENDABLE[key]
    if report.verdict == FAILS:
        raise NotExtendable(f"{render_star(s.base)} is not extendable to R_{s.centers[0]}: "
                            f"{'; '.join(report.witness)}")


def is_closed(s: StarExpr, a: IdealFamily) -> bool:
    return apply(s, a) == a


# text format -----------------------------------------------------------------


def render_star(s: StarExpr) -> str:
    if isinstance(s, Identity):
        return "d"
    if isinstance(s, Divisorial):
        return "v"
    if isinstance(s, Spectral):
        return f"spec({','.join(s.primes)})"
    if isinstance(s, Meet):
        return f"meet({','.join(render_star(p) for p in s.parts)})"
    if isinstance(s, BranchProduct):
        return "branches{" + ", ".join(f"{branch_id(k)}:{render_star(e)}" for k, e in s.parts) + "}"
    if isinstance(s, Localized):
        return "local{" + ", ".join(f"{k}:{render_star(e)}" for k, e in s.parts) + "}"
    if isinstance(s, Transport):
        return f"transport({s.core}, {render_star(s.inner)})"
    if isinstance(s, Extended):
        target = branch_id(s.centers[0]) if s.branch else s.centers[0]
        return f"extend({render_star(s.base)}, {target})"
    raise TypeError(s)


_TOKEN = re.compile(r"\s*(T\[[^\]]+\]|[A-Za-z_][A-Za-z0-9_']*|[(){},:])")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                raise ValueError(f"unexpected character at {pos} in {text!r}")
            self.tokens.append(m.group(1))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ValueError(f"expected {expected or 'token'} in {self.text!r}, got {tok!r}")
        self.i += 1
        return tok

    def expr(self, forest: SpectralForest) -> tuple[StarExpr, SpectralForest]:
        tok = self.take()
        if tok == "d":
            return Identity(), forest
        if tok == "v":
            return Divisorial(), forest
        if tok == "spec":
            names = self._names()
            for n in names:
                forest.require(n)
            missing = [m for m in forest.leaves if m not in names]
            if missing:
                raise ScopeError(f"spec(...) omits maximal ideals {missing}: R would not be closed")
            return Spectral(tuple(sorted(names))), forest
        if tok == "meet":
            self.take("(")
            parts = [self.expr(forest)[0]]
            while self.peek() == ",":
                self.take(",")
                parts.append(self.expr(forest)[0])
            self.take(")")
            return Meet(tuple(parts)), forest
        if tok in ("branches", "local"):
            self.take("{")
            parts = {}
            while self.peek() != "}":
                key = self.take()
                self.take(":")
                if tok == "branches":
                    b = resolve_branch(forest, key)
                    parts[b.id[2:-1]] = self.expr(b.forest)[0]
                else:
                    if key not in forest or not forest.is_leaf(key):
                        raise ScopeError(f"unknown maximal ideal {key!r}")
                    parts[key] = self.expr(forest.overring([key]))[0]
                if self.peek() == ",":
                    self.take(",")
            self.take("}")
            return (branch_product(parts) if tok == "branches" else localized(parts)), forest
        if tok == "transport":
            self.take("(")
            q = forest.require(self.take())
            self.take(",")
            inner = self.expr(cut_branch(forest, q))[0]
            self.take(")")
            return Transport(q, inner), forest
        if tok == "extend":
            self.take("(")
            base = self.expr(forest)[0]
            self.take(",")
            target = self.take()
            self.take(")")
            e = extend(base, forest, target)
            return e, e.domain
        raise ValueError(f"unknown star operation {tok!r}")

    def _names(self):
        self.take("(")
        names = [self.take()]
        while self.peek() == ",":
            self.take(",")
            names.append(self.take())
        self.take(")")
        return names


def parse_star(text: str, forest: SpectralForest) -> tuple[StarExpr, SpectralForest]:
    """Parse a star literal; returns the expression and the forest it acts on."""
    p = _Parser(text)
    out = p.expr(forest)
    if p.peek() is not None:
        raise ValueError(f"trailing input in {text!r}")
    return out


# reports ---------------------------------------------------------------------

HOLDS = "holds-on-samples"
FAILS = "fails-with-witness"
EXACT_TRUE = "exact-true"
EXACT_FALSE = "exact-false"
SKIPPED = "skipped"


@dataclass
class StarPredicateReport:
    predicate: str
    verdict: str
    witness: list = field(default_factory=list)
    samples: int = 0
    seed: int | None = None
    anchor: str = ""
    evidence: str = "sampled"
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.verdict in (HOLDS, EXACT_TRUE)

    def to_dict(self) -> dict:
        return {"predicate": self.predicate, "verdict": self.verdict, "witness": list(self.witness),
                "samples": self.samples, "seed": self.seed, "anchor": self.anchor,
                "evidence": self.evidence, "note": self.note}


def _verdict(predicate, failure, samples, seed, anchor, note="") -> StarPredicateReport:
    if failure is None:
        return StarPredicateReport(predicate, HOLDS, [], samples, seed, anchor, "sampled", note)
    return StarPredicateReport(predicate, FAILS, [str(w) for w in failure], samples, seed, anchor,
                               "sampled", note)


def sample_ideals(forest: SpectralForest, n: int, seed: int, bound: int = 3) -> list[IdealFamily]:
    rng = random.Random(seed)
    return [ie.random_ideal(forest, rng, bound) for _ in range(n)]


def structured_ideals(forest: SpectralForest) -> list[IdealFamily]:
    """R, the primes, the localizations R_P, and the crossed pair of a non-h-local tree."""
    out = [ie.unit(forest)]
    out += [ie.prime_ideal(forest, p) for p in forest.nodes]
    out += [ie.module_at(forest, p) for p in forest.nodes if not forest.is_leaf(p)]
    if not is_h_local(forest):
        out += list(crossed_pair(forest))
    seen, uniq = set(), []
    for i in out:
        if i not in seen:
            seen.add(i)
            uniq.append(i)
    return uniq


def crossed_pair(forest: SpectralForest) -> tuple[IdealFamily, IdealFamily]:
    """Two ideals whose v-closures are both R_Q although their intersection is R.

    Q is the core prime of a branching tree; the first ideal is R_M over one
    branch of R/Q and R_Q over the rest, the second the other way round.
    """
    for root in forest.roots:
        tree = forest.tree(root)
        if is_h_local(tree):
            continue
        q = branch_core_prime(tree)
        depth = forest.depth(q)
        first = forest.children(q)[0]
        side = set(forest.leaves_above(first))
        other = set(tree.leaves) - side

        def build(keep):
            cuts = {}
            for m in forest.leaves:
                space = forest.lex_group(m)
                if m in tree.leaves and m not in keep:
                    cuts[m] = og.make_cut(space, depth, None, True)
                else:
                    cuts[m] = og.unit_cut(space)
            return IdealFamily(forest, cuts)

        return build(side), build(other)
    raise ValueError("forest is h-local: no crossed pair exists")


# sampled predicates ----------------------------------------------------------


def _first_failure(cases: Iterable, test: Callable) -> object | None:
    for case in cases:
        bad = test(case)
        if bad:
            return bad
    return None


def _pairs(forest: SpectralForest, n: int, seed: int) -> Iterator[tuple]:
    rng = random.Random(seed)
    for _ in range(n):
        yield ie.random_ideal(forest, rng), ie.random_ideal(forest, rng)


def check_stable(s: StarExpr, forest: SpectralForest, samples: int = 200, seed: int = 0):
    if isinstance(s, Identity):
        return StarPredicateReport("stable", EXACT_TRUE, [], 0, seed, "d distributes over intersections",
                                   "exact")
    cases = []
    if not is_h_local(forest):
        cases.append(crossed_pair(forest))
    cases = list(cases) + list(_pairs(forest, samples, seed))

    def test(pair):
        i, j = pair
        lhs = apply(s, i & j)
        rhs = apply(s, i) & apply(s, j)
        return None if lhs == rhs else (f"I = {i}", f"J = {j}", f"(I∩J)* = {lhs}", f"I*∩J* = {rhs}")

    return _verdict("stable", _first_failure(cases, test), samples, seed,
                    "stable: (I∩J)^* = I^* ∩ J^*")


def check_semifinite(s: StarExpr, forest: SpectralForest, samples: int = 200, seed: int = 0):
    star_primes = [p for p in forest.nodes if is_closed(s, ie.prime_ideal(forest, p))]
    primes = [ie.prime_ideal(forest, p) for p in star_primes]
    one = ie.unit(forest)
    rng = random.Random(seed)
    cases = [ie.prime_ideal(forest, p) for p in forest.nodes]
    cases += [ie.random_integral_ideal(forest, rng) for _ in range(samples)]

    def test(i):
        closed = apply(s, i)
        if closed != i or i == one or not i <= one:
            return None
        if any(i <= p for p in primes):
            return None
        return (f"I = {i}", "no prime *-ideal contains I")

    return _verdict("semifinite", _first_failure(cases, test), samples, seed,
                    "semifinite: proper *-ideals lie in prime *-ideals",
                    note=f"prime *-ideals: {', '.join(star_primes) or 'none'}")


def _spectral_candidates(forest: SpectralForest):
    inner = [p for p in forest.nodes if not forest.is_leaf(p)]
    for mask in range(2 ** len(inner)):
        chosen = [p for k, p in enumerate(inner) if mask >> k & 1]
        yield Spectral(tuple(sorted(chosen + list(forest.leaves))))


def check_spectral(s: StarExpr, forest: SpectralForest, samples: int = 200, seed: int = 0):
    ideals = structured_ideals(forest) + sample_ideals(forest, samples, seed)
    closures = [apply(s, i) for i in ideals]
    for cand in _spectral_candidates(forest):
        if all(apply(cand, i) == c for i, c in zip(ideals, closures)):
            return StarPredicateReport("spectral", HOLDS, [], samples, seed,
                                       "spectral: I^* = ∩ I R_P over a prime set",
                                       "sampled", f"matches {render_star(cand)}")
    for i, c in zip(ideals, closures):
        if c != i:
            return StarPredicateReport("spectral", FAILS, [f"I = {i}", f"I* = {c}"], samples, seed,
                                       "spectral: I^* = ∩ I R_P over a prime set",
                                       "sampled", "no prime set reproduces the operation")
    return StarPredicateReport("spectral", FAILS, [], samples, seed, "", "sampled",
                               "no prime set reproduces the operation")


def check_finite_type(s: StarExpr, forest: SpectralForest, samples: int = 200, seed: int = 0):
    ideals = structured_ideals(forest) + sample_ideals(forest, samples, seed)

    def test(i):
        c = apply(s, i)
        return None if c == i else (f"I = {i}", f"I* = {c}")

    return _verdict("finite_type", _first_failure(ideals, test), samples, seed,
                    "Prüfer: the only finite-type operation is d")


def property_report(s: StarExpr, which: str, forest: SpectralForest, samples: int = 200,
                    seed: int = 0) -> StarPredicateReport:
    if which == "stable":
        return check_stable(s, forest, samples, seed)
    if which == "semifinite":
        return check_semifinite(s, forest, samples, seed)
    if which == "spectral":
        return check_spectral(s, forest, samples, seed)
    if which == "finite_type":
        return check_finite_type(s, forest, samples, seed)
    if which == "eab":
        return StarPredicateReport("eab", EXACT_TRUE, [], 0, seed,
                                   "eab with principal F, G, H", "exact",
                                   "finitely generated ideals of a Bezout domain are principal")
    if which == "noetherian":
        return StarPredicateReport("noetherian", SKIPPED, [], 0, seed, "", "none",
                                   "skipped: out of scope")
    raise ValueError(f"unknown property {which!r}")


def axioms_report(s: StarExpr, forest: SpectralForest, samples: int = 200, seed: int = 0):
    """Extensive, idempotent, monotone, R^* = R, and (xI)^* = x I^*."""
    rng = random.Random(seed)
    one = ie.unit(forest)
    if apply(s, one) != one:
        return StarPredicateReport("axioms", FAILS, [f"R* = {apply(s, one)}"], samples, seed,
                                   "extensive, idempotent, monotone, R* = R, homogeneous")
    for _ in range(samples):
        i = ie.random_ideal(forest, rng)
        j = ie.random_ideal(forest, rng)
        x = ie.random_witness(forest, rng)
        ci = apply(s, i)
        if not i <= ci:
            return _verdict("axioms", (f"I = {i}", f"I* = {ci}", "not extensive"), samples, seed,
                            "extensive, idempotent, monotone, R* = R, homogeneous")
        if apply(s, ci) != ci:
            return _verdict("axioms", (f"I = {i}", "not idempotent"), samples, seed, "extensive, idempotent, monotone, R* = R, homogeneous")
        lo, hi = i & j, i + j
        if not apply(s, lo) <= apply(s, hi):
            return _verdict("axioms", (f"I = {lo}", f"J = {hi}", "not monotone"), samples, seed,
                            "extensive, idempotent, monotone, R* = R, homogeneous")
        if apply(s, i.shifted(x.values)) != ci.shifted(x.values):
            return _verdict("axioms", (f"I = {i}", f"x = {x}", "not homogeneous"), samples, seed,
                            "extensive, idempotent, monotone, R* = R, homogeneous")
    return _verdict("axioms", None, samples, seed, "extensive, idempotent, monotone, R* = R, homogeneous")


# extension and decomposition ---------------------------------------------------


def _trivial_away(forest: SpectralForest, target: SpectralForest, rng: random.Random):
    """A random ideal Z with Z T = T."""
    one_t = ie.unit(target)
    for _ in range(20):
        z = ie.random_integral_ideal(forest, rng)
        if ie.restrict(z, target) == one_t:
            return z
    return ie.unit(forest)


def extendability_check(s: StarExpr, forest: SpectralForest, target: str, samples: int = 200,
                        seed: int = 0) -> StarPredicateReport:
    """Does IT = JT force I^* T = J^* T?"""
    if isinstance(s, Identity):
        return StarPredicateReport("extendable", EXACT_TRUE, [], 0, seed,
                                   "d is always extendable", "exact")
    if target.startswith("T[") or (target in forest.roots and False):
        resolve_branch(forest, target)
        return StarPredicateReport("extendable", EXACT_TRUE, [], 0, seed,
                                   "every star operation extends to the standard decomposition",
                                   "exact")
    forest.require(target)
    t_forest = forest.overring([target])
    rng = random.Random(seed)

    def cases():
        for i in structured_ideals(forest):
            yield i, ie.lift(ie.restrict(i, t_forest), forest)
        for _ in range(samples):
            i = ie.random_ideal(forest, rng)
            yield i, ie.lift(ie.restrict(i, t_forest), forest)
            yield i, i * _trivial_away(forest, t_forest, rng)

    def test(pair):
        i, j = pair
        a = ie.restrict(apply(s, i), t_forest)
        b = ie.restrict(apply(s, j), t_forest)
        return None if a == b else (f"I = {i}", f"J = {j}", f"I*T = {a}", f"J*T = {b}")

    return _verdict("extendable", _first_failure(cases(), test), samples, seed,
                    "extendable iff IT = JT implies I^*T = J^*T")


def lambda_map(s: StarExpr, forest: SpectralForest) -> dict[str, StarExpr]:
    return {b.id: Extended(s, (b.id[2:-1],), forest, True) for b in standard_decomposition(forest)}


def random_star(forest: SpectralForest, rng: random.Random) -> StarExpr:
    """A random operation from the grammar on this forest."""
    pick = rng.randrange(5)
    if pick == 0:
        return Identity()
    if pick == 1:
        return Divisorial()
    if pick == 2:
        return localized({m: rng.choice([d, v]) for m in forest.leaves})
    if pick == 3:
        return Meet((Divisorial(), localized({m: rng.choice([d, v]) for m in forest.leaves})))
    return branch_product({r: rng.choice([d, v]) for r in forest.roots})


def lambda_rho_roundtrip(forest: SpectralForest, assignment: Mapping[str, StarExpr],
                         samples: int = 200, seed: int = 0) -> StarPredicateReport:
    anchor = "star operations split as a product over the standard decomposition"
    parts = {_root_name(k): e for k, e in assignment.items()}
    if all(isinstance(e, Identity) for e in parts.values()):
        return StarPredicateReport("lambda-rho", EXACT_TRUE, [], 0, seed, anchor, "exact",
                                   "all-identity assignment: rho is d")
    star = branch_product(parts)
    rng = random.Random(seed)
    for b in standard_decomposition(forest):
        local = parts.get(b.id[2:-1], Identity())
        ext = Extended(star, (b.id[2:-1],), forest, True)
        for _ in range(samples):
            j = ie.random_ideal(b.forest, rng)
            lhs, rhs = apply(ext, j), apply(local, j)
            if lhs != rhs:
                return _verdict("lambda-rho", (f"branch {b.id}", f"J = {j}", f"(rho)_T = {lhs}",
                                               f"assigned = {rhs}"), samples, seed, anchor)
    for _ in range(max(1, samples // 20)):
        other = random_star(forest, rng)
        back = BranchProduct(tuple((k[2:-1], e) for k, e in lambda_map(other, forest).items()))
        for _ in range(20):
            i = ie.random_ideal(forest, rng)
            if apply(back, i) != apply(other, i):
                return _verdict("lambda-rho", (f"* = {render_star(other)}", f"I = {i}"),
                                samples, seed, anchor)
    return _verdict("lambda-rho", None, samples, seed, anchor)


def transfer_suite(forest: SpectralForest, assignment: Mapping[str, StarExpr],
                   which: Sequence[str] = ("stable", "finite_type", "semifinite", "spectral"),
                   samples: int = 100, seed: int = 0) -> list[StarPredicateReport]:
    """Properties of rho(assignment) against its branch components, plus the extension laws."""
    parts = {_root_name(k): e for k, e in assignment.items()}
    star = branch_product(parts)
    out = []
    for prop in which:
        glob = property_report(star, prop, forest, samples, seed)
        comps = [property_report(parts.get(b.id[2:-1], Identity()), prop, b.forest, samples, seed)
                 for b in standard_decomposition(forest)]
        agree = glob.ok == all(c.ok for c in comps)
        out.append(StarPredicateReport(
            f"transfer.{prop}", HOLDS if agree else FAILS,
            [] if agree else [f"global {glob.verdict}", *(f"{c.verdict}" for c in comps)],
            samples, seed, f"{prop} holds for * iff it holds for every *_T", "sampled",
            f"global: {glob.verdict}"))
    out.append(meet_law(forest, Identity(), Divisorial(), samples, seed))
    out.append(order_law(forest, Identity(), Divisorial(), samples, seed))
    out.append(transitivity_law(forest, star, samples, seed))
    return out


def meet_law(forest, s1, s2, samples=100, seed=0) -> StarPredicateReport:
    rng = random.Random(seed)
    for b in standard_decomposition(forest):
        root = b.id[2:-1]
        lhs = Extended(Meet((s1, s2)), (root,), forest, True)
        rhs = Meet((Extended(s1, (root,), forest, True), Extended(s2, (root,), forest, True)))
        for _ in range(samples):
            j = ie.random_ideal(b.forest, rng)
            if apply(lhs, j) != apply(rhs, j):
                return _verdict("meet-law", (f"J = {j}",), samples, seed,
                                "(*1 ∧ *2)_T = (*1)_T ∧ (*2)_T")
    return _verdict("meet-law", None, samples, seed, "(*1 ∧ *2)_T = (*1)_T ∧ (*2)_T")


def order_law(forest, lo, hi, samples=100, seed=0) -> StarPredicateReport:
    rng = random.Random(seed)
    for b in standard_decomposition(forest):
        root = b.id[2:-1]
        e_lo, e_hi = Extended(lo, (root,), forest, True), Extended(hi, (root,), forest, True)
        for _ in range(samples):
            j = ie.random_ideal(b.forest, rng)
            if not apply(e_lo, j) <= apply(e_hi, j):
                return _verdict("order-law", (f"J = {j}",), samples, seed,
                                "*1 <= *2 implies (*1)_T <= (*2)_T")
    return _verdict("order-law", None, samples, seed, "*1 <= *2 implies (*1)_T <= (*2)_T")


def transitivity_law(forest, s, samples=100, seed=0) -> StarPredicateReport:
    """(*_T)_{R_P} = *_{R_P} for every branch T and prime P of T."""
    anchor = "*_{T2} = (*_{T1})_{T2}"
    rng = random.Random(seed)
    for b in standard_decomposition(forest):
        root = b.id[2:-1]
        on_t = Extended(s, (root,), forest, True)
        for p in b.forest.nodes:
            if b.forest.is_leaf(p) and b.forest.leaves == (p,):
                direct = Extended(s, (root,), forest, True)
            else:
                try:
                    _require_extendable(Extended(s, (p,), forest, False))
                    _require_extendable(Extended(on_t, (p,), b.forest, False))
                except NotExtendable:
                    continue
                direct = Extended(s, (p,), forest, False)
            twice = Extended(on_t, (p,), b.forest, False) if not (
                b.forest.leaves == (p,)) else on_t
            target = forest.overring([p]) if direct.domain != b.forest else b.forest
            for _ in range(max(1, samples // 5)):
                j = ie.random_ideal(target, rng)
                if apply(direct, j) != apply(twice, j):
                    return _verdict("transitivity", (f"P = {p}", f"J = {j}"), samples, seed, anchor)
    return _verdict("transitivity", None, samples, seed, anchor)


# counting and classification -------------------------------------------------


@dataclass(frozen=True)
class StarCount:
    value: int
    exact: bool
    note: str = ""

    def __str__(self):
        return f"{'=' if self.exact else '>='} {self.value}"


def _chain_count(chain: SpectralForest) -> int:
    return 2 if chain.group(chain.leaves[0]).is_dense else 1


def _branch_bound(tree: SpectralForest) -> int:
    if len(tree.leaves) == 1:
        return _chain_count(tree)
    quotient = cut_branch(tree, branch_core_prime(tree))
    total = 1
    for r in quotient.roots:
        total *= _branch_bound(quotient.tree(r))
    return total


def count_star_operations(forest: SpectralForest) -> StarCount:
    """|Star(R)|: exact 2^k when h-local, else a lower bound."""
    if is_h_local(forest):
        k = sum(forest.group(m).is_dense for m in forest.leaves)
        return StarCount(2 ** k, True, "h-local: one factor of 2 per nondivisorial maximal ideal")
    bound = 1
    for r in forest.roots:
        bound *= _branch_bound(forest.tree(r))
    bound = max(bound, 2 ** len(nondivisorial_maximals(forest)))
    return StarCount(bound, False, "not exact: Star vs (semi)star gap after branch cut")


def nondivisorial_maximals(forest: SpectralForest) -> list[str]:
    return [m for m in forest.leaves
            if divisorial(ie.maximal_ideal(forest, m)) != ie.maximal_ideal(forest, m)]


def stable_ops(forest: SpectralForest) -> list[Localized]:
    """Every stable star operation, as intersections of per-maximal-ideal closures."""
    free = nondivisorial_maximals(forest)
    out = []
    for mask in range(2 ** len(free)):
        parts = {m: (v if mask >> k & 1 else d) for k, m in enumerate(free)}
        out.append(localized({m: parts.get(m, d) for m in forest.leaves}))
    return out


# further sampled checks -------------------------------------------------------


def m_canonical_check(a: IdealFamily, samples: int = 200, seed: int = 0) -> StarPredicateReport:
    """Is (A : (A : I)) = I on every test ideal?"""
    ok, _ = ie.is_fractional(a)
    if not ok:
        raise ie.NotFractional(f"{a} is not fractional")
    forest = a.forest
    cases = structured_ideals(forest) + sample_ideals(forest, samples, seed)

    def test(i):
        inner = ie.colon(a, i)
        back = ie.colon(a, inner) if inner is not ie.ZERO else ie.quotient_field(forest)
        return None if back == i else (f"A = {a}", f"I = {i}", f"(A:(A:I)) = {back}")

    return _verdict("m-canonical", _first_failure(cases, test), samples, seed,
                    "A is m-canonical iff I = (A:(A:I)) for all I")


def m_canonical_search(forest: SpectralForest, samples: int = 200, seed: int = 0):
    """Look for an m-canonical ideal among candidates; returns (A or None, reports)."""
    rng = random.Random(seed + 1)
    candidates = structured_ideals(forest)
    candidates += [ie.random_ideal(forest, rng) for _ in range(samples)]
    reports = []
    test_n = max(20, samples // 4)
    for a in candidates:
        rep = m_canonical_check(a, test_n, seed)
        reports.append(rep)
        if rep.ok:
            return a, reports
    return None, reports


def closed_under_sum_check(s: StarExpr, forest: SpectralForest, samples: int = 200,
                           seed: int = 0) -> StarPredicateReport:
    rng = random.Random(seed)
    if is_h_local(forest):
        for _ in range(samples):
            i = apply(s, ie.random_ideal(forest, rng))
            j = apply(s, ie.random_ideal(forest, rng))
            if apply(s, i + j) != i + j:
                return _verdict("closed-sum", (f"I = {i}", f"J = {j}"), samples, seed,
                                "h-local: sums of *-closed ideals are *-closed")
        return _verdict("closed-sum", None, samples, seed,
                        "h-local: sums of *-closed ideals are *-closed")
    for _ in range(samples):
        i = ie.random_ideal(forest, rng)
        if is_closed(s, i):
            continue
        j = ie.random_ideal(forest, rng)
        if is_closed(s, i & j) and is_closed(s, i + j):
            rep = _verdict("closed-sum", (f"I = {i}", f"J = {j}", "both I∩J and I+J closed"),
                           samples, seed, "exploratory outside h-local")
            rep.note = "exploratory: no verdict is prescribed off h-local forests"
            return rep
    rep = _verdict("closed-sum", None, samples, seed, "exploratory outside h-local")
    rep.note = "exploratory: no verdict is prescribed off h-local forests"
    return rep
