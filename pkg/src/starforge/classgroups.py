"""Star-invertibility and class groups as symbolic descriptors."""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable

from . import ideals as ie
from .forest import ScopeError, SpectralForest, standard_decomposition
from .ideals import IdealFamily
from .ordgroups import RankOneGroup
from .star import (Extended, StarExpr, StarPredicateReport, apply, _verdict)


@dataclass(frozen=True)
class GroupDescriptor:
    """A finite direct sum of groups R/H; the empty sum is 0."""

    atoms: tuple = ()

    @classmethod
    def zero(cls) -> "GroupDescriptor":
        return cls(())

    @classmethod
    def r_mod(cls, h: RankOneGroup) -> "GroupDescriptor":
        return cls((h,))

    def __add__(self, other: "GroupDescriptor") -> "GroupDescriptor":
        return GroupDescriptor(self.atoms + other.atoms)

    @property
    def is_zero(self) -> bool:
        return not self.atoms

    @property
    def is_divisible(self) -> bool:
        """Every R/H is divisible; finite cyclic atoms cannot occur in this normal form."""
        return all(isinstance(h, RankOneGroup) for h in self.atoms)

    def __str__(self):
        if not self.atoms:
            return "0"
        return " ⊕ ".join(f"R/{_atom_name(h)}" for h in self.atoms)


def _atom_name(h: RankOneGroup) -> str:
    name = h.name
    m = re.fullmatch(r"Z\+Z\*\((sqrt\(\d+\))\)", name)
    if m:
        name = f"Z+Z*{m.group(1)}"
    return f"({name})" if "+" in name else name


def direct_sum(parts: Iterable[GroupDescriptor]) -> GroupDescriptor:
    out = GroupDescriptor.zero()
    for p in parts:
        out = out + p
    return out


@dataclass(frozen=True)
class InvertibleIdeal:
    ideal: IdealFamily
    inverse: IdealFamily


def is_star_invertible(s: StarExpr, a: IdealFamily) -> tuple[bool, InvertibleIdeal | None]:
    """Test (I (R:I))^* = R; on success the certified inverse is (R:I)."""
    ok, _ = ie.is_fractional(a)
    if not ok:
        raise ie.NotFractional(f"{a} is not fractional")
    one = ie.unit(a.forest)
    inv = ie.colon(one, a)
    if inv is ie.ZERO:
        return False, None
    if apply(s, a * inv) == one:
        return True, InvertibleIdeal(a, inv)
    return False, None


def clv_of_valuation(chain: SpectralForest) -> GroupDescriptor:
    """Cl^v of a valuation domain: 0 for a discrete leaf edge, R/H for a dense leaf edge H."""
    if len(chain.leaves) != 1 or len(chain.roots) != 1:
        raise ScopeError("clv_of_valuation needs a single chain")
    h = chain.group(chain.leaves[0])
    return GroupDescriptor.zero() if not h.is_dense else GroupDescriptor.r_mod(h)


def non_closed_maximals(forest: SpectralForest, s: StarExpr) -> list[str]:
    out = []
    for m in forest.leaves:
        mi = ie.maximal_ideal(forest, m)
        if apply(s, mi) != mi:
            out.append(m)
    return out


def local_class_group(forest: SpectralForest, s: StarExpr) -> GroupDescriptor:
    """G_*(R) = Cl^*(R) as the sum of Cl^v(R_M) over maximal M with M^* != M."""
    return direct_sum(clv_of_valuation(forest.overring([m])) for m in non_closed_maximals(forest, s))


def picard_group(forest: SpectralForest) -> GroupDescriptor:
    """Bezout: every invertible ideal is principal."""
    return GroupDescriptor.zero()


def localization_surjection(forest: SpectralForest, s: StarExpr, kept: Iterable[str]):
    """The class group and its image after discarding the maximal ideals outside ``kept``."""
    kept = set(kept)
    if not kept:
        raise ValueError("keep at least one maximal ideal")
    for m in kept:
        if m not in forest or not forest.is_leaf(m):
            raise ScopeError(f"unknown maximal ideal {m!r}")
    bad = non_closed_maximals(forest, s)
    whole = direct_sum(clv_of_valuation(forest.overring([m])) for m in bad)
    image = direct_sum(clv_of_valuation(forest.overring([m])) for m in bad if m in kept)
    note = "projection onto the summands of kept maximal ideals (surjective)"
    return whole, image, note


def _invertible_samples(forest: SpectralForest, s: StarExpr, n: int, rng: random.Random):
    """Up to n sampled *-invertible ideals (principal ones fill any shortfall)."""
    out = []
    for _ in range(4 * n):
        if len(out) >= n:
            break
        i = ie.random_ideal(forest, rng)
        ok, _ = is_star_invertible(s, i)
        if ok:
            out.append(i)
    while len(out) < n:
        out.append(ie.random_witness(forest, rng).ideal())
    return out


def invertible_sum_check(forest: SpectralForest, s: StarExpr, samples: int = 100,
                         seed: int = 0) -> StarPredicateReport:
    rng = random.Random(seed)
    pool = _invertible_samples(forest, s, 2 * samples, rng)
    anchor = "sums of *-invertible ideals are *-invertible (Prüfer)"
    for k in range(samples):
        i, j = pool[2 * k], pool[2 * k + 1]
        ok, _ = is_star_invertible(s, i + j)
        if not ok:
            return _verdict("invertible-sum", (f"I = {i}", f"J = {j}", f"I+J = {i + j}"),
                            samples, seed, anchor)
    return _verdict("invertible-sum", None, samples, seed, anchor)


def gamma_decomposition_check(forest: SpectralForest, s: StarExpr, samples: int = 100,
                              seed: int = 0) -> StarPredicateReport:
    """Inv^*(R) against the product of Inv^{*_T}(T) over the standard decomposition."""
    anchor = "Inv^*(R) = ⊕ Inv^{*_T}(T) via I -> (IT)"
    rng = random.Random(seed)
    branches = standard_decomposition(forest)
    local = {b.id: Extended(s, (b.id[2:-1],), forest, True) for b in branches}
    pool = _invertible_samples(forest, s, samples, rng)
    for k, i in enumerate(pool):
        parts = {}
        for b in branches:
            part = ie.restrict(i, b.forest)
            ok, _ = is_star_invertible(local[b.id], part)
            if not ok:
                return _verdict("gamma", (f"I = {i}", f"{b.id}: IT = {part} not invertible"),
                                samples, seed, anchor)
            parts[b.id] = part
        back = ie.glue(forest, parts.values())
        if back != i:
            return _verdict("gamma", (f"I = {i}", f"glue∘restrict = {back}"), samples, seed, anchor)
        j = pool[(k + 1) % len(pool)]
        prod = apply(s, i * j)
        for b in branches:
            lhs = ie.restrict(prod, b.forest)
            rhs = apply(local[b.id], ie.restrict(i, b.forest) * ie.restrict(j, b.forest))
            if lhs != rhs:
                return _verdict("gamma", (f"I = {i}", f"J = {j}", f"{b.id}: {lhs} vs {rhs}"),
                                samples, seed, anchor)
    # surjectivity: glue per-branch invertibles into the intersection of the J_T
    for _ in range(samples):
        parts = {b.id: _invertible_samples(b.forest, local[b.id], 1, rng)[0] for b in branches}
        glued = ie.glue(forest, parts.values())
        ok, _ = is_star_invertible(s, glued)
        if not ok or any(ie.restrict(glued, b.forest) != parts[b.id] for b in branches):
            return _verdict("gamma", ("glued " + "; ".join(f"{k}: {v}" for k, v in parts.items()),
                                      f"I = {glued}"), samples, seed, anchor)
    return _verdict("gamma", None, samples, seed, anchor)
