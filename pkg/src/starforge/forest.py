"""Prime-spectrum forests of semilocal finite-dimensional Bezout domains.

A forest lists the nonzero primes; a node without a parent is a height-one
prime and leaves are the maximal ideals.  Every node carries the rank-one
group of the edge coming into it, so the value group of R_M is the
lexicographic product of the groups along the path from the root to M.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .ordgroups import LexGroup, RankOneGroup


class InvalidForest(ValueError):
    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ScopeError(ValueError):
    """A prime, leaf or branch name does not belong to the forest at hand."""


RANK_ONE_LOCAL = "rank-one local"


def validate(parent: Mapping[str, str | None], groups: Mapping[str, RankOneGroup],
             maximal: Iterable[str] | None = None) -> list[str]:
    """Return the list of structural problems (empty when the presentation is valid)."""
    problems = []
    if not parent:
        return ["empty forest"]
    for node, par in parent.items():
        if par is not None and par not in parent:
            problems.append(f"orphan node {node!r}: parent {par!r} is not a prime of the forest")
        if node not in groups:
            problems.append(f"node {node!r} has no edge group")
    for node in parent:
        seen, cur = set(), node
        while cur is not None and cur in parent:
            if cur in seen:
                problems.append(f"cycle through {node!r}")
                break
            seen.add(cur)
            cur = parent[cur]
    has_child = {p for p in parent.values() if p is not None}
    if maximal is not None:
        maximal = set(maximal)
        for node in sorted(maximal & has_child):
            problems.append(f"internal node marked maximal: {node!r}")
        for node in sorted(maximal - set(parent)):
            problems.append(f"unknown maximal ideal {node!r}")
    return problems


class SpectralForest:
    """Immutable finite forest of nonzero primes with edge groups."""

    def __init__(self, parent: Mapping[str, str | None], groups: Mapping[str, RankOneGroup],
                 maximal: Iterable[str] | None = None):
        problems = validate(parent, groups, maximal)
        if problems:
            raise InvalidForest(problems)
        self._parent = dict(parent)
        self._groups = {k: groups[k] for k in parent}
        self._children: dict[str, list[str]] = {k: [] for k in parent}
        for node, par in self._parent.items():
            if par is not None:
                self._children[par].append(node)
        self.nodes = tuple(self._dfs_order())
        self.roots = tuple(n for n in self.nodes if self._parent[n] is None)
        self.leaves = tuple(n for n in self.nodes if not self._children[n])
        self._paths = {}
        for n in self.nodes:
            par = self._parent[n]
            self._paths[n] = (self._paths[par] if par is not None else ()) + (n,)
        self._lex = {n: LexGroup(tuple(self._groups[k] for k in self._paths[n])) for n in self.nodes}
        self._meet_depth: dict = {}
        self._key = tuple((n, self._parent[n], self._groups[n]) for n in self.nodes)
        self._hash = hash(self._key)

    def _dfs_order(self):
        order = []
        stack = [n for n, p in self._parent.items() if p is None][::-1]
        while stack:
            n = stack.pop()
            order.append(n)
            stack.extend(reversed(self._children[n]))
        return order

    @classmethod
    def from_trees(cls, trees: Sequence[Mapping]) -> "SpectralForest":
        """Build from nested ``{name, group, children}`` mappings."""
        parent, groups = {}, {}

        def walk(node, par):
            name = node["name"]
            g = node["group"]
            parent[name] = par
            groups[name] = g if isinstance(g, RankOneGroup) else RankOneGroup.parse(str(g))
            for child in node.get("children", ()) or ():
                walk(child, name)

        for tree in trees:
            walk(tree, None)
        return cls(parent, groups)

    @classmethod
    def chain(cls, names: Sequence[str], groups: Sequence[RankOneGroup | str]) -> "SpectralForest":
        """A single chain (a valuation domain); ``groups`` listed root edge first."""
        parent, gmap = {}, {}
        prev = None
        for name, g in zip(names, groups, strict=True):
            parent[name] = prev
            gmap[name] = g if isinstance(g, RankOneGroup) else RankOneGroup.parse(g)
            prev = name
        return cls(parent, gmap)

    def to_trees(self) -> list[dict]:
        def node(n):
            d = {"name": n, "group": self._groups[n].name}
            if self._children[n]:
                d["children"] = [node(c) for c in self._children[n]]
            return d

        return [node(r) for r in self.roots]

    # structure -----------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, SpectralForest) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"SpectralForest({self.describe()})"

    def describe(self) -> str:
        def node(n):
            kids = self._children[n]
            inner = f"[{', '.join(node(c) for c in kids)}]" if kids else ""
            return f"{n}:{self._groups[n].name}{inner}"

        return "; ".join(node(r) for r in self.roots)

    def __contains__(self, node):
        return node in self._parent

    def require(self, node: str) -> str:
        if node not in self._parent:
            raise ScopeError(f"unknown prime {node!r}")
        return node

    def parent(self, node: str) -> str | None:
        return self._parent[self.require(node)]

    def children(self, node: str) -> tuple:
        return tuple(self._children[self.require(node)])

    def group(self, node: str) -> RankOneGroup:
        return self._groups[self.require(node)]

    def path(self, node: str) -> tuple:
        """Primes from the height-one prime up to ``node`` inclusive."""
        return self._paths[self.require(node)]

    def depth(self, node: str) -> int:
        return len(self.path(node))

    def is_leaf(self, node: str) -> bool:
        return not self._children[self.require(node)]

    def lex_group(self, node: str) -> LexGroup:
        return self._lex[self.require(node)]

    def root_of(self, node: str) -> str:
        return self.path(node)[0]

    def is_below(self, p: str, q: str) -> bool:
        """p is contained in q (p lies on the path to q)."""
        return p in self.path(q)

    def meet(self, u: str, v: str) -> str | None:
        """Largest prime contained in both u and v, or None when R_u R_v = K."""
        pu, pv = self.path(u), self.path(v)
        last = None
        for a, b in zip(pu, pv):
            if a != b:
                break
            last = a
        return last

    def meet_depth(self, u: str, v: str) -> int:
        key = (u, v)
        d = self._meet_depth.get(key)
        if d is None:
            m = self.meet(u, v)
            d = self._meet_depth[key] = 0 if m is None else self.depth(m)
        return d

    def leaves_above(self, node: str) -> tuple:
        return tuple(m for m in self.leaves if self.is_below(node, m))

    def subforest(self, keep: Iterable[str]) -> "SpectralForest":
        """Induced forest on a downward-closed set of primes."""
        keep = set(keep)
        for n in keep:
            if self._parent[self.require(n)] not in keep and self._parent[n] is not None:
                raise ScopeError(f"{n!r} kept without its parent")
        return SpectralForest({n: self._parent[n] for n in self.nodes if n in keep},
                              {n: self._groups[n] for n in keep})

    def overring(self, centers: Iterable[str]) -> "SpectralForest":
        """Presentation of the overring ``intersection of R_P`` over an antichain of primes."""
        centers = [self.require(c) for c in centers]
        if not centers:
            raise ScopeError("an overring needs at least one center")
        for a in centers:
            for b in centers:
                if a != b and self.is_below(a, b):
                    raise ScopeError(f"centers {a!r} and {b!r} are comparable")
        keep = set()
        for c in centers:
            keep.update(self.path(c))
        return self.subforest(keep)

    def tree(self, root: str) -> "SpectralForest":
        if self.parent(root) is not None:
            raise ScopeError(f"{root!r} is not a height-one prime")
        return self.subforest(n for n in self.nodes if self.root_of(n) == root)

    def is_subforest_of(self, other: "SpectralForest") -> bool:
        return all(n in other and other.parent(n) == self._parent[n]
                   and other.group(n) == self._groups[n] for n in self.nodes)


@dataclass(frozen=True)
class Branch:
    """One member of the standard decomposition: the tree over a height-one prime."""

    id: str
    forest: SpectralForest

    @property
    def leaves(self) -> tuple:
        return self.forest.leaves


def branch_id(root: str) -> str:
    return f"T[{root}]"


def dependence_classes(f: SpectralForest) -> list[frozenset]:
    """Maximal ideals grouped by the height-one prime they contain."""
    return [frozenset(f.leaves_above(r)) for r in f.roots]


def standard_decomposition(f: SpectralForest) -> list[Branch]:
    return [Branch(branch_id(r), f.tree(r)) for r in f.roots]


def resolve_branch(f: SpectralForest, name: str) -> Branch:
    """Accept ``T[P]`` or the bare height-one prime ``P``."""
    for b in standard_decomposition(f):
        if name in (b.id, b.id[2:-1]):
            return b
    raise ScopeError(f"unknown branch {name!r}; branches are "
                     f"{', '.join(b.id for b in standard_decomposition(f))}")


def is_h_local(f: SpectralForest) -> bool:
    return all(len(f.children(n)) <= 1 for n in f.nodes)


def branch_core_prime(branch: SpectralForest | Branch) -> str:
    """Largest non-maximal prime below every maximal ideal of the branch.

    Returns :data:`RANK_ONE_LOCAL` when the branch is a single height-one
    maximal ideal (nothing nonzero sits strictly below it).
    """
    f = branch.forest if isinstance(branch, Branch) else branch
    if len(f.roots) != 1:
        raise ScopeError("branch_core_prime needs a single tree")
    leaves = f.leaves
    if len(leaves) == 1:
        par = f.parent(leaves[0])
        return RANK_ONE_LOCAL if par is None else par
    core = leaves[0]
    for m in leaves[1:]:
        core = f.meet(core, m)
    return core


def cut_branch(f: SpectralForest, q: str) -> SpectralForest:
    """Forest of R/q: the primes strictly above q, with q's children as new roots."""
    f.require(q)
    if f.is_leaf(q):
        raise ScopeError(f"cannot cut at the maximal ideal {q!r}")
    if not all(f.is_below(q, m) for m in f.leaves):
        raise ScopeError(f"{q!r} is not below every maximal ideal")
    parent, groups = {}, {}
    for n in f.nodes:
        if n != q and f.is_below(q, n):
            parent[n] = None if f.parent(n) == q else f.parent(n)
            groups[n] = f.group(n)
    return SpectralForest(parent, groups)
