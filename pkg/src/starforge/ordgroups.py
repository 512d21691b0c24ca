"""Exact rank-one ordered groups, their lexicographic products, and cuts.

Scalars are plain ``int``/``Fraction`` values or :class:`QuadraticSurd`
instances; nothing here ever touches floating point.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from math import gcd, isqrt
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


class DimensionError(ValueError):
    """Vectors or cuts from different value groups were combined."""


class MembershipError(ValueError):
    """A scalar is not an element of the group it was assigned to."""


class RepresentationOverflow(ArithmeticError):
    """A cut operation left the level/pivot/closed family (a bug signal)."""


def _cached_hash(self) -> int:
    """Hash of a frozen dataclass, computed once (fields are hashed often as cache keys)."""
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash(tuple(getattr(self, f) for f in self.__dataclass_fields__))
        object.__setattr__(self, "_hash", h)
    return h


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _squarefree(d: int) -> bool:
    if d < 2:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


@total_ordering
class QuadraticSurd:
    """The real number ``p + q*sqrt(d)`` with rational ``p, q``."""

    __slots__ = ("p", "q", "d")

    def __init__(self, p: Rational, q: Rational, d: int):
        self.p = _frac(p)
        self.q = _frac(q)
        self.d = d

    def _coerce(self, other) -> "QuadraticSurd":
        if isinstance(other, QuadraticSurd):
            if other.d != self.d and other.q != 0 and self.q != 0:
                raise DimensionError(f"sqrt({self.d}) mixed with sqrt({other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticSurd(other, 0, self.d)
        return NotImplemented

    def sign(self) -> int:
        p, q = self.p, self.q
        if q == 0 or p == 0:
            s = p if q == 0 else q
            return (s > 0) - (s < 0)
        if p > 0 and q > 0:
            return 1
        if p < 0 and q < 0:
            return -1
        diff = p * p - q * q * self.d
        # sqrt(d) is irrational, so diff is never zero here
        return (1 if diff > 0 else -1) if p > 0 else (-1 if diff > 0 else 1)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticSurd(self.p + o.p, self.q + o.q, self.d).simplify()

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.p, -self.q, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticSurd(
            self.p * o.p + self.q * o.q * self.d, self.p * o.q + self.q * o.p, self.d
        ).simplify()

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        norm = o.p * o.p - o.q * o.q * self.d
        if norm == 0:
            raise ZeroDivisionError("division by zero surd")
        return self * QuadraticSurd(o.p / norm, -o.q / norm, self.d)

    def __rtruediv__(self, other):
        return QuadraticSurd(other, 0, self.d) / self

    def simplify(self):
        """Collapse to a plain rational when the surd part vanishes."""
        if self.q == 0:
            return self.p.numerator if self.p.denominator == 1 else self.p
        return self

    def __eq__(self, other):
        if isinstance(other, QuadraticSurd):
            return self.p == other.p and self.q == other.q and (
                self.q == 0 or self.d == other.d
            )
        if isinstance(other, (int, Fraction)):
            return self.q == 0 and self.p == other
        return NotImplemented

    def __lt__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return sign(self - o) < 0

    def __hash__(self):
        if self.q == 0:
            return hash(self.p)
        return hash((self.p, self.q, self.d))

    def __float__(self):
        return float(self.p) + float(self.q) * self.d ** 0.5

    def __repr__(self):
        return f"QuadraticSurd({self.p}, {self.q}, {self.d})"

    def __str__(self):
        return render_scalar(self)


Scalar = Union[int, Fraction, QuadraticSurd]


def sign(x: Scalar) -> int:
    if isinstance(x, QuadraticSurd):
        return x.sign()
    return (x > 0) - (x < 0)


def floor_scalar(x: Scalar) -> int:
    """Exact floor of a rational or quadratic surd."""
    if not isinstance(x, QuadraticSurd):
        return int(Fraction(x).__floor__())
    # floor(p + q*sqrt(d)) with p = a/m, q = b/m
    m = x.p.denominator * x.q.denominator // gcd(x.p.denominator, x.q.denominator)
    a, b = int(x.p * m), int(x.q * m)
    s = isqrt(b * b * x.d)  # floor(|b| sqrt d)
    t = s if b >= 0 else -s - 1  # floor(b sqrt d); never exact since sqrt d irrational
    return (a + t) // m


def render_scalar(x: Scalar) -> str:
    if isinstance(x, QuadraticSurd):
        if x.q == 0:
            return render_scalar(x.simplify())
        root = f"sqrt({x.d})"
        coef = "" if x.q == 1 else "-" if x.q == -1 else f"{x.q}*"
        surd = f"{coef}{root}"
        if x.p == 0:
            return surd
        return f"{x.p}{'' if surd.startswith('-') else '+'}{surd}"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


_SCALAR_TERM = re.compile(r"([+-]?)\s*(\d+(?:/\d+)?)?\s*(\*?\s*sqrt\((\d+)\))?")


def parse_scalar(text: str) -> Scalar:
    """Parse ``3``, ``-1/2``, ``sqrt(2)``, ``1/2-3*sqrt(5)`` and similar."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    p, q, d = Fraction(0), Fraction(0), None
    pos = 0
    while pos < len(s):
        m = _SCALAR_TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse scalar {text!r}")
        sgn = -1 if m.group(1) == "-" else 1
        if m.group(3):
            dd = int(m.group(4))
            if d is not None and d != dd:
                raise ValueError(f"mixed radicands in {text!r}")
            d = dd
            q += sgn * Fraction(m.group(2) or 1)
        elif m.group(2):
            p += sgn * Fraction(m.group(2))
        else:
            raise ValueError(f"cannot parse scalar {text!r}")
        pos = m.end()
    if d is not None and q != 0:
        return QuadraticSurd(p, q, d)
    return p.numerator if p.denominator == 1 else p


@dataclass(frozen=True)
class RankOneGroup:
    """One of Z, Q, Z[1/n], or Z + Z*(a + b*sqrt(d)), as a subgroup of R."""

    kind: str
    n: int = 0
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    d: int = 0

    KINDS = ("Integers", "Rationals", "NAdic", "QuadraticLattice")
    __hash__ = _cached_hash

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.kind == "NAdic" and self.n < 2:
            raise ValueError("Z[1/n] needs n >= 2")
        if self.kind == "QuadraticLattice":
            if self.b == 0:
                raise ValueError("quadratic lattice needs b != 0")
            if not _squarefree(self.d):
                raise ValueError(f"d={self.d} is not a squarefree integer >= 2")

    @classmethod
    def integers(cls) -> "RankOneGroup":
        return cls("Integers")

    @classmethod
    def rationals(cls) -> "RankOneGroup":
        return cls("Rationals")

    @classmethod
    def nadic(cls, n: int) -> "RankOneGroup":
        return cls("NAdic", n=n)

    @classmethod
    def quadratic(cls, a: Rational, b: Rational, d: int) -> "RankOneGroup":
        return cls("QuadraticLattice", a=Fraction(a), b=Fraction(b), d=d)

    @property
    def is_dense(self) -> bool:
        return self.kind != "Integers"

    @property
    def generator(self) -> Scalar:
        """The irrational generator a + b*sqrt(d) of a quadratic lattice."""
        return QuadraticSurd(self.a, self.b, self.d)

    @property
    def name(self) -> str:
        if self.kind == "Integers":
            return "Z"
        if self.kind == "Rationals":
            return "Q"
        if self.kind == "NAdic":
            return f"Z[1/{self.n}]"
        return f"Z+Z*({render_scalar(self.generator)})"

    def __str__(self):
        return self.name

    def contains(self, x) -> bool:
        if isinstance(x, QuadraticSurd):
            if x.q == 0:
                return self.contains(x.p)
            if self.kind != "QuadraticLattice" or x.d != self.d:
                return False
            k = x.q / self.b
            return k.denominator == 1 and (x.p - k * self.a).denominator == 1
        if not isinstance(x, (int, Fraction)):
            return False
        x = Fraction(x)
        if self.kind == "Rationals":
            return True
        if self.kind == "NAdic":
            den = x.denominator
            g = gcd(den, self.n)
            while g > 1:
                while den % g == 0:
                    den //= g
                g = gcd(den, self.n)
            return den == 1
        return x.denominator == 1

    def small_positive(self, k: int) -> Scalar:
        """A strictly decreasing (in k) sequence of positive elements; dense groups only."""
        if self.kind == "Integers":
            raise ValueError("Z has no arbitrarily small positive elements")
        if self.kind == "Rationals":
            return Fraction(1, 2 ** k)
        if self.kind == "NAdic":
            return Fraction(1, self.n ** k)
        return _surd_epsilons(self.a, self.b, self.d, k + 1)[k]

    def random_element(self, rng, bound: int = 3) -> Scalar:
        """Draw pivots per the sampler convention (integers, or short n-adic/dyadic fractions)."""
        if self.kind == "Integers":
            return rng.randint(-bound, bound)
        if self.kind == "QuadraticLattice":
            m, k = rng.randint(-bound, bound), rng.randint(-bound, bound)
            return m + k * self.generator if k else m
        base = 2 if self.kind == "Rationals" else self.n
        j = rng.randint(0, 3)
        scale = base ** j
        v = Fraction(rng.randint(-bound * scale, bound * scale), scale)
        return v.numerator if v.denominator == 1 else v

    @classmethod
    def parse(cls, text: str) -> "RankOneGroup":
        s = text.replace(" ", "")
        if s == "Z":
            return cls.integers()
        if s == "Q":
            return cls.rationals()
        m = re.fullmatch(r"Z\[1/(\d+)\]", s)
        if m:
            return cls.nadic(int(m.group(1)))
        m = re.fullmatch(r"Z\+Z\*\((.*)\)", s)
        if m:
            x = parse_scalar(m.group(1))
            if not isinstance(x, QuadraticSurd):
                raise ValueError(f"{text!r}: lattice generator must be irrational")
            return cls.quadratic(x.p, x.q, x.d)
        raise ValueError(f"unknown group literal {text!r}")


@lru_cache(maxsize=None)
def _surd_epsilons(a: Fraction, b: Fraction, d: int, count: int) -> tuple:
    # Euclid's algorithm on the positive pair (1, frac(w)) inside Z + Z*w
    w = QuadraticSurd(a, b, d)
    x, y = 1, w - floor_scalar(w)
    out = []
    while len(out) < count:
        out.append(y)
        x, y = y, x - floor_scalar(x / y) * y
    return tuple(out)


def compare_scalars(x: Scalar, y: Scalar) -> int:
    return sign(x - y)


@dataclass(frozen=True)
class GroupElement:
    owner: RankOneGroup
    value: Scalar

    def __post_init__(self):
        if not self.owner.contains(self.value):
            raise MembershipError(f"{render_scalar(self.value)} is not in {self.owner}")

    def __str__(self):
        return render_scalar(self.value)


@dataclass(frozen=True)
class LexGroup:
    """Lexicographic product G_1 x ... x G_n, most significant component first."""

    factors: tuple
    __hash__ = _cached_hash

    def __len__(self):
        return len(self.factors)

    @property
    def name(self) -> str:
        return " x ".join(g.name for g in self.factors)

    def zero(self) -> tuple:
        return (0,) * len(self.factors)

    def unit(self, i: int) -> tuple:
        """The vector with a 1 in (0-based) component i."""
        v = [0] * len(self.factors)
        v[i] = 1
        return tuple(v)

    def check(self, values: Sequence) -> tuple:
        if len(values) != len(self.factors):
            raise DimensionError(f"expected {len(self.factors)} components, got {len(values)}")
        for g, x in zip(self.factors, values):
            if not g.contains(x):
                raise MembershipError(f"{render_scalar(x)} is not in {g}")
        return tuple(values)

    def prefix(self, k: int) -> "LexGroup":
        return _prefix(self, k)


@lru_cache(maxsize=4096)
def _prefix(space: LexGroup, k: int) -> LexGroup:
    return LexGroup(space.factors[:k])


def lex_cmp(x: Sequence, y: Sequence) -> int:
    for a, b in zip(x, y):
        s = sign(a - b) if a is not b else 0
        if s:
            return s
    return 0


def vadd(x: Sequence, y: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(x, y))


def vsub(x: Sequence, y: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(x, y))


def vneg(x: Sequence) -> tuple:
    return tuple(-a for a in x)


@total_ordering
@dataclass(frozen=True, eq=False)
class ValueVector:
    space: LexGroup
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", self.space.check(tuple(self.components)))

    def _same(self, other: "ValueVector"):
        if not isinstance(other, ValueVector):
            return False
        if other.space != self.space:
            raise DimensionError(f"{self.space.name} vs {other.space.name}")
        return True

    def __eq__(self, other):
        return isinstance(other, ValueVector) and other.space == self.space and (
            lex_cmp(self.components, other.components) == 0
        )

    def __hash__(self):
        return hash((self.space, self.components))

    def __lt__(self, other):
        self._same(other)
        return lex_cmp(self.components, other.components) < 0

    def __add__(self, other):
        self._same(other)
        return ValueVector(self.space, vadd(self.components, other.components))

    def __sub__(self, other):
        self._same(other)
        return ValueVector(self.space, vsub(self.components, other.components))

    def __neg__(self):
        return ValueVector(self.space, vneg(self.components))

    def __str__(self):
        return "(" + ",".join(render_scalar(c) for c in self.components) + ")"


def compare(x: ValueVector, y: ValueVector) -> int:
    """Lexicographic comparison: -1, 0 or 1."""
    if x.space != y.space:
        raise DimensionError(f"{x.space.name} vs {y.space.name}")
    return lex_cmp(x.components, y.components)


@dataclass(frozen=True)
class Cut:
    """Upward-closed subset of a lexicographic value group.

    ``level`` i >= 1 denotes ``{x : trunc_i(x - pivot) >= 0}`` (closed) or
    ``> 0`` (open).  Level 0 is reserved for the two sentinels: closed is all
    of K (FULL), open is the empty module (ZERO).  Build cuts with
    :func:`make_cut` so that they are canonical.
    """

    space: LexGroup
    level: int
    pivot: tuple
    closed: bool
    __hash__ = _cached_hash

    @property
    def is_full(self) -> bool:
        return self.level == 0 and self.closed

    @property
    def is_zero(self) -> bool:
        return self.level == 0 and not self.closed

    @property
    def head(self) -> tuple:
        return self.pivot[: self.level]

    def pivot_vector(self) -> ValueVector:
        return ValueVector(self.space, self.pivot)

    def __str__(self):
        return render_cut(self)


def make_cut(space: LexGroup, level: int, pivot: Sequence | None = None, closed: bool = True) -> Cut:
    n = len(space)
    if not 0 <= level <= n:
        raise DimensionError(f"level {level} outside 0..{n}")
    pivot = tuple(pivot) if pivot is not None else space.zero()
    if len(pivot) < n:
        pivot = pivot + (0,) * (n - len(pivot))
    elif len(pivot) > n:
        raise DimensionError(f"pivot has {len(pivot)} components for a depth-{n} group")
    if level == 0:
        return Cut(space, 0, space.zero(), closed)
    pivot = tuple(pivot[:level]) + (0,) * (n - level)
    space.check(pivot)
    if not closed and not space.factors[level - 1].is_dense:
        p = list(pivot)
        p[level - 1] += 1
        pivot, closed = tuple(p), True
    return Cut(space, level, pivot, closed)


@lru_cache(maxsize=None)
def full(space: LexGroup) -> Cut:
    return Cut(space, 0, space.zero(), True)


@lru_cache(maxsize=None)
def zero(space: LexGroup) -> Cut:
    return Cut(space, 0, space.zero(), False)


@lru_cache(maxsize=None)
def unit_cut(space: LexGroup) -> Cut:
    """The valuation ring itself: closed at 0, full level."""
    return Cut(space, len(space), space.zero(), True)


def canon(c: Cut) -> Cut:
    return make_cut(c.space, c.level, c.pivot, c.closed)


def cut_member(c: Cut, x: ValueVector | Sequence) -> bool:
    comps = x.components if isinstance(x, ValueVector) else tuple(x)
    if isinstance(x, ValueVector) and x.space != c.space:
        raise DimensionError(f"{x.space.name} vs {c.space.name}")
    if c.level == 0:
        return c.closed
    s = lex_cmp(comps[: c.level], c.pivot[: c.level])
    return s >= 0 if c.closed else s > 0


def _boundary_cmp(a: Cut, b: Cut) -> int:
    """Order of the cuts' lower boundaries; a smaller boundary means a larger set.

    A closed cut of level i sits at (pivot_1..pivot_i, -inf), an open one at
    (pivot_1..pivot_i, +inf).  FULL is (-inf), ZERO is (+inf).
    """
    k = 0
    while True:
        a_end, b_end = k == a.level, k == b.level
        if a_end or b_end:
            ka = (-1 if a.closed else 1) if a_end else 0
            kb = (-1 if b.closed else 1) if b_end else 0
            return (ka > kb) - (ka < kb)
        s = sign(a.pivot[k] - b.pivot[k])
        if s:
            return s
        k += 1


def cut_subset(a: Cut, b: Cut) -> bool:
    """Set inclusion S_a <= S_b."""
    _same_space(a, b)
    return _boundary_cmp(a, b) >= 0


def _same_space(a: Cut, b: Cut):
    if a.space != b.space:
        raise DimensionError(f"{a.space.name} vs {b.space.name}")


@lru_cache(maxsize=200_000)
def meet_set(a: Cut, b: Cut) -> Cut:
    _same_space(a, b)
    return a if _boundary_cmp(a, b) >= 0 else b


@lru_cache(maxsize=200_000)
def join_set(a: Cut, b: Cut) -> Cut:
    _same_space(a, b)
    return b if _boundary_cmp(a, b) >= 0 else a


@lru_cache(maxsize=200_000)
def sum_set(a: Cut, b: Cut) -> Cut:
    """Minkowski sum S_a + S_b (the value set of a product of modules)."""
    _same_space(a, b)
    if a.is_zero or b.is_zero:
        return zero(a.space)
    if a.is_full or b.is_full:
        return full(a.space)
    i, j = a.level, b.level
    if i < j:
        level, closed = i, a.closed
    elif j < i:
        level, closed = j, b.closed
    else:
        level, closed = i, a.closed and b.closed
    return make_cut(a.space, level, vadd(a.pivot, b.pivot), closed)


@lru_cache(maxsize=200_000)
def colon_set(a: Cut, b: Cut) -> Cut:
    """Residual {x : x + S_b inside S_a}."""
    _same_space(a, b)
    if b.is_zero or a.is_full:
        return full(a.space)
    if b.is_full or a.is_zero:
        return zero(a.space)
    i, j = a.level, b.level
    if j < i:
        level, closed = j, not b.closed
    elif j == i:
        level, closed = i, a.closed or not b.closed
    else:
        level, closed = i, a.closed
    return make_cut(a.space, level, vsub(a.pivot, b.pivot), closed)


def cut_lattice(a: Cut, b: Cut, which: str) -> Cut:
    ops = {"meet_set": meet_set, "join_set": join_set, "sum_set": sum_set, "colon_set": colon_set}
    try:
        op = ops[which]
    except KeyError:
        raise ValueError(f"unknown cut operation {which!r}") from None
    return op(a, b)


def shift(c: Cut, v: Sequence) -> Cut:
    """Translate a cut by a value vector (multiplication of the module by an element)."""
    if c.level == 0:
        return c
    return make_cut(c.space, c.level, vadd(c.pivot, v), c.closed)


@lru_cache(maxsize=200_000)
def project(c: Cut, depth: int) -> Cut:
    """Localization at the depth-``depth`` prime of the chain, as a cut of the prefix group."""
    sub = c.space.prefix(depth)
    if c.level == 0:
        return Cut(sub, 0, sub.zero(), c.closed)
    if c.level <= depth:
        return Cut(sub, c.level, c.pivot[:depth], c.closed)
    return make_cut(sub, depth, c.pivot[:depth], True)


@lru_cache(maxsize=200_000)
def lift(c: Cut, space: LexGroup) -> Cut:
    """View a cut of a prefix group inside a longer product (pad pivot with zeros)."""
    if c.space is space:
        return c
    if space.factors[: len(c.space)] != c.space.factors:
        raise DimensionError(f"{c.space.name} is not a prefix of {space.name}")
    if c.level == 0:
        return Cut(space, 0, space.zero(), c.closed)
    return Cut(space, c.level, c.pivot + (0,) * (len(space) - len(c.space)), c.closed)


def probes(c: Cut, depth_eps: int = 6) -> list[tuple]:
    """Deterministic probe vectors around a cut's pivot.

    pivot, pivot +- each unit vector, and pivot +- small positive elements in
    every dense component.
    """
    space = c.space
    base = c.pivot
    out = [base]
    for i, g in enumerate(space.factors):
        e = space.unit(i)
        out.append(vadd(base, e))
        out.append(vsub(base, e))
        if g.is_dense:
            for k in range(1, depth_eps + 1):
                eps = [0] * len(space)
                eps[i] = g.small_positive(k)
                out.append(vadd(base, eps))
                out.append(vsub(base, eps))
    return out


def render_cut(c: Cut) -> str:
    if c.is_full:
        return "K"
    if c.is_zero:
        return "0"
    head = ",".join(render_scalar(x) for x in c.head)
    return f"{'>=' if c.closed else '>'} ({head}) @{c.level}"


_CUT_RE = re.compile(r"\s*(>=|>)\s*\((.*)\)\s*@\s*(?:level\s*)?(\d+)\s*")


def parse_cut(text: str, space: LexGroup) -> Cut:
    t = text.strip()
    if t == "K":
        return full(space)
    if t == "R":
        return unit_cut(space)
    m = _CUT_RE.fullmatch(t)
    if not m:
        raise ValueError(f"cannot parse cut {text!r}")
    level = int(m.group(3))
    comps = [parse_scalar(s) for s in _split_top(m.group(2))] if m.group(2).strip() else []
    if len(comps) != level:
        raise ValueError(f"cut {text!r}: {len(comps)} components for level {level}")
    if level > len(space):
        raise DimensionError(f"cut {text!r}: level {level} exceeds depth {len(space)}")
    for g, x in zip(space.factors, comps):
        if not g.contains(x):
            raise MembershipError(f"{render_scalar(x)} is not in {g}")
    return make_cut(space, level, comps, m.group(1) == ">=")


def _split_top(s: str) -> list[str]:
    """Split on commas not nested inside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def all_cuts(space: LexGroup, values: Iterable[Scalar]) -> list[Cut]:
    """Every canonical level>=1 cut whose pivot components come from ``values``."""
    vals = list(values)
    out = set()
    n = len(space)
    for level in range(1, n + 1):
        heads = [()]
        for _ in range(level):
            heads = [h + (v,) for h in heads for v in vals]
        for h in heads:
            for closed in (True, False):
                try:
                    out.add(make_cut(space, level, h, closed))
                except MembershipError:
                    pass
    return sorted(out, key=lambda c: (c.level, [float(x) for x in c.pivot], c.closed))
