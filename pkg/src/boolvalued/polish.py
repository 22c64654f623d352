"""Desk-scale Polish spaces: exact rational points, a fixed enumerated basis of
open balls, and finite-depth Borel codes with exact membership.

Four presentation modes are supported:

``finite-discrete``
    a finite list of rational points with the discrete topology;
``naturals-discrete``
    the natural numbers as a subspace of the rationals;
``complex-rational``
    the complex plane, with points ``(re, im)`` of rational coordinates;
``hilbert-fragment``
    a ``d``-dimensional face of the Hilbert cube, optionally cut down by a
    finite G-delta presentation (a list of levels, each a finite union of
    balls; a point belongs to Y when it lies in some ball of every level).

All distances are compared squared, so every decision is exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import count
from typing import Iterable, Iterator, Sequence, Union

FINITE = "finite-discrete"
NATURALS = "naturals-discrete"
COMPLEX = "complex-rational"
HILBERT = "hilbert-fragment"
MODES = (FINITE, NATURALS, COMPLEX, HILBERT)


class SpaceError(ValueError):
    pass


class _Infinity:
    """The point at infinity of a compactification.  Never a member of Y."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise SpaceError("booleans are not coordinates")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise SpaceError(f"bad rational literal {x!r}") from None
    if isinstance(x, float):
        raise SpaceError("floating point coordinates are not accepted; use 'p/q' strings")
    raise SpaceError(f"cannot read {x!r} as a rational")


@dataclass(frozen=True)
class RationalPoint:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(to_fraction(c) for c in self.coords))
        object.__setattr__(self, "_h", hash(self.coords))

    def __hash__(self):
        return self._h

    @classmethod
    def of(cls, *coords) -> RationalPoint:
        return cls(tuple(coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __repr__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


Point = Union[RationalPoint, _Infinity]


def point(*coords) -> RationalPoint:
    return RationalPoint(tuple(coords))


def sq_dist(p: RationalPoint, q: RationalPoint) -> Fraction:
    if p.dim != q.dim:
        raise SpaceError(f"dimension mismatch: {p!r} vs {q!r}")
    return sum(((a - b) ** 2 for a, b in zip(p.coords, q.coords)), Fraction(0))


@dataclass(frozen=True)
class BasisBall:
    center: RationalPoint
    radius: Fraction
    index: int = -1

    def __post_init__(self):
        object.__setattr__(self, "radius", to_fraction(self.radius))
        if self.radius <= 0:
            raise SpaceError("ball radius must be positive")

    def contains(self, p: RationalPoint) -> bool:
        return sq_dist(p, self.center) < self.radius ** 2

    def closure_contains(self, p: RationalPoint) -> bool:
        return sq_dist(p, self.center) <= self.radius ** 2


def ball_membership(space: PolishPresentation, p: RationalPoint, b: BasisBall) -> bool:
    """Open-ball membership by exact comparison of squared distances."""
    if not isinstance(p, RationalPoint):
        raise SpaceError(f"{p!r} is not a point of the space")
    if p.dim != b.center.dim or p.dim != space.dim:
        raise SpaceError(f"dimension mismatch: point {p!r}, ball centre {b.center!r}")
    return b.contains(p)


# -- the presentations -------------------------------------------------------

@dataclass(frozen=True)
class PolishPresentation:
    mode: str
    points: tuple = ()
    dimension: int = 0
    gdelta: tuple = ()
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise SpaceError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.mode == FINITE:
            pts = tuple(p if isinstance(p, RationalPoint) else RationalPoint(
                p if isinstance(p, (tuple, list)) else (p,)) for p in self.points)
            if not pts:
                raise SpaceError("a finite-discrete space needs at least one point")
            if len(set(pts)) != len(pts):
                raise SpaceError("duplicate points in finite-discrete space")
            dims = {p.dim for p in pts}
            if len(dims) != 1:
                raise SpaceError("points of a finite-discrete space must share a dimension")
            object.__setattr__(self, "points", pts)
            object.__setattr__(self, "dimension", dims.pop())
        elif self.mode == NATURALS:
            object.__setattr__(self, "dimension", 1)
        elif self.mode == COMPLEX:
            object.__setattr__(self, "dimension", 2)
        else:
            if self.dimension < 1:
                raise SpaceError("hilbert-fragment needs dimension >= 1")
            levels = tuple(tuple(b if isinstance(b, BasisBall) else BasisBall(*b)
                                 for b in level) for level in self.gdelta)
            for level in levels:
                for b in level:
                    if b.center.dim != self.dimension:
                        raise SpaceError("G-delta ball of the wrong dimension")
            object.__setattr__(self, "gdelta", levels)

    # constructors
    @classmethod
    def finite(cls, points: Iterable) -> PolishPresentation:
        return cls(FINITE, points=tuple(points))

    @classmethod
    def naturals(cls) -> PolishPresentation:
        return cls(NATURALS)

    @classmethod
    def complex(cls) -> PolishPresentation:
        return cls(COMPLEX)

    @classmethod
    def hilbert(cls, dimension: int, gdelta: Sequence = ()) -> PolishPresentation:
        return cls(HILBERT, dimension=dimension, gdelta=tuple(gdelta))

    @property
    def dim(self) -> int:
        return self.dimension

    @property
    def is_discrete(self) -> bool:
        return self.mode in (FINITE, NATURALS)

    def contains(self, p) -> bool:
        if not isinstance(p, RationalPoint) or p.dim != self.dimension:
            return False
        if self.mode == FINITE:
            return p in self._point_set
        if self.mode == NATURALS:
            x = p.coords[0]
            return x.denominator == 1 and x >= 0
        if self.mode == COMPLEX:
            return True
        if not all(0 <= c <= 1 for c in p.coords):
            return False
        return all(any(b.contains(p) for b in level) for level in self.gdelta)

    @cached_property
    def _point_set(self) -> frozenset:
        return frozenset(self.points)

    @property
    def base_point(self) -> RationalPoint:
        """Default value used where the construction needs a fixed point of Y."""
        if self.mode == FINITE:
            return self.points[0]
        if self.mode in (NATURALS, COMPLEX):
            return RationalPoint((0,) * self.dimension)
        origin = RationalPoint((0,) * self.dimension)
        if self.contains(origin):
            return origin
        for b in self.basis():
            if self.contains(b.center):
                return b.center
        raise SpaceError("could not find a point of the space")  # pragma: no cover

    # -- basis ---------------------------------------------------------------
    def basis(self) -> Iterator[BasisBall]:
        return (self.ball(i) for i in count())

    def ball(self, index: int) -> BasisBall:
        if index < 0:
            raise SpaceError(f"invalid ball index {index}")
        balls = self._cache.setdefault("balls", [])
        gen = self._cache.get("gen")
        if gen is None:
            gen = self._cache["gen"] = _enumerate(self)
        while len(balls) <= index:
            center, radius = next(gen)
            balls.append(BasisBall(center, radius, len(balls)))
        return balls[index]

    def ball_points(self, index: int) -> frozenset | None:
        """The points of ``U_index ∩ Y`` when that set is finite, else None."""
        cache = self._cache.setdefault("ball_points", {})
        if index not in cache:
            b = self.ball(index)
            if self.mode == FINITE:
                cache[index] = frozenset(p for p in self.points if b.contains(p))
            elif self.mode == NATURALS:
                c, r = b.center.coords[0], b.radius
                lo, hi = c - r, c + r
                start = max(0, int(lo) - 1)
                cache[index] = frozenset(
                    RationalPoint((k,)) for k in range(start, int(hi) + 2)
                    if lo < k < hi and k >= 0)
            else:
                cache[index] = None
        return cache[index]

    def in_closure(self, p: RationalPoint, index: int) -> bool:
        """Membership of ``p`` in the closure of ``U_index`` relative to Y."""
        if self.is_discrete:
            # every subset of a discrete space is closed
            return self.ball(index).contains(p)
        return self.ball(index).closure_contains(p)

    def closure_subset(self, m: int, n: int) -> bool:
        """Decide Cl(U_m) ⊆ U_n (relative to Y)."""
        if self.is_discrete:
            return self.ball_points(m) <= self.ball_points(n)
        bm, bn = self.ball(m), self.ball(n)
        gap = bn.radius - bm.radius
        return gap > 0 and sq_dist(bm.center, bn.center) < gap ** 2

    def closures_disjoint(self, m: int, n: int) -> bool:
        if self.is_discrete:
            return not (self.ball_points(m) & self.ball_points(n))
        bm, bn = self.ball(m), self.ball(n)
        return sq_dist(bm.center, bn.center) > (bm.radius + bn.radius) ** 2

    def ball_bits(self, p: RationalPoint, k: int) -> tuple[int, int]:
        """Bit masks over ball indices < k: (p ∈ U_n, p ∈ Cl U_n).  Cached."""
        cache = self._cache.setdefault("bits", {})
        hit = cache.get(p)
        if hit is not None and hit[0] >= k:
            n, op, cl = hit
            cut = (1 << k) - 1
            return op & cut, cl & cut
        op = cl = 0
        for n in range(k):
            if self.ball(n).contains(p):
                op |= 1 << n
            if self.in_closure(p, n):
                cl |= 1 << n
        cache[p] = (k, op, cl)
        return op, cl

    def separates(self, index: int, x: RationalPoint, y: RationalPoint) -> bool:
        """``U_index`` contains one of x, y and its closure misses the other."""
        b = self.ball(index)
        return ((b.contains(x) and not self.in_closure(y, index))
                or (b.contains(y) and not self.in_closure(x, index)))

    def separating_index(self, x: RationalPoint, y: RationalPoint,
                         limit: int = 20000) -> int | None:
        for i in range(limit):
            if self.separates(i, x, y):
                return i
        return None

    def containing_index(self, x: RationalPoint, limit: int = 20000) -> int | None:
        for i in range(limit):
            if self.ball(i).contains(x):
                return i
        return None

    def adequate_bound(self, points: Iterable[RationalPoint], limit: int = 20000) -> int:
        """Smallest k such that the first k balls cover and pairwise separate ``points``."""
        pts = list(dict.fromkeys(points))
        need = 1
        for p in pts:
            i = self.containing_index(p, limit)
            if i is None:
                raise SpaceError(f"no ball below {limit} contains {p!r}")
            need = max(need, i + 1)
        for a in range(len(pts)):
            for b in range(a + 1, len(pts)):
                i = self.separating_index(pts[a], pts[b], limit)
                if i is None:
                    raise SpaceError(f"no ball below {limit} separates {pts[a]!r} and {pts[b]!r}")
                need = max(need, i + 1)
        return need

    def to_json(self) -> dict:
        from .serialize import space_to_json
        return space_to_json(self)

    def __repr__(self):
        if self.mode == FINITE:
            return f"PolishPresentation(finite, {list(self.points)!r})"
        if self.mode == HILBERT:
            return f"PolishPresentation(hilbert, d={self.dimension})"
        return f"PolishPresentation({self.mode})"

    def __hash__(self):
        return hash((self.mode, self.points, self.dimension, self.gdelta))

    def __eq__(self, other):
        if not isinstance(other, PolishPresentation):
            return NotImplemented
        return (self.mode, self.points, self.dimension, self.gdelta) == (
            other.mode, other.points, other.dimension, other.gdelta)


def basis_enumerate(space: PolishPresentation, k: int) -> list[BasisBall]:
    if k < 0:
        raise SpaceError("k must be non-negative")
    return [space.ball(i) for i in range(k)]


# Fixed enumeration orders.  Index stability across runs depends on these.
#
# complex-rational and hilbert-fragment: stage s = 1, 2, ... lists every ball
# with centre coordinates of denominator <= s and absolute value <= s (inside
# [0, 1] for hilbert) and radius 1/m for m <= s that no earlier stage listed,
# sorted by (m, max |coordinate|, common denominator, coordinates).  Index 0 of
# complex-rational is the unit ball at the origin.
#
# finite-discrete: rounds m = 0, 1, ...; round m lists ball(p, D / 2^m) for
# each point p in list order, D = 1 + sum of coordinate spans.
#
# naturals-discrete: ball j is centre a, radius (b + 1)/2 where (a, b) is the
# j-th pair in the Cantor enumeration ordered by a + b then a.

def _grid(s: int, lo: Fraction | None) -> list[Fraction]:
    vals = set()
    for q in range(1, s + 1):
        if lo is None:
            rng = range(-s * q, s * q + 1)
        else:
            rng = range(0, q + 1)
        for p in rng:
            vals.add(Fraction(p, q))
    return sorted(vals)


def _lcm_den(coords) -> int:
    from math import lcm
    out = 1
    for c in coords:
        out = lcm(out, c.denominator)
    return out


def _staged(dim: int, unit_cube: bool):
    from itertools import product
    seen = set()
    for s in count(1):
        vals = _grid(s, Fraction(0) if unit_cube else None)
        stage = []
        for coords in product(vals, repeat=dim):
            for m in range(1, s + 1):
                key = (coords, m)
                if key in seen:
                    continue
                seen.add(key)
                stage.append(key)
        stage.sort(key=lambda km: (km[1], max(abs(c) for c in km[0]),
                                   _lcm_den(km[0]), km[0]))
        for coords, m in stage:
            yield RationalPoint(coords), Fraction(1, m)


def _enumerate(space: PolishPresentation):
    if space.mode == COMPLEX:
        yield from _staged(2, unit_cube=False)
    elif space.mode == HILBERT:
        yield from _staged(space.dimension, unit_cube=True)
    elif space.mode == FINITE:
        d = space.dimension
        span = Fraction(1)
        for i in range(d):
            cs = [p.coords[i] for p in space.points]
            span += max(cs) - min(cs)
        for m in count():
            for p in space.points:
                yield p, span / (2 ** m)
    else:
        for total in count():
            for a in range(total + 1):
                b = total - a
                yield RationalPoint((a,)), Fraction(b + 1, 2)


# -- Borel codes ---------------------------------------------------------------

class BorelCode:
    """Finite Borel code over Y^n.  Subclasses: Basic, Compl, UnionFin, Prim."""

    __slots__ = ()

    def __hash__(self):
        # codes are used as cache keys; hash once
        d = self.__dict__
        h = d.get("_h")
        if h is None:
            h = d["_h"] = hash((type(self).__name__,)
                               + tuple(d[f] for f in self.__dataclass_fields__))
        return h


@dataclass(frozen=True)
class Basic(BorelCode):
    """{x⃗ : x_coord ∈ U_index}."""

    index: int
    coord: int = 0

    __hash__ = BorelCode.__hash__


@dataclass(frozen=True)
class Compl(BorelCode):
    code: BorelCode

    __hash__ = BorelCode.__hash__


@dataclass(frozen=True)
class UnionFin(BorelCode):
    codes: tuple = ()

    __hash__ = BorelCode.__hash__

    def __post_init__(self):
        object.__setattr__(self, "codes", tuple(self.codes))


PRIMITIVES = {
    # name: (arity, modes it is defined on or None for all)
    "eq": (2, None),
    "add": (3, (COMPLEX,)),
    "mul": (3, (COMPLEX,)),
    "neg": (2, (COMPLEX,)),
    "conj": (2, (COMPLEX,)),
    "inv": (2, (COMPLEX,)),
}


@dataclass(frozen=True)
class Prim(BorelCode):
    """A primitive closed relation decided in exact arithmetic.

    ``eq``: x_a = x_b.  ``add``/``mul``: x_c = x_a + x_b (resp. *).
    ``neg``/``conj``/``inv``: x_b = -x_a (resp. conjugate, 1/x_a).
    ``args`` lists coordinate positions.
    """

    name: str
    args: tuple

    __hash__ = BorelCode.__hash__

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if self.name not in PRIMITIVES:
            raise SpaceError(f"unknown primitive {self.name!r}")
        if len(self.args) != PRIMITIVES[self.name][0]:
            raise SpaceError(f"primitive {self.name!r} takes {PRIMITIVES[self.name][0]} positions")


def intersection(*codes: BorelCode) -> BorelCode:
    return Compl(UnionFin(tuple(Compl(c) for c in codes)))


def code_arity(code: BorelCode) -> int:
    """1 + the largest coordinate the code mentions (0 for constant codes)."""
    if isinstance(code, Basic):
        return code.coord + 1
    if isinstance(code, Compl):
        return code_arity(code.code)
    if isinstance(code, UnionFin):
        return max((code_arity(c) for c in code.codes), default=0)
    return max(code.args) + 1


def code_depth(code: BorelCode) -> int:
    if isinstance(code, (Basic, Prim)):
        return 1
    if isinstance(code, Compl):
        return 1 + code_depth(code.code)
    return 1 + max((code_depth(c) for c in code.codes), default=0)


def _cx(p: RationalPoint):
    return p.coords[0], p.coords[1]


def complex_op(name: str, *args: RationalPoint) -> RationalPoint | None:
    """Exact complex arithmetic on (re, im) points; None where undefined."""
    if name == "add":
        (a, b), (c, d) = _cx(args[0]), _cx(args[1])
        return RationalPoint((a + c, b + d))
    if name == "mul":
        (a, b), (c, d) = _cx(args[0]), _cx(args[1])
        return RationalPoint((a * c - b * d, a * d + b * c))
    a, b = _cx(args[0])
    if name == "neg":
        return RationalPoint((-a, -b))
    if name == "conj":
        return RationalPoint((a, -b))
    if name == "inv":
        n = a * a + b * b
        if n == 0:
            return None
        return RationalPoint((a / n, -b / n))
    raise SpaceError(f"unknown operation {name!r}")


def _eval_prim(space: PolishPresentation, code: Prim, points: Sequence) -> bool:
    allowed = PRIMITIVES[code.name][1]
    if allowed is not None and space.mode not in allowed:
        raise SpaceError(f"primitive {code.name!r} is not defined on {space.mode}")
    xs = [points[i] for i in code.args]
    if code.name == "eq":
        return xs[0] == xs[1]
    if code.name in ("add", "mul"):
        return complex_op(code.name, xs[0], xs[1]) == xs[2]
    return complex_op(code.name, xs[0]) == xs[1]


def eval_borel(space: PolishPresentation, code: BorelCode, points: Sequence) -> bool:
    """Decide ``points ∈ code`` (complements are taken relative to Y^n)."""
    points = tuple(points)
    if isinstance(code, Basic):
        if code.coord >= len(points):
            raise SpaceError(f"code mentions coordinate {code.coord} of a {len(points)}-tuple")
        if code.index < 0:
            raise SpaceError(f"invalid ball index {code.index}")
        pt = points[code.coord]
        memo = space._cache.setdefault("member", {})
        key = (pt, code.index)
        hit = memo.get(key)
        if hit is None:
            hit = memo[key] = ball_membership(space, pt, space.ball(code.index))
        return hit
    if isinstance(code, Compl):
        return not eval_borel(space, code.code, points)
    if isinstance(code, UnionFin):
        return any(eval_borel(space, c, points) for c in code.codes)
    if isinstance(code, Prim):
        if max(code.args) >= len(points):
            raise SpaceError(f"primitive mentions coordinate {max(code.args)} "
                             f"of a {len(points)}-tuple")
        return _eval_prim(space, code, points)
    raise TypeError(f"not a Borel code: {code!r}")


def singleton_code(space: PolishPresentation, p: RationalPoint, coord: int = 0,
                   limit: int = 20000) -> BorelCode:
    """A basic code whose ball meets Y exactly in {p} (discrete spaces only)."""
    if not space.is_discrete:
        raise SpaceError("singleton codes exist only for discrete presentations")
    for i in range(limit):
        pts = space.ball_points(i)
        if pts == frozenset([p]):
            return Basic(i, coord)
    raise SpaceError(f"no ball below {limit} isolates {p!r}")


def set_code(space: PolishPresentation, tuples: Iterable[Sequence]) -> BorelCode:
    """Code for a finite subset of Y^n of a discrete space: a union of
    intersections of singleton balls."""
    parts = []
    for tup in tuples:
        parts.append(intersection(*[singleton_code(space, p, i) for i, p in enumerate(tup)]))
    return UnionFin(tuple(parts))


def diagonal_code(space: PolishPresentation) -> BorelCode:
    """Equality on Y^2: a finite code on finite spaces, ``Prim('eq')`` otherwise."""
    if space.mode == FINITE:
        return set_code(space, [(p, p) for p in space.points])
    return Prim("eq", (0, 1))
