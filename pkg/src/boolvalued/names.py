"""Names for points of Y as assignments of Boolean values to basis balls.

A name gives, for each of the first ``bound`` basis balls U_n, the condition
under which the named point lies in U_n.  Over a finite algebra the names
correspond to functions St(B) -> Y; the translation both ways is exact
relative to a resolution bound and a pool of candidate points.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

from .algebra import AlgElement, BooleanAlgebra, Ultrafilter
from .functions import (
    CPlusFunction, FunctionSpaceStructure, as_point, lift_relation, _relation_mask,
)
from .models import BValuedStructure, MorphismWitness
from .polish import Basic, BorelCode, Compl, PolishPresentation, SpaceError, UnionFin, diagonal_code
from .report import Report


class NameResolutionError(ValueError):
    """Base class for name translation errors."""


class ResolutionError(NameResolutionError):
    pass


class UnrealizableName(NameResolutionError):
    pass


class UnderdeterminedName(NameResolutionError):
    pass


@dataclass(frozen=True)
class BasisAssignment:
    """``masks[n]`` is the atom mask of ⟦σ ∈ U_n⟧ for n < bound."""

    algebra: BooleanAlgebra
    space: PolishPresentation
    bound: int
    masks: tuple

    def __post_init__(self):
        object.__setattr__(self, "masks", tuple(self.masks))
        if self.bound < 0 or len(self.masks) != self.bound:
            raise NameResolutionError("an assignment needs exactly `bound` entries")
        full = self.algebra.full_mask
        for m in self.masks:
            if m & ~full:
                raise NameResolutionError("assignment value outside the algebra")

    @classmethod
    def from_dict(cls, algebra: BooleanAlgebra, space: PolishPresentation, bound: int,
                  assign: Mapping[int, object]) -> BasisAssignment:
        masks = [0] * bound
        for n, v in assign.items():
            n = int(n)
            if not 0 <= n < bound:
                raise NameResolutionError(f"ball index {n} outside the bound {bound}")
            masks[n] = v.mask if isinstance(v, AlgElement) else algebra.element(v).mask
        return cls(algebra, space, bound, tuple(masks))

    def assign(self, n: int) -> AlgElement:
        if not 0 <= n < self.bound:
            raise NameResolutionError(f"ball index {n} outside the bound {self.bound}")
        return AlgElement(self.algebra, self.masks[n])

    def as_dict(self) -> dict:
        return {n: self.assign(n) for n in range(self.bound) if self.masks[n]}

    def to_json(self) -> dict:
        from .serialize import name_to_json
        return name_to_json(self)

    def __repr__(self):
        return f"BasisAssignment(bound={self.bound}, {self.as_dict()!r})"


def adequate(space: PolishPresentation, points: Sequence, k: int) -> str | None:
    """None if the first k balls cover and strongly separate ``points``,
    else a description of the first failure."""
    pts = list(dict.fromkeys(points))
    bits = [space.ball_bits(p, k) for p in pts]
    for p, (op, _) in zip(pts, bits):
        if not op:
            return f"no ball below {k} contains {p!r}"
    for i in range(len(pts)):
        oi, ci = bits[i]
        for j in range(i + 1, len(pts)):
            oj, cj = bits[j]
            if not (oi & ~cj or oj & ~ci):
                return f"no ball below {k} separates {pts[i]!r} and {pts[j]!r}"
    return None


def _name_masks(f: CPlusFunction, k: int) -> tuple:
    out = [0] * k
    for i, v in enumerate(f.values):
        op, _ = f.space.ball_bits(v, k)
        for n in range(k):
            if op >> n & 1:
                out[n] |= 1 << i
    return tuple(out)


def name_from_function(f: CPlusFunction, k: int, check: bool = True) -> BasisAssignment:
    """⟦τ_f ∈ U_n⟧ = {a : f(a) ∈ U_n} for n < k.

    With ``check`` the first k balls must cover and separate the values of f.
    """
    if k < 0:
        raise ResolutionError("resolution bound must be non-negative")
    if check:
        problem = adequate(f.space, f.values, k)
        if problem:
            raise ResolutionError(f"{problem}; increase resolution")
    return BasisAssignment(f.algebra, f.space, k, _name_masks(f, k))


def survivors(tau: BasisAssignment, atom_index: int, candidates: Sequence) -> list:
    """Candidates consistent with the name at one atom: inside Cl(U_n) whenever
    the atom is in ⟦τ ∈ U_n⟧, outside U_m whenever it is not."""
    Y, k = tau.space, tau.bound
    bit = 1 << atom_index
    inside = 0
    for n, m in enumerate(tau.masks):
        if m & bit:
            inside |= 1 << n
    out = []
    for c in candidates:
        if not Y.contains(c):
            continue
        op, cl = Y.ball_bits(c, k)
        if inside & ~cl == 0 and op & ~inside == 0:
            out.append(c)
    return out


def function_from_name(tau: BasisAssignment, candidates: Sequence) -> CPlusFunction:
    """Resolve the name atom by atom against a candidate pool."""
    cands = list(dict.fromkeys(as_point(c) for c in candidates))
    if not cands:
        raise NameResolutionError("the candidate pool is empty")
    values = []
    for i, a in enumerate(tau.algebra.atoms):
        s = survivors(tau, i, cands)
        if not s:
            raise UnrealizableName(f"unrealizable name: no candidate survives at atom {a!r}")
        if len(s) > 1:
            raise UnderdeterminedName(
                f"under-determined name: {len(s)} candidates survive at atom {a!r} "
                f"({s[0]!r}, {s[1]!r}, ...)")
        values.append(s[0])
    return CPlusFunction(tau.algebra, tau.space, tuple(values))


def check_name_coherence(tau: BasisAssignment) -> Report:
    """Monotonicity along closure inclusions, covering, and disjointness."""
    Y, k, masks = tau.space, tau.bound, tau.masks
    rep = Report("name coherence")
    mono = disj = None
    for m in range(k):
        for n in range(k):
            if m == n:
                continue
            if mono is None and masks[m] & ~masks[n] and Y.closure_subset(m, n):
                mono = {"inner": m, "outer": n,
                        "atoms": AlgElement(tau.algebra, masks[m] & ~masks[n])}
            if disj is None and m < n and masks[m] & masks[n] and Y.closures_disjoint(m, n):
                disj = {"balls": [m, n], "atoms": AlgElement(tau.algebra, masks[m] & masks[n])}
    cover = 0
    for m in masks:
        cover |= m
    missing = tau.algebra.full_mask & ~cover
    rep.add("monotone along closure inclusion", mono is None, mono)
    rep.add("covering", not missing, AlgElement(tau.algebra, missing) if missing else None)
    rep.add("disjoint balls get disjoint values", disj is None, disj)
    return rep


# -- relations evaluated on names ------------------------------------------------------

def _on_names(code: BorelCode, names: tuple, candidates: Sequence, realized: dict) -> int:
    if isinstance(code, Basic):
        if code.coord >= len(names):
            raise SpaceError(f"code mentions coordinate {code.coord} of a {len(names)}-tuple")
        tau = names[code.coord]
        if code.index < tau.bound:
            return tau.masks[code.index]
    elif isinstance(code, Compl):
        return names[0].algebra.full_mask & ~_on_names(code.code, names, candidates, realized)
    elif isinstance(code, UnionFin):
        out = 0
        for c in code.codes:
            out |= _on_names(c, names, candidates, realized)
        return out
    # primitive relations and balls beyond the resolution: resolve the names
    if None not in realized:
        realized[None] = tuple(dict.fromkeys(as_point(c) for c in candidates))
    candidates = realized[None]
    fs = []
    for tau in names:
        if tau not in realized:
            realized[tau] = function_from_name(tau, candidates)
        fs.append(realized[tau])
    return _relation_mask(names[0].space, code, fs)


def lift_relation_on_names(code: BorelCode, *names: BasisAssignment,
                           candidates: Sequence = ()) -> AlgElement:
    """R^B on names.

    Basic balls within the resolution read the assignment directly; Boolean
    combinations are taken in B; anything else is evaluated on the functions
    the names resolve to over ``candidates``.
    """
    if not names:
        raise NameResolutionError("need at least one name")
    B, Y = names[0].algebra, names[0].space
    for t in names:
        if t.algebra != B or t.space != Y:
            raise NameResolutionError("names over different algebras or spaces")
    # candidates are normalised lazily: most codes never need them
    return AlgElement(B, _on_names(code, tuple(names), list(candidates), {}))


def predicate_preservation_report(code: BorelCode, fs: Sequence[CPlusFunction], k: int,
                                  candidates: Sequence = ()) -> Report:
    """Both routes for a Borel relation: on functions, and on their names."""
    names = [name_from_function(f, k) for f in fs]
    cands = list(candidates) + [v for f in fs for v in f.values]
    lhs = lift_relation(code, *fs)
    rhs = lift_relation_on_names(code, *names, candidates=cands)
    rep = Report("predicate preservation")
    rep.add("lifted on functions = lifted on names", lhs == rhs,
            None if lhs == rhs else {"functions": lhs, "names": rhs})
    rep.data.update(value=lhs)
    return rep


# -- the two quotients -----------------------------------------------------------------

def quotient_equivalence_check(carrier: Sequence[CPlusFunction], G: Ultrafilter,
                               default=None) -> Report:
    """Restrict each f to a ball condition a_m ∈ G (f̃ = f on a_m, the default
    elsewhere) and check f̃ ≡_G f, and that ≡_G is the same on both sides."""
    rep = Report("quotient equivalence")
    carrier = list(carrier)
    if not carrier:
        rep.add("empty carrier", True, None, "vacuous")
        return rep
    B, Y = carrier[0].algebra, carrier[0].space
    if G.algebra != B:
        raise NameResolutionError("ultrafilter over a different algebra")
    d = Y.base_point if default is None else as_point(default)
    diag = diagonal_code(Y)
    restricted = []
    bad = None
    for f in carrier:
        m = Y.containing_index(f.values[G.index])
        a_m = 0
        for i, v in enumerate(f.values):
            if Y.ball(m).contains(v):
                a_m |= 1 << i
        ft = CPlusFunction(B, Y, tuple(v if a_m >> i & 1 else d for i, v in enumerate(f.values)))
        restricted.append(ft)
        same = lift_relation(diag, f, ft)
        if bad is None and not (same.mask & G.bit and a_m & ~same.mask == 0):
            bad = {"function": f, "ball": m}
    rep.add("restriction is G-equivalent to the original", bad is None, bad)
    bad = None
    for i in range(len(carrier)):
        for j in range(i + 1, len(carrier)):
            a = bool(lift_relation(diag, carrier[i], carrier[j]).mask & G.bit)
            b = bool(lift_relation(diag, restricted[i], restricted[j]).mask & G.bit)
            if a != b and bad is None:
                bad = [carrier[i], carrier[j]]
    rep.add("G-classes coincide", bad is None, bad)
    return rep


# -- the structure of names ------------------------------------------------------------

def names_structure(S: FunctionSpaceStructure, k: int) -> tuple[BValuedStructure, MorphismWitness]:
    """Names of S's domain as a table-backed B-valued model, with all values
    computed through :func:`lift_relation_on_names`, and the witness f -> τ_f."""
    taus = [name_from_function(f, k) for f in S.domain]
    if len(set(taus)) != len(taus):
        raise ResolutionError("two carrier functions share a name; increase resolution")
    cands = tuple(dict.fromkeys(v for f in S.domain for v in f.values))
    n = len(taus)
    B = S.algebra
    realized: dict = {}

    def value(code, tup):
        return _on_names(code, tup, cands, realized)

    diag = S.eq_code
    eq = [[value(diag, (taus[i], taus[j])) for j in range(n)] for i in range(n)]
    rel = {}
    for name, arity in S.sig.relations:
        code = S.relation_codes[name]
        rel[name] = {tup: value(code, tuple(taus[i] for i in tup))
                     for tup in product(range(n), repeat=arity)}
    fun = {}
    for name, arity in S.sig.functions:
        code = S.function_codes[name]
        fun[name] = {tup: [value(code, tuple(taus[i] for i in tup) + (taus[j],))
                           for j in range(n)]
                     for tup in product(range(n), repeat=arity)}
    N = BValuedStructure(B, S.sig, taus, eq, rel, fun)
    w = MorphismWitness({a: B.atom(a) for a in B.atoms},
                        frozenset(zip(S.domain, taus)))
    return N, w


__all__ = [
    "BasisAssignment", "NameResolutionError", "ResolutionError", "UnderdeterminedName",
    "UnrealizableName", "adequate", "check_name_coherence", "function_from_name",
    "lift_relation_on_names", "name_from_function", "names_structure",
    "predicate_preservation_report", "quotient_equivalence_check", "survivors",
]
