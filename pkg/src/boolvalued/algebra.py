"""Finite complete Boolean algebras, their Stone spaces, and regular-open
completions of finite posets.

A finite complete Boolean algebra is the powerset of its atoms, so elements are
stored as bit masks over the atom sequence.  Bit ``i`` set means atom ``i`` is a
member.  Equality of elements is therefore structural.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Hashable, Iterable, Sequence

DEFAULT_MAX_ATOMS = 16


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class BooleanAlgebra:
    """The powerset algebra on ``atoms``; 0 is the empty set, 1 the full set."""

    atoms: tuple
    max_atoms: int = field(default=DEFAULT_MAX_ATOMS, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if not self.atoms:
            raise AlgebraError("a Boolean algebra needs at least one atom")
        if len(set(self.atoms)) != len(self.atoms):
            raise AlgebraError(f"duplicate atom names in {list(self.atoms)}")
        if len(self.atoms) > self.max_atoms:
            raise AlgebraError(
                f"{len(self.atoms)} atoms exceeds the bound {self.max_atoms}")

    def __len__(self):
        # number of elements, not atoms
        return 1 << len(self.atoms)

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @cached_property
    def full_mask(self) -> int:
        return (1 << len(self.atoms)) - 1

    @cached_property
    def _index(self) -> dict:
        return {a: i for i, a in enumerate(self.atoms)}

    def atom_index(self, atom: Hashable) -> int:
        try:
            return self._index[atom]
        except KeyError:
            raise AlgebraError(f"{atom!r} is not an atom of {self}") from None

    @property
    def zero(self) -> AlgElement:
        return AlgElement(self, 0)

    @property
    def one(self) -> AlgElement:
        return AlgElement(self, self.full_mask)

    def element(self, members: Iterable[Hashable] = ()) -> AlgElement:
        mask = 0
        for a in members:
            mask |= 1 << self.atom_index(a)
        return AlgElement(self, mask)

    def from_mask(self, mask: int) -> AlgElement:
        if mask < 0 or mask > self.full_mask:
            raise AlgebraError(f"mask {mask} out of range for {self}")
        return AlgElement(self, mask)

    def atom(self, atom: Hashable) -> AlgElement:
        return AlgElement(self, 1 << self.atom_index(atom))

    def elements(self) -> list[AlgElement]:
        return [AlgElement(self, m) for m in range(self.full_mask + 1)]

    def atom_elements(self) -> list[AlgElement]:
        return [AlgElement(self, 1 << i) for i in range(len(self.atoms))]

    def __repr__(self):
        return f"BooleanAlgebra({list(self.atoms)!r})"


def make_powerset_algebra(atom_names: Sequence[Hashable],
                          max_atoms: int = DEFAULT_MAX_ATOMS) -> BooleanAlgebra:
    return BooleanAlgebra(tuple(atom_names), max_atoms=max_atoms)


@dataclass(frozen=True)
class AlgElement:
    algebra: BooleanAlgebra
    mask: int

    @property
    def members(self) -> frozenset:
        atoms = self.algebra.atoms
        return frozenset(atoms[i] for i in range(len(atoms)) if self.mask >> i & 1)

    def sorted_members(self) -> list:
        atoms = self.algebra.atoms
        return [atoms[i] for i in range(len(atoms)) if self.mask >> i & 1]

    def _check(self, other: AlgElement):
        if not isinstance(other, AlgElement):
            raise TypeError(f"expected AlgElement, got {type(other).__name__}")
        if other.algebra != self.algebra:
            raise AlgebraError("operands belong to different algebras")

    def __or__(self, other: AlgElement) -> AlgElement:
        self._check(other)
        return AlgElement(self.algebra, self.mask | other.mask)

    def __and__(self, other: AlgElement) -> AlgElement:
        self._check(other)
        return AlgElement(self.algebra, self.mask & other.mask)

    def __invert__(self) -> AlgElement:
        return AlgElement(self.algebra, self.algebra.full_mask & ~self.mask)

    def __sub__(self, other: AlgElement) -> AlgElement:
        return self & ~other

    def __le__(self, other: AlgElement) -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def __ge__(self, other: AlgElement) -> bool:
        return other <= self

    def __lt__(self, other: AlgElement) -> bool:
        return self <= other and self.mask != other.mask

    def __gt__(self, other: AlgElement) -> bool:
        return other < self

    def __contains__(self, atom) -> bool:
        return bool(self.mask >> self.algebra.atom_index(atom) & 1)

    def __bool__(self) -> bool:
        return self.mask != 0

    @property
    def is_zero(self) -> bool:
        return self.mask == 0

    @property
    def is_one(self) -> bool:
        return self.mask == self.algebra.full_mask

    def __repr__(self):
        return "{" + ",".join(map(str, self.sorted_members())) + "}"


def join(x: AlgElement, y: AlgElement) -> AlgElement:
    return x | y


def meet(x: AlgElement, y: AlgElement) -> AlgElement:
    return x & y


def complement(x: AlgElement) -> AlgElement:
    return ~x


def leq(x: AlgElement, y: AlgElement) -> bool:
    return x <= y


def _common_algebra(family: Sequence[AlgElement],
                    algebra: BooleanAlgebra | None) -> BooleanAlgebra:
    if algebra is None:
        if not family:
            raise AlgebraError("empty family needs an explicit algebra")
        algebra = family[0].algebra
    for x in family:
        if x.algebra != algebra:
            raise AlgebraError("operands belong to different algebras")
    return algebra


def sup(family: Iterable[AlgElement],
        algebra: BooleanAlgebra | None = None) -> AlgElement:
    """Least upper bound; ``sup([])`` is 0 (pass ``algebra`` for empty input)."""
    family = list(family)
    algebra = _common_algebra(family, algebra)
    mask = 0
    for x in family:
        mask |= x.mask
    return AlgElement(algebra, mask)


def inf(family: Iterable[AlgElement],
        algebra: BooleanAlgebra | None = None) -> AlgElement:
    family = list(family)
    algebra = _common_algebra(family, algebra)
    mask = algebra.full_mask
    for x in family:
        mask &= x.mask
    return AlgElement(algebra, mask)


def is_antichain(family: Sequence[AlgElement]) -> bool:
    """Pairwise meets are 0.  Repeated 0 entries are harmless."""
    family = list(family)
    if family:
        _common_algebra(family, None)
    return all(x.mask & y.mask == 0 for x, y in combinations(family, 2))


def is_predense(family: Sequence[AlgElement],
                algebra: BooleanAlgebra | None = None) -> bool:
    return sup(family, algebra).is_one


# -- Stone space -------------------------------------------------------------

@dataclass(frozen=True)
class Ultrafilter:
    """A point of St(B).  For finite B every ultrafilter is principal."""

    algebra: BooleanAlgebra
    principal_atom: Hashable

    def __post_init__(self):
        self.algebra.atom_index(self.principal_atom)

    @property
    def index(self) -> int:
        return self.algebra.atom_index(self.principal_atom)

    @property
    def bit(self) -> int:
        return 1 << self.index

    def __contains__(self, element: AlgElement) -> bool:
        if element.algebra != self.algebra:
            raise AlgebraError("element belongs to a different algebra")
        return bool(element.mask & self.bit)

    def meets(self, family: Iterable[AlgElement]) -> bool:
        return any(x in self for x in family)

    def __repr__(self):
        return f"G[{self.principal_atom}]"


def ultrafilters(algebra: BooleanAlgebra) -> list[Ultrafilter]:
    return [Ultrafilter(algebra, a) for a in algebra.atoms]


# -- finite posets and regular-open completions -------------------------------

class PosetError(ValueError):
    pass


@dataclass(frozen=True)
class FinitePoset:
    """A finite partial order.  ``leq`` holds pairs ``(x, y)`` meaning x <= y.

    Reflexive pairs are added automatically; transitivity and antisymmetry are
    checked.  Use :meth:`from_relation` to take a transitive closure first.
    """

    elements: tuple
    leq: frozenset

    def __post_init__(self):
        elements = tuple(self.elements)
        if len(set(elements)) != len(elements):
            raise PosetError("duplicate poset elements")
        pairs = {tuple(p) for p in self.leq}
        known = set(elements)
        for x, y in pairs:
            if x not in known or y not in known:
                raise PosetError(f"pair {(x, y)!r} mentions unknown elements")
        pairs |= {(x, x) for x in elements}
        for x, y in pairs:
            if x != y and (y, x) in pairs:
                raise PosetError(f"antisymmetry fails on {x!r}, {y!r}")
        for x, y in pairs:
            for z in elements:
                if (y, z) in pairs and (x, z) not in pairs:
                    raise PosetError(f"transitivity fails on {x!r} <= {y!r} <= {z!r}")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "leq", frozenset(pairs))

    @classmethod
    def from_relation(cls, elements: Sequence, pairs: Iterable) -> FinitePoset:
        elements = tuple(elements)
        rel = {tuple(p) for p in pairs} | {(x, x) for x in elements}
        changed = True
        while changed:
            changed = False
            for x, y in list(rel):
                for y2, z in list(rel):
                    if y == y2 and (x, z) not in rel:
                        rel.add((x, z))
                        changed = True
        return cls(elements, frozenset(rel))

    @classmethod
    def antichain(cls, elements: Sequence) -> FinitePoset:
        return cls(tuple(elements), frozenset())

    def le(self, x, y) -> bool:
        return (x, y) in self.leq

    def down(self, p) -> frozenset:
        return frozenset(q for q in self.elements if (q, p) in self.leq)

    def up(self, p) -> frozenset:
        return frozenset(q for q in self.elements if (p, q) in self.leq)

    def minimal_elements(self) -> list:
        return [p for p in self.elements
                if all(q == p for q in self.elements if (q, p) in self.leq)]

    def is_down_closed(self, subset: Iterable) -> bool:
        s = set(subset)
        return all(q in s for p in s for q in self.down(p))

    def down_sets(self) -> list[frozenset]:
        """Every down-closed subset, i.e. every open set of the down-set topology."""
        out = []
        elems = self.elements
        for mask in range(1 << len(elems)):
            s = frozenset(elems[i] for i in range(len(elems)) if mask >> i & 1)
            if self.is_down_closed(s):
                out.append(s)
        return out


def intclosure(poset: FinitePoset, subset: Iterable) -> frozenset:
    """Interior of the closure of a down-set in the down-set topology.

    Returns ``{p : every q <= p has some r <= q in subset}``.
    """
    u = frozenset(subset)
    if not poset.is_down_closed(u):
        raise PosetError(f"{set(u)!r} is not downward closed")
    return frozenset(
        p for p in poset.elements
        if all(any(r in u for r in poset.down(q)) for q in poset.down(p)))


@dataclass(frozen=True)
class ROCompletion:
    """RO(P) presented as a powerset algebra on its atoms.

    ``atom_sets[i]`` is the regular-open down-set that atom ``i`` stands for and
    ``embedding`` maps each poset element p to intclosure(down(p)).
    """

    poset: FinitePoset
    algebra: BooleanAlgebra
    atom_sets: tuple
    embedding: dict

    def regular_open(self, x: AlgElement) -> frozenset:
        """The regular-open down-set represented by ``x``."""
        out = frozenset()
        for i, s in enumerate(self.atom_sets):
            if x.mask >> i & 1:
                out |= s
        return intclosure(self.poset, out)

    def to_element(self, regular_open: Iterable) -> AlgElement:
        s = frozenset(regular_open)
        mask = 0
        for i, a in enumerate(self.atom_sets):
            if a <= s:
                mask |= 1 << i
        return AlgElement(self.algebra, mask)

    def __iter__(self):
        # unpacks as (algebra, embedding)
        yield self.algebra
        yield self.embedding


def regular_open_sets(poset: FinitePoset) -> list[frozenset]:
    seen = []
    for d in poset.down_sets():
        r = intclosure(poset, d)
        if r not in seen:
            seen.append(r)
    return seen


def ro_completion(poset: FinitePoset,
                  max_atoms: int = DEFAULT_MAX_ATOMS) -> ROCompletion:
    if not poset.elements:
        raise PosetError("ro_completion needs a nonempty poset")
    ro = regular_open_sets(poset)
    nonempty = [s for s in ro if s]
    atom_sets = [s for s in nonempty if not any(t < s for t in nonempty)]
    order = {p: i for i, p in enumerate(poset.elements)}
    atom_sets.sort(key=lambda s: min(order[p] for p in s))
    if len(ro) != 1 << len(atom_sets):
        raise PosetError("regular-open algebra is not atomic of the expected size")
    algebra = BooleanAlgebra(tuple(range(len(atom_sets))), max_atoms=max_atoms)
    completion = ROCompletion(poset, algebra, tuple(atom_sets), {})
    for p in poset.elements:
        completion.embedding[p] = completion.to_element(
            intclosure(poset, poset.down(p)))
    return completion


def stone_poset(algebra: BooleanAlgebra) -> FinitePoset:
    """St(B) for finite B as a discrete poset on its atoms (every set open)."""
    return FinitePoset.antichain(algebra.atoms)


def ro_isomorphism(poset: FinitePoset):
    """Explicit isomorphism RO(P) ≅ P(min P), checked on every regular open set.

    Returns ``(atom_to_minimal, report)``: atom ``i`` of the completion goes to
    the unique minimal element inside ``atom_sets[i]``, and a regular open U
    to ``U ∩ min P``.
    """
    from .report import Report
    rep = Report("regular-open completion vs powerset of minimal elements")
    ro = ro_completion(poset)
    mins = frozenset(poset.minimal_elements())
    atom_to_min = {}
    for i, s in enumerate(ro.atom_sets):
        inside = s & mins
        if len(inside) == 1:
            atom_to_min[i] = next(iter(inside))
    bijective = (len(atom_to_min) == len(ro.atom_sets)
                 and set(atom_to_min.values()) == mins)
    rep.add("atoms correspond to minimal elements", bijective,
            None if bijective else [sorted(map(repr, s)) for s in ro.atom_sets])
    if not bijective:
        return atom_to_min, rep

    def image(x: AlgElement) -> frozenset:
        return frozenset(atom_to_min[i] for i in range(ro.algebra.n_atoms) if x.mask >> i & 1)

    sets = regular_open_sets(poset)
    rep.add("|RO(P)| = 2^|min P|", len(sets) == 1 << len(mins), len(sets))
    bad = None
    for u in sets:
        x = ro.to_element(u)
        if image(x) != u & mins or ro.regular_open(x) != u:
            bad = sorted(map(repr, u))
            break
    rep.add("U -> U ∩ min P agrees with the atom map", bad is None, bad)

    def neg(u):
        return frozenset(p for p in poset.elements if not (poset.down(p) & u))

    bad = None
    for u in sets:
        for v in sets:
            meet_uv, join_uv = u & v, intclosure(poset, u | v)
            if (intclosure(poset, meet_uv) != meet_uv or meet_uv & mins != (u & mins) & (v & mins)
                    or join_uv & mins != (u | v) & mins):
                bad = (sorted(map(repr, u)), sorted(map(repr, v)))
                break
        if bad is None and neg(u) & mins != mins - u:
            bad = (sorted(map(repr, u)),)
        if bad:
            break
    rep.add("meets, joins and complements are preserved", bad is None, bad)
    bad = None
    for p in poset.elements:
        below = frozenset(m for m in mins if poset.le(m, p))
        if image(ro.embedding[p]) != below:
            bad = p
            break
    rep.add("p maps to the minimal elements below it", bad is None, bad)
    return atom_to_min, rep
