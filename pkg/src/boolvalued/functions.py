"""Functions from a finite Stone space into a desk-scale Polish space, and the
B-valued structures they form.

On a finite Stone space every subset is clopen and the only nowhere dense set
is the empty one, so the extended function space coincides with the plain
continuous one: a function is just a choice of point of Y per atom, and lifted
predicates are computed pointwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Mapping, Sequence

from .algebra import (
    AlgElement, BooleanAlgebra, Ultrafilter, intclosure, is_antichain, make_powerset_algebra,
    stone_poset,
)
from .models import BValuedStructure, FirstOrderStructure, MorphismWitness, StructureError
from .polish import (
    COMPLEX, FINITE, INFINITY, BorelCode, PolishPresentation, RationalPoint, SpaceError,
    code_arity, complex_op, diagonal_code, eval_borel, point,
)
from .syntax import Signature

DEFAULT_CENTER_BOUND = 32
DEFAULT_MAX_CARRIER = 512


class FunctionSpaceError(ValueError):
    pass


def as_point(x) -> RationalPoint:
    if isinstance(x, RationalPoint):
        return x
    if x is INFINITY:
        raise FunctionSpaceError("the point at infinity is not a value of Y")
    if isinstance(x, (tuple, list)):
        return point(*x)
    return point(x)


@dataclass(frozen=True)
class CPlusFunction:
    """A function St(B) -> Y given by its value at each atom (in atom order).

    Equality is extensional: same algebra, same space, same values.
    """

    algebra: BooleanAlgebra
    space: PolishPresentation
    values: tuple

    def __call__(self, atom) -> RationalPoint:
        return self.values[self.algebra.atom_index(atom)]

    def at(self, i: int) -> RationalPoint:
        return self.values[i]

    def as_dict(self) -> dict:
        return dict(zip(self.algebra.atoms, self.values))

    @property
    def is_constant(self) -> bool:
        return len(set(self.values)) == 1

    def to_json(self) -> dict:
        from .serialize import function_to_json
        return function_to_json(self)

    def __repr__(self):
        body = ", ".join(f"{a}: {v!r}" for a, v in zip(self.algebra.atoms, self.values))
        return "{" + body + "}"


def make_function(algebra: BooleanAlgebra, space: PolishPresentation,
                  values: Mapping) -> CPlusFunction:
    """Build a function from an ``atom -> point`` mapping.

    The value INFINITY is refused: its preimage would be a nonempty open set.
    """
    out = []
    for a in algebra.atoms:
        if a not in values:
            raise FunctionSpaceError(f"no value given at atom {a!r}")
        v = values[a]
        if v is INFINITY:
            raise FunctionSpaceError(
                f"value at atom {a!r} is INFINITY; on a finite Stone space the preimage "
                "of INFINITY must be empty")
        p = as_point(v)
        if not space.contains(p):
            raise FunctionSpaceError(f"value {p!r} at atom {a!r} is not a point of {space!r}")
        out.append(p)
    extra = set(values) - set(algebra.atoms)
    if extra:
        raise FunctionSpaceError(f"values given for unknown atoms {sorted(map(repr, extra))}")
    return CPlusFunction(algebra, space, tuple(out))


def constant(algebra: BooleanAlgebra, space: PolishPresentation, y) -> CPlusFunction:
    return make_function(algebra, space, {a: y for a in algebra.atoms})


def _same_frame(fs: Sequence[CPlusFunction]):
    if not fs:
        return None, None
    B, Y = fs[0].algebra, fs[0].space
    for f in fs[1:]:
        if f.algebra != B or f.space != Y:
            raise FunctionSpaceError("functions live over different algebras or spaces")
    return B, Y


def _relation_mask(space, code, fs, cache=None) -> int:
    n_atoms = fs[0].algebra.n_atoms
    mask = 0
    for i in range(n_atoms):
        pts = tuple(f.values[i] for f in fs)
        if cache is None:
            hit = eval_borel(space, code, pts)
        else:
            key = (code, pts)
            hit = cache.get(key)
            if hit is None:
                hit = cache[key] = eval_borel(space, code, pts)
        if hit:
            mask |= 1 << i
    return mask


_stone = lru_cache(maxsize=64)(stone_poset)


@lru_cache(maxsize=4096)
def _regularised(B: BooleanAlgebra, mask: int) -> bool:
    pointwise = frozenset(a for i, a in enumerate(B.atoms) if mask >> i & 1)
    return intclosure(_stone(B), pointwise) == pointwise


def lift_relation(code: BorelCode, *fs: CPlusFunction) -> AlgElement:
    """The atoms at which the Borel relation holds of the values of ``fs``."""
    if not fs:
        raise FunctionSpaceError("lift_relation needs at least one function")
    B, Y = _same_frame(fs)
    if code_arity(code) > len(fs):
        raise FunctionSpaceError(
            f"code mentions coordinate {code_arity(code) - 1} but {len(fs)} functions given")
    mask = _relation_mask(Y, code, fs)
    # regularisation on the discrete Stone space changes nothing
    assert _regularised(B, mask)
    return AlgElement(B, mask)


def graph_candidates(space: PolishPresentation, args: Sequence[RationalPoint],
                     center_bound: int = DEFAULT_CENTER_BOUND,
                     extra: Sequence[RationalPoint] = ()) -> list[RationalPoint]:
    """Finite set of possible outputs of a lifted function at one atom.

    The argument values, the first ``center_bound`` ball centres, every point
    of a finite space, and (complex mode) results of arithmetic of depth <= 2
    on the arguments.
    """
    found = dict.fromkeys(args)
    found.update(dict.fromkeys(extra))
    if space.mode == FINITE:
        found.update(dict.fromkeys(space.points))
    for i in range(center_bound):
        found.setdefault(space.ball(i).center)
    if space.mode == COMPLEX:
        level = list(dict.fromkeys(args))
        for _ in range(2):
            new = dict.fromkeys(level)
            for x in level:
                for op in ("neg", "conj", "inv"):
                    y = complex_op(op, x)
                    if y is not None:
                        new.setdefault(y)
            for x, y in product(level, repeat=2):
                new.setdefault(complex_op("add", x, y))
                new.setdefault(complex_op("mul", x, y))
            level = list(new)
        found.update(dict.fromkeys(level))
    return [p for p in found if space.contains(p)]


def _graph_value(space, code, args, cache, center_bound, extra=()):
    key = ("graph", code, args)
    if cache is not None and key in cache:
        return cache[key]
    hits = [y for y in graph_candidates(space, args, center_bound, extra)
            if eval_borel(space, code, tuple(args) + (y,))]
    if len(hits) != 1:
        out = FunctionSpaceError(
            f"non-functional graph at arguments {list(args)!r}: "
            + ("no candidate value" if not hits else f"{len(hits)} candidate values"))
    else:
        out = hits[0]
    if cache is not None:
        cache[key] = out
    return out


def lift_function(code: BorelCode, *fs: CPlusFunction,
                  center_bound: int = DEFAULT_CENTER_BOUND,
                  extra_candidates: Sequence = (), _cache: dict | None = None) -> CPlusFunction:
    """Lift the function whose graph (a subset of Y^(n+1)) is ``code``.

    At each atom exactly one candidate output must satisfy the graph.
    """
    if not fs:
        raise FunctionSpaceError("nullary functions: pass the constant instead")
    B, Y = _same_frame(fs)
    if code_arity(code) > len(fs) + 1:
        raise FunctionSpaceError("graph code mentions too many coordinates")
    extra = tuple(as_point(p) for p in extra_candidates)
    out = []
    for i, a in enumerate(B.atoms):
        args = tuple(f.values[i] for f in fs)
        v = _graph_value(Y, code, args, _cache, center_bound, extra)
        if isinstance(v, FunctionSpaceError):
            raise FunctionSpaceError(f"at atom {a!r}: {v}")
        out.append(v)
    return CPlusFunction(B, Y, tuple(out))


def mix(antichain: Sequence[AlgElement], fs: Sequence[CPlusFunction], default=None,
        algebra: BooleanAlgebra | None = None,
        space: PolishPresentation | None = None) -> CPlusFunction:
    """Glue ``fs[k]`` on the atoms of ``antichain[k]``; ``default`` elsewhere.

    ``default`` falls back to the space's base point (the origin for the
    complex plane).
    """
    antichain, fs = list(antichain), list(fs)
    if len(antichain) != len(fs):
        raise FunctionSpaceError("antichain and function family differ in length")
    if not is_antichain(antichain):
        raise FunctionSpaceError("the conditions are not pairwise disjoint")
    B, Y = _same_frame(fs)
    B = B or algebra or (antichain[0].algebra if antichain else None)
    Y = Y or space
    if B is None or Y is None:
        raise FunctionSpaceError("an empty family needs the algebra and space")
    for c in antichain:
        if c.algebra != B:
            raise FunctionSpaceError("condition from a different algebra")
    d = Y.base_point if default is None else as_point(default)
    if not Y.contains(d):
        raise FunctionSpaceError(f"default {d!r} is not a point of Y")
    values = [d] * B.n_atoms
    for c, f in zip(antichain, fs):
        for i in range(B.n_atoms):
            if c.mask >> i & 1:
                values[i] = f.values[i]
    return CPlusFunction(B, Y, tuple(values))


# -- the structure of functions ------------------------------------------------------

class FunctionSpaceStructure(BValuedStructure):
    """Computed view: equality, relations and functions are lifted pointwise.

    The domain is the given carrier closed under mixing (every function whose
    value at each atom is some carrier value there) and under the function
    symbols, capped at ``max_carrier`` elements.  Given carrier elements come
    first, in their order.
    """

    def __init__(self, algebra: BooleanAlgebra, space: PolishPresentation, sig: Signature,
                 relation_codes: Mapping[str, BorelCode] | None = None,
                 function_codes: Mapping[str, BorelCode] | None = None,
                 carrier: Sequence[CPlusFunction] = (),
                 max_carrier: int = DEFAULT_MAX_CARRIER,
                 center_bound: int = DEFAULT_CENTER_BOUND):
        self.space = space
        self.relation_codes = dict(relation_codes or {})
        self.function_codes = dict(function_codes or {})
        self.center_bound = center_bound
        self._cache: dict = {}
        self.eq_code = diagonal_code(space)
        for name, _ in sig.relations:
            if name not in self.relation_codes:
                raise StructureError(f"no Borel code for relation {name!r}")
        for name, _ in sig.functions:
            if name not in self.function_codes:
                raise StructureError(f"no graph code for function {name!r}")
        base = list(dict.fromkeys(carrier))
        if not base:
            raise StructureError("the carrier must be non-empty")
        for f in base:
            if f.algebra != algebra or f.space != space:
                raise StructureError("carrier function over a different algebra or space")
        self.base_carrier = tuple(base)
        domain = self._close(algebra, sig, base, max_carrier)
        super().__init__(algebra, sig, domain, mixer=self._mix_pieces)
        self._by_values = {f.values: i for i, f in enumerate(self.domain)}
        self._eq_rows: dict = {}
        self._rel_masks: dict = {}
        self._fun_rows: dict = {}

    def _close(self, B, sig, base, limit):
        n = B.n_atoms
        per_atom = [list(dict.fromkeys(f.values[i] for f in base)) for i in range(n)]
        while True:
            size = 1
            for vs in per_atom:
                size *= len(vs)
            if size > limit:
                raise StructureError(
                    f"mixing closure of the carrier has {size} elements, above the bound {limit}")
            grew = False
            for name, arity in sig.functions:
                code = self.function_codes[name]
                for i in range(n):
                    for args in product(per_atom[i], repeat=arity):
                        if arity == 0:
                            raise StructureError("constants: put the constant function in "
                                                 "the carrier and use a relation instead")
                        y = _graph_value(self.space, code, args, self._cache, self.center_bound)
                        if isinstance(y, FunctionSpaceError):
                            raise StructureError(f"{name} at atom {B.atoms[i]!r}: {y}")
                        if y not in per_atom[i]:
                            per_atom[i].append(y)
                            grew = True
            if not grew:
                break
        domain = list(base)
        seen = {f.values for f in base}
        for vals in product(*per_atom):
            if vals not in seen:
                seen.add(vals)
                domain.append(CPlusFunction(B, self.space, vals))
        return domain

    # -- computed tables ---------------------------------------------------------
    def _pointwise(self, code, fs) -> int:
        return _relation_mask(self.space, code, fs, self._cache)

    def eq_mask(self, i, j):
        return self.eq_row(i)[j]

    def eq_row(self, i):
        row = self._eq_rows.get(i)
        if row is None:
            f = self.domain[i]
            row = self._eq_rows[i] = [self._pointwise(self.eq_code, (f, g)) for g in self.domain]
        return row

    def rel_mask(self, name, idxs):
        key = (name, idxs)
        m = self._rel_masks.get(key)
        if m is None:
            m = self._rel_masks[key] = self._pointwise(
                self.relation_codes[name], tuple(self.domain[i] for i in idxs))
        return m

    def fun_row(self, name, idxs):
        key = (name, idxs)
        row = self._fun_rows.get(key)
        if row is None:
            g = lift_function(self.function_codes[name], *(self.domain[i] for i in idxs),
                              center_bound=self.center_bound, _cache=self._cache)
            row = self._fun_rows[key] = self.eq_row(self._by_values[g.values])
        return row

    def index_of_function(self, f: CPlusFunction) -> int:
        try:
            return self._by_values[f.values]
        except KeyError:
            raise StructureError(f"{f!r} is not in the carrier") from None

    def parameters(self):
        return list(self.base_carrier)

    def _mix_pieces(self, pieces):
        d = self.space.base_point
        vals = [d] * self.algebra.n_atoms
        for mask, idx in pieces:
            f = self.domain[idx]
            for i in range(self.algebra.n_atoms):
                if mask >> i & 1:
                    vals[i] = f.values[i]
        return self.index_of_function(CPlusFunction(self.algebra, self.space, tuple(vals)))

    def mix(self, antichain, fs, default=None) -> CPlusFunction:
        return mix(antichain, fs, default, self.algebra, self.space)


def as_bvalued_structure(algebra: BooleanAlgebra, space: PolishPresentation, sig: Signature,
                         relation_codes: Mapping[str, BorelCode] | None = None,
                         function_codes: Mapping[str, BorelCode] | None = None,
                         carrier: Sequence[CPlusFunction] = (),
                         max_carrier: int = DEFAULT_MAX_CARRIER,
                         center_bound: int = DEFAULT_CENTER_BOUND) -> FunctionSpaceStructure:
    return FunctionSpaceStructure(algebra, space, sig, relation_codes, function_codes,
                                  carrier, max_carrier, center_bound)


def constants_carrier(algebra: BooleanAlgebra, space: PolishPresentation,
                      points: Sequence) -> list[CPlusFunction]:
    return [constant(algebra, space, p) for p in points]


def constant_embedding(S: FunctionSpaceStructure, points: Sequence | None = None):
    """Y (restricted to ``points``) as a 2-valued structure, and the witness
    ``x -> c_x`` into S.  Default points: values of constants in S's domain."""
    if points is None:
        points = [f.values[0] for f in S.domain if f.is_constant]
    points = [as_point(p) for p in points]
    trivial = make_powerset_algebra(["*"])
    Yc = FunctionSpaceStructure(trivial, S.space, S.sig, S.relation_codes, S.function_codes,
                                constants_carrier(trivial, S.space, points),
                                center_bound=S.center_bound)
    pairs = set()
    for f in Yc.domain:
        image = constant(S.algebra, S.space, f.values[0])
        S.index_of_function(image)
        pairs.add((f, image))
    hom = {"*": S.algebra.one}
    return Yc, MorphismWitness(hom, frozenset(pairs))


# -- germs ---------------------------------------------------------------------------

@dataclass
class GermStructure:
    """Germs of carrier functions at the ultrafilter ``point``.

    ``germs`` lists the lowest-index carrier function of each class;
    ``value`` maps each germ to its value at the ultrafilter's atom.
    """

    point: Ultrafilter
    sig: Signature
    germs: tuple
    class_of: dict
    value: dict
    relations: dict
    functions: dict = field(default_factory=dict)

    def to_first_order(self) -> FirstOrderStructure:
        return FirstOrderStructure(self.sig, self.germs, dict(self.relations),
                                   dict(self.functions), dict(self.class_of))

    def value_isomorphism_report(self, S: FunctionSpaceStructure):
        """Check that [f] -> f(atom) is an isomorphism onto the value set in Y."""
        from .report import Report
        rep = Report("germs versus values")
        vals = [self.value[g] for g in self.germs]
        rep.add("germ -> value is injective", len(set(vals)) == len(vals))
        bad = None
        for name, arity in self.sig.relations:
            code = S.relation_codes[name]
            for tup in product(self.germs, repeat=arity):
                lhs = tup in self.relations[name]
                rhs = eval_borel(S.space, code, tuple(self.value[g] for g in tup))
                if lhs != rhs:
                    bad = (name, [self.value[g] for g in tup])
                    break
        rep.add("relations agree with Y on values", bad is None, bad)
        bad = None
        for name, arity in self.sig.functions:
            code = S.function_codes[name]
            for tup in product(self.germs, repeat=arity):
                out = self.value[self.functions[name][tup]]
                if not eval_borel(S.space, code, tuple(self.value[g] for g in tup) + (out,)):
                    bad = (name, [self.value[g] for g in tup])
                    break
        rep.add("functions agree with Y on values", bad is None, bad)
        return rep


def germ_quotient(S: FunctionSpaceStructure, p: Ultrafilter) -> GermStructure:
    """Germ classes at ``p`` computed directly from values at p's atom."""
    if p.algebra != S.algebra:
        raise StructureError("ultrafilter over a different algebra")
    i = p.index
    first_with_value: dict = {}
    class_of = {}
    for f in S.domain:
        v = f.values[i]
        rep = first_with_value.setdefault(v, f)
        class_of[f] = rep
    germs = tuple(first_with_value.values())
    value = {g: g.values[i] for g in germs}
    relations = {}
    for name, arity in S.sig.relations:
        code = S.relation_codes[name]
        relations[name] = frozenset(
            tup for tup in product(germs, repeat=arity)
            if eval_borel(S.space, code, tuple(value[g] for g in tup)))
    functions = {}
    for name, arity in S.sig.functions:
        code = S.function_codes[name]
        table = {}
        for tup in product(germs, repeat=arity):
            y = _graph_value(S.space, code, tuple(value[g] for g in tup), None, S.center_bound)
            if isinstance(y, FunctionSpaceError):
                raise StructureError(str(y))
            if y not in first_with_value:
                raise StructureError(f"{name} leaves the carrier at {p!r}")
            table[tup] = first_with_value[y]
        functions[name] = table
    return GermStructure(p, S.sig, germs, class_of, value, relations, functions)


def germs_match_quotient(S: FunctionSpaceStructure, p: Ultrafilter) -> bool:
    """Cross-check: the germ structure equals the generic quotient M/p."""
    from .models import quotient
    return quotient(S, p).same_as(germ_quotient(S, p).to_first_order())


__all__ = [
    "CPlusFunction", "FunctionSpaceError", "FunctionSpaceStructure", "GermStructure",
    "as_bvalued_structure", "as_point", "constant", "constant_embedding", "constants_carrier",
    "germ_quotient", "germs_match_quotient", "graph_candidates", "lift_function",
    "lift_relation", "make_function", "mix", "SpaceError",
]
