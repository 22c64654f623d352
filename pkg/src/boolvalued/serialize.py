"""JSON encodings for algebras, posets, structures, spaces, codes, functions
and names.

Rationals are strings ``"p/q"``; a point of dimension one may be written as a
bare rational, otherwise as a list.  Atom sets are lists of atoms.  Table keys
join domain elements with commas.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .algebra import AlgElement, BooleanAlgebra, FinitePoset, Ultrafilter
from .polish import (
    FINITE, HILBERT, Basic, BasisBall, BorelCode, Compl, PolishPresentation, Prim,
    RationalPoint, UnionFin, to_fraction,
)
from .syntax import Signature


class FormatError(ValueError):
    pass


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def dumps(obj: Any) -> str:
    """Canonical rendering: sorted keys, fixed separators."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def _need(data, key, where):
    if not isinstance(data, dict) or key not in data:
        raise FormatError(f"{where}: missing key {key!r}")
    return data[key]


# -- algebras and posets -----------------------------------------------------------

def algebra_to_json(B: BooleanAlgebra) -> dict:
    return {"atoms": list(B.atoms)}


def algebra_from_json(data) -> BooleanAlgebra:
    atoms = _need(data, "atoms", "algebra")
    if not isinstance(atoms, list):
        raise FormatError("algebra: 'atoms' must be a list")
    return BooleanAlgebra(tuple(atoms))


def atom_lookup(B: BooleanAlgebra) -> dict:
    return {str(a): a for a in B.atoms}


def element_from_json(B: BooleanAlgebra, data) -> AlgElement:
    look = atom_lookup(B)
    if not isinstance(data, list):
        raise FormatError(f"an algebra element is a list of atoms, got {data!r}")
    try:
        return B.element(look[str(a)] for a in data)
    except KeyError as exc:
        raise FormatError(f"unknown atom {exc.args[0]!r}") from None


def element_to_json(x: AlgElement) -> list:
    return x.sorted_members()


def ultrafilter_from_json(B: BooleanAlgebra, atom) -> Ultrafilter:
    look = atom_lookup(B)
    if str(atom) not in look:
        raise FormatError(f"unknown atom {atom!r}")
    return Ultrafilter(B, look[str(atom)])


def poset_to_json(P: FinitePoset) -> dict:
    return {"elements": list(P.elements),
            "leq": [[x, y] for x in P.elements for y in P.elements if x != y and P.le(x, y)]}


def poset_from_json(data) -> FinitePoset:
    elements = _need(data, "elements", "poset")
    pairs = data.get("leq", [])
    return FinitePoset.from_relation(tuple(elements), [tuple(p) for p in pairs])


# -- points, spaces, codes ---------------------------------------------------------

def rational_to_json(x: Fraction) -> str:
    return str(x)


def point_to_json(p: RationalPoint):
    if p.dim == 1:
        return str(p.coords[0])
    return [str(c) for c in p.coords]


def point_from_json(data) -> RationalPoint:
    if isinstance(data, list):
        return RationalPoint(tuple(to_fraction(c) for c in data))
    return RationalPoint((to_fraction(data),))


def space_to_json(Y: PolishPresentation) -> dict:
    if Y.mode == FINITE:
        return {"mode": Y.mode, "points": [point_to_json(p) for p in Y.points]}
    if Y.mode == HILBERT:
        return {"mode": Y.mode, "dimension": Y.dimension,
                "gdelta": [[{"center": point_to_json(b.center), "radius": str(b.radius)}
                            for b in level] for level in Y.gdelta]}
    return {"mode": Y.mode}


def space_from_json(data) -> PolishPresentation:
    mode = _need(data, "mode", "space")
    if mode == FINITE:
        return PolishPresentation.finite([point_from_json(p) for p in _need(data, "points", "space")])
    if mode == HILBERT:
        levels = [[BasisBall(point_from_json(_need(b, "center", "ball")),
                             to_fraction(_need(b, "radius", "ball"))) for b in level]
                  for level in data.get("gdelta", [])]
        return PolishPresentation.hilbert(int(_need(data, "dimension", "space")), levels)
    return PolishPresentation(mode)


def code_to_json(c: BorelCode) -> dict:
    if isinstance(c, Basic):
        out = {"basic": c.index}
        if c.coord:
            out["coord"] = c.coord
        return out
    if isinstance(c, Compl):
        return {"compl": code_to_json(c.code)}
    if isinstance(c, UnionFin):
        return {"union": [code_to_json(x) for x in c.codes]}
    if isinstance(c, Prim):
        return {"prim": c.name, "args": list(c.args)}
    raise TypeError(f"not a Borel code: {c!r}")


def code_from_json(data) -> BorelCode:
    if not isinstance(data, dict):
        raise FormatError(f"a Borel code is an object, got {data!r}")
    if "basic" in data:
        return Basic(int(data["basic"]), int(data.get("coord", 0)))
    if "compl" in data:
        return Compl(code_from_json(data["compl"]))
    if "union" in data:
        return UnionFin(tuple(code_from_json(x) for x in data["union"]))
    if "prim" in data:
        return Prim(data["prim"], tuple(int(a) for a in data.get("args", [])))
    raise FormatError(f"unrecognised Borel code {data!r}")


# -- functions and names --------------------------------------------------------------

def function_to_json(f) -> dict:
    return {str(a): point_to_json(v) for a, v in zip(f.algebra.atoms, f.values)}


def function_from_json(B: BooleanAlgebra, Y: PolishPresentation, data):
    from .functions import make_function
    if not isinstance(data, dict):
        raise FormatError("a function is an object {atom: point}")
    look = atom_lookup(B)
    values = {}
    for k, v in data.items():
        if k not in look:
            raise FormatError(f"unknown atom {k!r}")
        values[look[k]] = point_from_json(v)
    return make_function(B, Y, values)


def name_to_json(tau) -> dict:
    return {"bound": tau.bound,
            "assign": {str(n): tau.assign(n).sorted_members()
                       for n in range(tau.bound) if tau.masks[n]}}


def name_from_json(B: BooleanAlgebra, Y: PolishPresentation, data):
    from .names import BasisAssignment
    bound = int(_need(data, "bound", "name"))
    assign = {int(n): element_from_json(B, v) for n, v in data.get("assign", {}).items()}
    return BasisAssignment.from_dict(B, Y, bound, assign)


# -- structures -------------------------------------------------------------------------

def _split(key: str) -> tuple:
    return tuple(part.strip() for part in key.split(","))


def structure_to_json(S) -> dict:
    from .functions import FunctionSpaceStructure
    if isinstance(S, FunctionSpaceStructure):
        return {"kind": "function-space",
                "algebra": algebra_to_json(S.algebra),
                "space": space_to_json(S.space),
                "signature": S.sig.to_json(),
                "relations": {k: code_to_json(v) for k, v in S.relation_codes.items()},
                "functions": {k: code_to_json(v) for k, v in S.function_codes.items()},
                "carrier": [function_to_json(f) for f in S.base_carrier]}
    from itertools import product
    d = [str(x) for x in S.domain]
    n = len(d)
    eq = {f"{d[i]},{d[j]}": S.algebra.from_mask(S.eq_mask(i, j)).sorted_members()
          for i in range(n) for j in range(n) if S.eq_mask(i, j)}
    rel = {}
    for name, arity in S.sig.relations:
        rel[name] = {",".join(d[i] for i in tup): S.algebra.from_mask(m).sorted_members()
                     for tup in product(range(n), repeat=arity)
                     if (m := S.rel_mask(name, tup))}
    fun = {}
    for name, arity in S.sig.functions:
        table = {}
        for tup in product(range(n), repeat=arity):
            row = S.fun_row(name, tup)
            for j in range(n):
                if row[j]:
                    key = ",".join([d[i] for i in tup] + [d[j]])
                    table[key] = S.algebra.from_mask(row[j]).sorted_members()
        fun[name] = table
    return {"algebra": algebra_to_json(S.algebra), "signature": S.sig.to_json(),
            "domain": d, "eq": eq, "rel": rel, "fun": fun}


def structure_from_json(data):
    """Table structures, or ``"kind": "function-space"`` descriptions."""
    from .models import BValuedStructure
    if not isinstance(data, dict):
        raise FormatError("a structure is a JSON object")
    B = algebra_from_json(_need(data, "algebra", "structure"))
    sig = Signature.from_json(data.get("signature", {}))
    if data.get("kind") == "function-space":
        from .functions import as_bvalued_structure
        Y = space_from_json(_need(data, "space", "structure"))
        carrier = [function_from_json(B, Y, f) for f in _need(data, "carrier", "structure")]
        return as_bvalued_structure(
            B, Y, sig,
            {k: code_from_json(v) for k, v in data.get("relations", {}).items()},
            {k: code_from_json(v) for k, v in data.get("functions", {}).items()},
            carrier, max_carrier=int(data.get("max_carrier", 512)))
    domain = [str(x) for x in _need(data, "domain", "structure")]
    eq = {_split(k): element_from_json(B, v) for k, v in data.get("eq", {}).items()}
    rel = {name: {_split(k): element_from_json(B, v) for k, v in table.items()}
           for name, table in data.get("rel", {}).items()}
    fun = {name: {_split(k): element_from_json(B, v) for k, v in table.items()}
           for name, table in data.get("fun", {}).items()}
    return BValuedStructure.from_tables(B, sig, domain, eq, rel, fun)


def witness_to_json(w) -> dict:
    return {"hom": {str(a): x.sorted_members() for a, x in w.hom.items()},
            "phi": sorted([[str(m), str(n)] for m, n in w.phi])}


def witness_from_json(M, N, data):
    from .models import MorphismWitness
    hom_data = _need(data, "hom", "witness")
    look = atom_lookup(M.algebra)
    hom = {}
    for k, v in hom_data.items():
        if k not in look:
            raise FormatError(f"unknown atom {k!r}")
        hom[look[k]] = element_from_json(N.algebra, v)
    mdom = {str(x): x for x in M.domain}
    ndom = {str(x): x for x in N.domain}
    phi = set()
    for m, n in _need(data, "phi", "witness"):
        if str(m) not in mdom or str(n) not in ndom:
            raise FormatError(f"unknown domain element in pair {[m, n]!r}")
        phi.add((mdom[str(m)], ndom[str(n)]))
    return MorphismWitness(hom, frozenset(phi))
