"""Compare a finite space Y with the germ structures of its function space."""
from __future__ import annotations

from itertools import product
from typing import Mapping, Sequence

from .algebra import BooleanAlgebra, ultrafilters
from .functions import as_bvalued_structure, constants_carrier, germ_quotient, _graph_value
from .models import FirstOrderStructure, eval_tarski, quotient
from .polish import FINITE, BorelCode, PolishPresentation, eval_borel
from .report import Report
from .syntax import Formula, Signature, is_sentence

HEADER = ("finite-scale check: with finitely many atoms every germ structure is "
          "isomorphic to Y, so agreement is expected for every sentence; this is "
          "not a test of partial elementarity")


def space_structure(Y: PolishPresentation, sig: Signature,
                    relation_codes: Mapping[str, BorelCode],
                    function_codes: Mapping[str, BorelCode] | None = None) -> FirstOrderStructure:
    """Y itself as a classical structure, read off the codes pointwise."""
    if Y.mode != FINITE:
        raise ValueError("only finite-discrete spaces have a decidable theory here")
    pts = Y.points
    relations = {name: frozenset(t for t in product(pts, repeat=arity)
                                 if eval_borel(Y, relation_codes[name], t))
                 for name, arity in sig.relations}
    functions = {}
    for name, arity in sig.functions:
        table = {}
        for t in product(pts, repeat=arity):
            y = _graph_value(Y, function_codes[name], t, None, 0)
            if isinstance(y, Exception):
                raise ValueError(f"{name}: {y}")
            table[t] = y
        functions[name] = table
    return FirstOrderStructure(sig, pts, relations, functions)


def elementarity_spotcheck(Y: PolishPresentation, sentences: Sequence[Formula],
                           B: BooleanAlgebra, sig: Signature,
                           relation_codes: Mapping[str, BorelCode],
                           function_codes: Mapping[str, BorelCode] | None = None) -> Report:
    """For each sentence and each ultrafilter p: Y ⊨ φ iff germs at p ⊨ φ.

    The function-space structure uses all constants as carrier (closed under
    mixing).  Also records whether the germ structure equals the generic
    quotient at p.
    """
    for phi in sentences:
        if not is_sentence(phi):
            raise ValueError(f"not a sentence: {phi}")
    function_codes = dict(function_codes or {})
    Yst = space_structure(Y, sig, relation_codes, function_codes)
    S = as_bvalued_structure(B, Y, sig, relation_codes, function_codes,
                             constants_carrier(B, Y, Y.points))
    rep = Report("elementarity spot-check")
    rep.notes.append(HEADER)
    germs = {}
    cross_ok = True
    for p in ultrafilters(B):
        g = germ_quotient(S, p)
        germs[p.index] = g.to_first_order()
        cross_ok &= quotient(S, p).same_as(germs[p.index])
    mismatches = []
    for phi in sentences:
        truth = eval_tarski(Yst, phi)
        for p in ultrafilters(B):
            if eval_tarski(germs[p.index], phi) != truth:
                mismatches.append({"sentence": str(phi), "ultrafilter": p.principal_atom,
                                   "in_Y": truth})
    rep.add("Y ⊨ φ iff germs at p ⊨ φ", not mismatches, mismatches[:10] or None,
            f"{len(sentences)} sentences x {B.n_atoms} points")
    rep.add("germ structure = quotient M/p", cross_ok)
    rep.data.update(sentences=len(sentences), mismatches=len(mismatches),
                    carrier=len(S.domain))
    return rep
