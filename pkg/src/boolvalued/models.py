"""Boolean-valued structures, their semantics, quotients by ultrafilters, and
the verifiers built on them (structure axioms, Łoś, fullness witnesses,
morphisms, tautology instances).

Internally every Boolean value is an ``int`` bit mask over the atoms of the
structure's algebra; the public functions return :class:`AlgElement`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .algebra import AlgElement, BooleanAlgebra, Ultrafilter, ultrafilters
from .report import Report
from .syntax import (
    And, Apply, Eq, Exists, Forall, Formula, Implies, Not, Or, Rel, Signature,
    Term, Var, check_formula, iff, substitute,
)


class StructureError(ValueError):
    pass


class EvaluationError(ValueError):
    pass


def _mask_of(algebra: BooleanAlgebra, value) -> int:
    if isinstance(value, AlgElement):
        if value.algebra != algebra:
            raise StructureError("table value from a different algebra")
        return value.mask
    if isinstance(value, int) and not isinstance(value, bool):
        raise StructureError("give table values as AlgElements or atom lists, not raw ints")
    return algebra.element(value).mask


class BValuedStructure:
    """A B-valued model over a finite domain.

    Table-backed: pass index-free tables keyed by domain elements to
    :meth:`from_tables`.  Subclasses may compute values on demand instead by
    overriding :meth:`eq_mask`, :meth:`rel_mask` and :meth:`fun_row`.

    ``mixer``, when given, glues a family ``[(mask, element_index), ...]`` with
    pairwise disjoint masks into one element index; it is what
    :func:`find_witness` needs.
    """

    def __init__(self, algebra: BooleanAlgebra, sig: Signature, domain: Sequence[Hashable],
                 eq: Sequence[Sequence[int]] | None = None,
                 rel: Mapping[str, Mapping[tuple, int]] | None = None,
                 fun: Mapping[str, Mapping[tuple, Sequence[int]]] | None = None,
                 mixer: Callable | None = None):
        domain = tuple(domain)
        if not domain:
            raise StructureError("the domain of a B-valued model must be non-empty")
        if len(set(domain)) != len(domain):
            raise StructureError("duplicate domain elements")
        self.algebra = algebra
        self.sig = sig
        self.domain = domain
        self._index = {e: i for i, e in enumerate(domain)}
        self._eq = [list(row) for row in eq] if eq is not None else None
        self._rel = {k: dict(v) for k, v in (rel or {}).items()}
        self._fun = {k: {a: list(r) for a, r in v.items()} for k, v in (fun or {}).items()}
        self.mixer = mixer

    @classmethod
    def from_tables(cls, algebra: BooleanAlgebra, sig: Signature, domain: Sequence,
                    eq: Mapping[tuple, object],
                    rel: Mapping[str, Mapping[tuple, object]] | None = None,
                    fun: Mapping[str, Mapping[tuple, object]] | None = None,
                    mix_rule: Callable | None = None,
                    reflexive_default: bool = True) -> BValuedStructure:
        """Build from element-keyed tables; missing entries are 0.

        ``fun[f]`` is keyed by ``(*args, value)``.  The diagonal of ``eq``
        defaults to 1 when absent (``reflexive_default``).  ``mix_rule``
        receives ``[(AlgElement, element), ...]`` and returns an element.
        """
        domain = tuple(domain)
        idx = {e: i for i, e in enumerate(domain)}
        n = len(domain)

        def key(tup):
            try:
                return tuple(idx[e] for e in tup)
            except KeyError as exc:
                raise StructureError(f"unknown domain element {exc.args[0]!r}") from None

        eqt = [[0] * n for _ in range(n)]
        if reflexive_default:
            for i in range(n):
                eqt[i][i] = algebra.full_mask
        for pair, v in eq.items():
            i, j = key(pair)
            eqt[i][j] = _mask_of(algebra, v)
        relt = {}
        for name, arity in sig.relations:
            table = {}
            for tup, v in (rel or {}).get(name, {}).items():
                if len(tup) != arity:
                    raise StructureError(f"{name} entry {tup!r} has the wrong arity")
                table[key(tup)] = _mask_of(algebra, v)
            relt[name] = table
        for name in (rel or {}):
            if name not in sig.relation_arity:
                raise StructureError(f"table for undeclared relation {name!r}")
        funt = {}
        for name, arity in sig.functions:
            table = {}
            for tup, v in (fun or {}).get(name, {}).items():
                if len(tup) != arity + 1:
                    raise StructureError(f"{name} entry {tup!r} needs {arity} args + a value")
                k = key(tup)
                table.setdefault(k[:-1], [0] * n)[k[-1]] = _mask_of(algebra, v)
            funt[name] = table
        for name in (fun or {}):
            if name not in sig.function_arity:
                raise StructureError(f"table for undeclared function {name!r}")
        def mixer(pieces, _rule=mix_rule):
            chosen = _rule([(AlgElement(algebra, m), domain[i]) for m, i in pieces])
            return idx[chosen]
        return cls(algebra, sig, domain, eqt, relt, funt, mixer if mix_rule else None)

    # -- raw access (masks, indices) ----------------------------------------
    def index_of(self, element) -> int:
        try:
            return self._index[element]
        except (KeyError, TypeError):
            raise EvaluationError(f"{element!r} is not in the domain") from None

    def eq_mask(self, i: int, j: int) -> int:
        return self._eq[i][j]

    def eq_row(self, i: int) -> list:
        return [self.eq_mask(i, j) for j in range(len(self.domain))]

    def rel_mask(self, name: str, idxs: tuple) -> int:
        return self._rel[name].get(idxs, 0)

    def fun_row(self, name: str, idxs: tuple) -> list:
        row = self._fun[name].get(idxs)
        return row if row is not None else [0] * len(self.domain)

    def fun_mask(self, name: str, idxs: tuple, j: int) -> int:
        return self.fun_row(name, idxs)[j]

    @property
    def has_mixing(self) -> bool:
        return self.mixer is not None

    def mix_indices(self, pieces: Sequence[tuple]) -> int:
        if self.mixer is None:
            raise StructureError("this structure has no mixing capability")
        return self.mixer(list(pieces))

    def parameters(self) -> list:
        """Domain elements used to instantiate free variables in test suites."""
        return list(self.domain)

    # -- public access -------------------------------------------------------
    def eq_value(self, a, b) -> AlgElement:
        return AlgElement(self.algebra, self.eq_mask(self.index_of(a), self.index_of(b)))

    def rel_value(self, name: str, args: Sequence) -> AlgElement:
        return AlgElement(self.algebra, self.rel_mask(name, tuple(self.index_of(a) for a in args)))

    def fun_value(self, name: str, args: Sequence, value) -> AlgElement:
        return AlgElement(self.algebra, self.fun_mask(
            name, tuple(self.index_of(a) for a in args), self.index_of(value)))

    # -- dense tables for the axiom checker ------------------------------------
    def tables(self) -> tuple:
        if "_tables" not in self.__dict__:
            n = len(self.domain)
            E = np.array([self.eq_row(i) for i in range(n)], dtype=np.int64).reshape(n, n)
            R = {}
            for name, arity in self.sig.relations:
                arr = np.zeros((n,) * arity, dtype=np.int64)
                for tup in product(range(n), repeat=arity):
                    arr[tup] = self.rel_mask(name, tup)
                R[name] = arr
            F = {}
            for name, arity in self.sig.functions:
                arr = np.zeros((n,) * arity + (n,), dtype=np.int64)
                for tup in product(range(n), repeat=arity):
                    arr[tup] = self.fun_row(name, tup)
                F[name] = arr
            self.__dict__["_tables"] = (E, R, F)
        return self.__dict__["_tables"]

    def to_json(self) -> dict:
        from .serialize import structure_to_json
        return structure_to_json(self)

    def __repr__(self):
        return (f"{type(self).__name__}(|B|={len(self.algebra)}, "
                f"|M|={len(self.domain)}, sig={self.sig.to_json()})")


# -- semantics -------------------------------------------------------------------

def _conj(vecs: list, n: int) -> np.ndarray:
    """Array over σ⃗ of AND_k vecs[k][σ_k] (outer meet)."""
    k = len(vecs)
    out = np.array(-1, dtype=np.int64)
    for h, v in enumerate(vecs):
        shape = [1] * k
        shape[h] = n
        out = out & v.reshape(shape)
    return out


def _term_vec(S: BValuedStructure, t: Term, env: dict) -> np.ndarray:
    """[⟦t = τ⟧ for τ in the domain] as an int64 array."""
    E, _, F = S.tables()
    if isinstance(t, Var):
        try:
            return E[env[t.name]]
        except KeyError:
            raise EvaluationError(f"unbound variable {t.name!r}") from None
    n = len(S.domain)
    c = _conj([_term_vec(S, a, env) for a in t.args], n)
    # sup over argument tuples σ⃗ of (AND ⟦t_i = σ_i⟧) ∧ ⟦f(σ⃗) = τ⟧
    return np.bitwise_or.reduce((c[..., None] & F[t.function]).reshape(-1, n), axis=0)


def _eval(S: BValuedStructure, phi: Formula, env: dict, cache: dict | None) -> int:
    if cache is not None:
        try:
            key = (phi, tuple(env[v] for v in phi.free_order))
        except KeyError as exc:
            raise EvaluationError(f"unbound variable {exc.args[0]!r}") from None
        hit = cache.get(key)
        if hit is not None:
            return hit
    full = S.algebra.full_mask
    if isinstance(phi, Eq):
        a, b = _term_vec(S, phi.left, env), _term_vec(S, phi.right, env)
        out = int(np.bitwise_or.reduce(a & b))
    elif isinstance(phi, Rel):
        R = S.tables()[1][phi.name]
        c = _conj([_term_vec(S, t, env) for t in phi.args], len(S.domain))
        out = int(np.bitwise_or.reduce((c & R).ravel()))
    elif isinstance(phi, Not):
        out = full & ~_eval(S, phi.body, env, cache)
    elif isinstance(phi, And):
        out = _eval(S, phi.left, env, cache)
        if out:
            out &= _eval(S, phi.right, env, cache)
    elif isinstance(phi, Or):
        out = _eval(S, phi.left, env, cache) | _eval(S, phi.right, env, cache)
    elif isinstance(phi, Implies):
        out = (full & ~_eval(S, phi.left, env, cache)) | _eval(S, phi.right, env, cache)
    elif isinstance(phi, (Exists, Forall)):
        inner = dict(env)
        universal = isinstance(phi, Forall)
        out = full if universal else 0
        for tau in range(len(S.domain)):
            inner[phi.var] = tau
            v = _eval(S, phi.body, inner, cache)
            if universal:
                out &= v
                if not out:
                    break
            else:
                out |= v
                if out == full:
                    break
    else:
        raise TypeError(f"not a formula: {phi!r}")
    if cache is not None:
        cache[key] = out
    return out


def _env(S, phi: Formula, valuation: Mapping) -> dict:
    env = {v: S.index_of(e) for v, e in valuation.items()}
    missing = phi.free - env.keys()
    if missing:
        raise EvaluationError(f"valuation misses free variables {sorted(missing)}")
    return env


def eval_boolean(S: BValuedStructure, phi: Formula, valuation: Mapping | None = None,
                 cache: dict | None = None) -> AlgElement:
    """The Boolean value of ``phi`` under ``valuation`` (variable -> element).

    ``cache`` may be shared between calls on the same structure.
    """
    valuation = valuation or {}
    check_formula(phi, S.sig)
    return AlgElement(S.algebra, _eval(S, phi, _env(S, phi, valuation), cache))


# -- two-valued structures and quotients ------------------------------------------

@dataclass
class FirstOrderStructure:
    """A classical structure; ``projection`` maps elements of the B-valued model
    it came from (if any) to their class representatives."""

    sig: Signature
    domain: tuple
    relations: dict
    functions: dict
    projection: dict = field(default_factory=dict)

    def __post_init__(self):
        self.domain = tuple(self.domain)
        if not self.domain:
            raise StructureError("empty domain")
        dom = set(self.domain)
        for name, arity in self.sig.functions:
            table = self.functions.get(name, {})
            for tup in product(self.domain, repeat=arity):
                if table.get(tup) not in dom:
                    raise StructureError(f"{name} is not total at {tup!r}")

    def same_as(self, other: FirstOrderStructure) -> bool:
        return (self.domain == other.domain
                and {k: frozenset(v) for k, v in self.relations.items()}
                == {k: frozenset(v) for k, v in other.relations.items()}
                and self.functions == other.functions)


def _tarski_term(F: FirstOrderStructure, t: Term, env: Mapping):
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {t.name!r}") from None
    return F.functions[t.function][tuple(_tarski_term(F, a, env) for a in t.args)]


def _tarski(F: FirstOrderStructure, phi: Formula, env: dict, cache: dict | None) -> bool:
    if cache is not None:
        key = (phi, tuple(env[v] for v in phi.free_order))
        hit = cache.get(key)
        if hit is not None:
            return hit
    if isinstance(phi, Eq):
        out = _tarski_term(F, phi.left, env) == _tarski_term(F, phi.right, env)
    elif isinstance(phi, Rel):
        out = tuple(_tarski_term(F, t, env) for t in phi.args) in F.relations.get(phi.name, ())
    elif isinstance(phi, Not):
        out = not _tarski(F, phi.body, env, cache)
    elif isinstance(phi, And):
        out = _tarski(F, phi.left, env, cache) and _tarski(F, phi.right, env, cache)
    elif isinstance(phi, Or):
        out = _tarski(F, phi.left, env, cache) or _tarski(F, phi.right, env, cache)
    elif isinstance(phi, Implies):
        out = (not _tarski(F, phi.left, env, cache)) or _tarski(F, phi.right, env, cache)
    elif isinstance(phi, (Exists, Forall)):
        inner = dict(env)
        results = []
        for d in F.domain:
            inner[phi.var] = d
            results.append(_tarski(F, phi.body, inner, cache))
        out = all(results) if isinstance(phi, Forall) else any(results)
    else:
        raise TypeError(f"not a formula: {phi!r}")
    if cache is not None:
        cache[key] = out
    return out


def eval_tarski(F: FirstOrderStructure, phi: Formula, valuation: Mapping | None = None,
                cache: dict | None = None) -> bool:
    env = dict(valuation or {})
    missing = phi.free - env.keys()
    if missing:
        raise EvaluationError(f"valuation misses free variables {sorted(missing)}")
    dom = set(F.domain)
    for v, e in env.items():
        if e not in dom:
            raise EvaluationError(f"{e!r} is not in the domain")
    check_formula(phi, F.sig)
    return _tarski(F, phi, env, cache)


def quotient(S: BValuedStructure, G: Ultrafilter) -> FirstOrderStructure:
    """M/G: classes of ``⟦τ = σ⟧ ∈ G``, represented by their lowest-index member."""
    if G.algebra != S.algebra:
        raise StructureError("ultrafilter over a different algebra")
    bit = G.bit
    n = len(S.domain)
    rep = [0] * n
    reps = []
    for i in range(n):
        for r in reps:
            if S.eq_mask(i, r) & bit:
                rep[i] = r
                break
        else:
            rep[i] = i
            reps.append(i)
    d = S.domain
    relations = {}
    for name, arity in S.sig.relations:
        rel = set()
        for tup in product(reps, repeat=arity):
            if S.rel_mask(name, tup) & bit:
                rel.add(tuple(d[i] for i in tup))
        relations[name] = frozenset(rel)
    functions = {}
    for name, arity in S.sig.functions:
        table = {}
        for tup in product(reps, repeat=arity):
            row = S.fun_row(name, tup)
            values = {rep[j] for j in range(n) if row[j] & bit}
            if not values:
                raise StructureError(
                    f"{name}{tuple(d[i] for i in tup)!r} has no value at {G!r} (totality fails)")
            if len(values) > 1:
                raise StructureError(
                    f"{name}{tuple(d[i] for i in tup)!r} is multi-valued at {G!r}")
            table[tuple(d[i] for i in tup)] = d[values.pop()]
        functions[name] = table
    projection = {d[i]: d[rep[i]] for i in range(n)}
    return FirstOrderStructure(S.sig, tuple(d[i] for i in reps), relations, functions,
                               projection)


# -- structure axioms ---------------------------------------------------------------

_BRUTE_LIMIT = 1 << 21


def _first(viol: np.ndarray):
    hits = np.argwhere(viol != 0)
    return tuple(int(x) for x in hits[0]) if len(hits) else None


def _conj_eq(E: np.ndarray, taus: tuple, n: int) -> np.ndarray:
    """Array over σ⃗ of AND_h ⟦τ_h = σ_h⟧."""
    out = np.full((n,) * len(taus), -1, dtype=np.int64) if taus else np.array(-1, dtype=np.int64)
    for h, t in enumerate(taus):
        shape = [1] * len(taus)
        shape[h] = n
        out = out & E[t].reshape(shape)
    return out


def _congruence_brute(E, T, arity, n, extra_axis: bool):
    """First (τ⃗, σ⃗[, μ]) violating AND⟦τ_h=σ_h⟧ ∧ T(τ⃗[, μ]) ≤ T(σ⃗[, μ]), or None."""
    for taus in product(range(n), repeat=arity):
        c = _conj_eq(E, taus, n)
        if extra_axis:
            viol = c[..., None] & T[taus][(None,) * arity] & ~T
        else:
            viol = c & T[taus] & ~T
        w = _first(viol)
        if w is not None:
            return taus, w
    return None


def _congruence_classes(E, T, arity, n, n_atoms, extra_axis: bool):
    """Same check via per-atom class representatives (valid once E is an
    equivalence at every atom, i.e. clauses (i)-(iii) hold)."""
    for a in range(n_atoms):
        ea = (E >> a) & 1
        rep = np.argmax(ea, axis=1)
        tb = (T >> a) & 1
        moved = tb[np.ix_(*([rep] * arity))] if arity else tb
        if extra_axis and arity:
            moved = tb[np.ix_(*([rep] * arity), np.arange(n))]
        diff = np.argwhere(tb != moved)
        if len(diff):
            pos = tuple(int(x) for x in diff[0])
            taus = pos[:arity]
            sig = tuple(int(rep[t]) for t in taus)
            tail = pos[arity:]
            if tb[pos]:
                return taus, sig + tail
            return sig, taus + tail
    return None


def check_structure_axioms(S: BValuedStructure, method: str = "auto") -> Report:
    """Exhaustively check clauses (i)-(vii) of the B-valued model definition.

    ``method``: ``"brute"`` enumerates every tuple pair literally;
    ``"classes"`` decides congruence clauses (iv), (v) atom by atom through
    equivalence-class representatives; ``"auto"`` uses the literal check unless
    it would visit more than 2**21 cells.
    """
    E, R, F = S.tables()
    n = len(S.domain)
    full = S.algebra.full_mask
    d = S.domain
    rep = Report("structure axioms")

    diag = np.diagonal(E)
    bad = np.nonzero(diag != full)[0]
    rep.add("(i) reflexivity", len(bad) == 0,
            None if len(bad) == 0 else (d[int(bad[0])],))
    w = _first(E != E.T)
    rep.add("(ii) symmetry", w is None, None if w is None else (d[w[0]], d[w[1]]))
    w = None
    for t in range(n):
        viol = E[t][:, None] & E & ~E[t][None, :]
        w0 = _first(viol)
        if w0 is not None:
            w = (d[t], d[w0[0]], d[w0[1]])
            break
    rep.add("(iii) transitivity", w is None, w)
    eq_ok = rep.ok

    def congruence(T, arity, extra):
        cells = n ** (2 * arity + (1 if extra else 0))
        use_classes = method == "classes" or (method == "auto" and cells > _BRUTE_LIMIT)
        if use_classes and eq_ok:
            return _congruence_classes(E, T, arity, n, S.algebra.n_atoms, extra)
        return _congruence_brute(E, T, arity, n, extra)

    for name, arity in S.sig.relations:
        res = congruence(R[name], arity, False)
        rep.add(f"(iv) congruence of {name}", res is None,
                None if res is None else ([d[i] for i in res[0]], [d[i] for i in res[1]]))
    for name, arity in S.sig.functions:
        T = F[name]
        res = congruence(T, arity, True)
        rep.add(f"(v) congruence of {name}", res is None,
                None if res is None else ([d[i] for i in res[0]],
                                          [d[i] for i in res[1][:arity]], d[res[1][arity]]))
        sups = np.bitwise_or.reduce(T, axis=-1) if n else T
        w = _first(sups != full)
        rep.add(f"(vi) totality of {name}", w is None,
                None if w is None else [d[i] for i in w])
        w = None
        for taus in product(range(n), repeat=arity):
            row = T[taus]
            viol = row[:, None] & row[None, :] & ~E
            w0 = _first(viol)
            if w0 is not None:
                w = ([d[i] for i in taus], d[w0[0]], d[w0[1]])
                break
        rep.add(f"(vii) functionality of {name}", w is None, w)
    return rep


# -- Łoś ---------------------------------------------------------------------------

def all_valuations(S_domain: Sequence, variables: Sequence[str]) -> list[dict]:
    return [dict(zip(variables, vals)) for vals in product(S_domain, repeat=len(variables))]


def los_check(S: BValuedStructure, formulas: Iterable[Formula],
              valuations: Sequence[Mapping] | None = None,
              filters: Sequence[Ultrafilter] | None = None,
              max_witnesses: int = 10) -> Report:
    """Compare ``M/G ⊨ φ([τ⃗]_G)`` with ``⟦φ(τ⃗)⟧ ∈ G`` for every formula,
    valuation and ultrafilter.  With ``valuations=None`` every valuation of the
    formula's free variables is used.

    Finite algebras have only principal ultrafilters, which preserve every
    supremum, so the comparison needs no fullness hypothesis here.
    """
    filters = list(filters) if filters is not None else ultrafilters(S.algebra)
    quotients = [(G, quotient(S, G)) for G in filters]
    bcache: dict = {}
    tcaches = [dict() for _ in quotients]
    mismatches = []
    checked = 0
    n_formulas = 0
    for phi in formulas:
        n_formulas += 1
        check_formula(phi, S.sig)
        vals = valuations if valuations is not None else all_valuations(S.domain, phi.free_order)
        for nu in vals:
            env = _env(S, phi, nu)
            b = _eval(S, phi, env, bcache)
            for (G, Q), tc in zip(quotients, tcaches):
                proj = {v: Q.projection[S.domain[i]] for v, i in env.items()}
                t = _tarski(Q, phi, proj, tc)
                checked += 1
                if t != bool(b & G.bit):
                    if len(mismatches) < max_witnesses:
                        mismatches.append({"formula": str(phi), "valuation": dict(nu),
                                           "ultrafilter": G.principal_atom,
                                           "boolean": AlgElement(S.algebra, b),
                                           "quotient": t})
                    else:
                        mismatches.append(None)
    rep = Report("Łoś clause (i)")
    shown = [m for m in mismatches if m is not None]
    rep.add("membership in G agrees with truth in M/G", not mismatches,
            shown or None, f"{checked} comparisons, {len(mismatches)} mismatches")
    rep.data.update(formulas=n_formulas, comparisons=checked, mismatches=len(mismatches))
    return rep


def los_clause_ii(S: BValuedStructure, phi: Formula, valuation: Mapping) -> Report:
    """⟦φ⟧ ≥ a iff M/G ⊨ φ for every G whose atom lies in a, for every a ∈ B."""
    b = eval_boolean(S, phi, valuation)
    holds = {}
    for G in ultrafilters(S.algebra):
        Q = quotient(S, G)
        holds[G.index] = eval_tarski(Q, phi, {v: Q.projection[e] for v, e in valuation.items()})
    rep = Report("Łoś clause (ii)")
    bad = None
    for a in S.algebra.elements():
        lhs = a <= b
        rhs = all(holds[i] for i in range(S.algebra.n_atoms) if a.mask >> i & 1)
        if lhs != rhs:
            bad = a
            break
    rep.add("⟦φ⟧ ≥ a iff φ holds at every G in O_a", bad is None, bad)
    return rep


# -- fullness witnesses ----------------------------------------------------------------

def find_witness(S: BValuedStructure, phi: Formula, var: str | None = None,
                 valuation: Mapping | None = None, pool: Sequence | None = None):
    """Build ``g`` with ``⟦∃x φ⟧ = ⟦φ(g)⟧`` by mixing pool witnesses.

    ``phi`` is either ``Exists(x, body)`` or a body with the distinguished
    variable ``var``.  Pool elements are scanned in order; each contributes the
    part of its value not yet covered.  Uncovered atoms are filled with the
    first pool element.  Returns ``(element, report)``.
    """
    if isinstance(phi, Exists) and var is None:
        var, body = phi.var, phi.body
    else:
        body = phi
    if var is None:
        raise EvaluationError("no distinguished variable given")
    if not S.has_mixing:
        raise StructureError("find_witness needs a structure with a mixing capability")
    valuation = dict(valuation or {})
    valuation.pop(var, None)
    pool = list(pool) if pool is not None else list(S.domain)
    if not pool:
        raise EvaluationError("the witness pool is empty")
    check_formula(body, S.sig)
    cache: dict = {}
    env = _env(S, Exists(var, body), valuation)
    target = _eval(S, Exists(var, body), env, cache)
    covered = 0
    pieces = []
    for g in pool:
        gi = S.index_of(g)
        env[var] = gi
        b = _eval(S, body, env, cache) & ~covered
        if b:
            pieces.append((b, gi))
            covered |= b
    rest = S.algebra.full_mask & ~covered
    if rest:
        pieces.append((rest, S.index_of(pool[0])))
    gi = S.mix_indices(pieces)
    env[var] = gi
    achieved = _eval(S, body, env, cache)
    rep = Report("fullness witness")
    exact = achieved == target
    rep.add("⟦∃xφ⟧ = ⟦φ(g)⟧", exact, None,
            "exact" if exact else "only ≤ (pool too small)")
    rep.data.update(target=AlgElement(S.algebra, target),
                    achieved=AlgElement(S.algebra, achieved),
                    antichain=[AlgElement(S.algebra, m) for m, _ in pieces],
                    exact=exact, leq=(achieved & target) == achieved)
    return S.domain[gi], rep


# -- morphisms ---------------------------------------------------------------------------

@dataclass
class MorphismWitness:
    """``hom`` sends each atom of M's algebra to an element of N's algebra; ``phi``
    is a relation between the two domains."""

    hom: dict
    phi: frozenset

    def __post_init__(self):
        self.phi = frozenset(tuple(p) for p in self.phi)

    @classmethod
    def identity(cls, S: BValuedStructure) -> MorphismWitness:
        return cls({a: S.algebra.atom(a) for a in S.algebra.atoms},
                   frozenset((e, e) for e in S.domain))

    def apply(self, source: BooleanAlgebra, mask: int) -> int:
        out = 0
        for i, a in enumerate(source.atoms):
            if mask >> i & 1:
                out |= self.hom[a].mask
        return out


MORPHISM_CLASSES = ("none", "morphism", "injective morphism", "embedding", "isomorphism")


def check_morphism(M: BValuedStructure, N: BValuedStructure, w: MorphismWitness) -> Report:
    """Classify ⟨i, Φ⟩ as none / morphism / injective morphism / embedding /
    isomorphism."""
    B, C = M.algebra, N.algebra
    if M.sig != N.sig:
        raise StructureError("structures have different signatures")
    if set(w.hom) != set(B.atoms):
        raise StructureError("the algebra map must give an image for every atom")
    images = [w.hom[a] for a in B.atoms]
    for x in images:
        if x.algebra != C:
            raise StructureError("algebra map images lie outside the target algebra")
    union = 0
    for x in images:
        if union & x.mask:
            raise StructureError("atom images overlap: not a Boolean homomorphism")
        union |= x.mask
    if union != C.full_mask:
        raise StructureError("atom images do not join to 1: not a Boolean homomorphism")

    rep = Report("morphism classification")
    ii = lambda m: w.apply(B, m)  # noqa: E731
    try:
        pairs = [(M.index_of(a), N.index_of(b)) for a, b in w.phi]
    except EvaluationError as exc:
        raise StructureError(str(exc)) from None
    pairs.sort()
    covered = {p for p, _ in pairs}
    missing = [M.domain[i] for i in range(len(M.domain)) if i not in covered]
    rep.add("1: dom Φ = M", not missing, missing[:1] or None)

    def clause(name, items, lhs, rhs):
        leq_bad = eq_bad = None
        for it in items:
            l, r = ii(lhs(it)), rhs(it)
            if l & ~r and leq_bad is None:
                leq_bad = it
            if l != r and eq_bad is None:
                eq_bad = it
            if leq_bad is not None:
                break
        return leq_bad, eq_bad

    def show(it):
        return [(M.domain[p], N.domain[q]) for p, q in it]

    bad2, neq2 = clause("2", product(pairs, repeat=2),
                        lambda it: M.eq_mask(it[0][0], it[1][0]),
                        lambda it: N.eq_mask(it[0][1], it[1][1]))
    rep.add("2: i⟦τ1=τ2⟧ ≤ ⟦σ1=σ2⟧", bad2 is None, None if bad2 is None else show(bad2))
    eq2 = neq2 is None
    eq34 = True
    for name, arity in M.sig.relations:
        bad, neq = clause(name, product(pairs, repeat=arity),
                          lambda it: M.rel_mask(name, tuple(p for p, _ in it)),
                          lambda it: N.rel_mask(name, tuple(q for _, q in it)))
        rep.add(f"3: {name} preserved", bad is None, None if bad is None else show(bad))
        eq34 &= neq is None
    for name, arity in M.sig.functions:
        bad, neq = clause(name, product(pairs, repeat=arity + 1),
                          lambda it: M.fun_mask(name, tuple(p for p, _ in it[:-1]), it[-1][0]),
                          lambda it: N.fun_mask(name, tuple(q for _, q in it[:-1]), it[-1][1]))
        rep.add(f"4: {name} preserved", bad is None, None if bad is None else show(bad))
        eq34 &= neq is None

    is_morphism = rep.ok
    i_iso = (B.n_atoms == C.n_atoms and all(x.mask and not x.mask & (x.mask - 1) for x in images))
    surjective = {q for _, q in pairs} == set(range(len(N.domain)))
    if not is_morphism:
        cls = "none"
    elif not eq2:
        cls = "morphism"
    elif not eq34:
        cls = "injective morphism"
    elif not (i_iso and surjective):
        cls = "embedding"
    else:
        cls = "isomorphism"
    rep.data.update(classification=cls, equality_in_2=eq2, equality_in_3_4=eq34,
                    algebra_iso=i_iso, surjective=surjective)
    return rep


def classify_morphism(M, N, w) -> str:
    return check_morphism(M, N, w).data["classification"]


def transfers_formulas(M: BValuedStructure, N: BValuedStructure, w: MorphismWitness,
                       formulas: Iterable[Formula], limit: int = 64) -> Report:
    """For an isomorphism: i⟦φ(τ⃗)⟧ = ⟦φ(σ⃗)⟧ on sampled pairs from Φ."""
    rep = Report("isomorphism preserves Boolean values")
    pairs = sorted(w.phi, key=lambda p: (M.index_of(p[0]), N.index_of(p[1])))
    for phi in formulas:
        bad = None
        vs = phi.free_order
        for k, choice in enumerate(product(pairs, repeat=len(vs))):
            if k >= limit:
                break
            a = eval_boolean(M, phi, {v: p[0] for v, p in zip(vs, choice)})
            b = eval_boolean(N, phi, {v: p[1] for v, p in zip(vs, choice)})
            if w.apply(M.algebra, a.mask) != b.mask:
                bad = [str(x) for x in choice]
                break
        rep.add(str(phi), bad is None, bad)
    return rep


# -- tautology instances ----------------------------------------------------------------

def _v(name):
    return Var(name)


def _schemata():
    x, y, z = _v("x"), _v("y"), _v("z")
    I, N_, A_, O_ = Implies, Not, And, Or
    return [
        ("excluded middle", 1, lambda p: O_(p, N_(p))),
        ("non-contradiction", 1, lambda p: N_(A_(p, N_(p)))),
        ("identity", 1, lambda p: I(p, p)),
        ("weakening", 2, lambda p, q: I(p, I(q, p))),
        ("distribution of ->", 3, lambda p, q, r: I(I(p, I(q, r)), I(I(p, q), I(p, r)))),
        ("hypothetical syllogism", 3, lambda p, q, r: I(I(p, q), I(I(q, r), I(p, r)))),
        ("double negation", 1, lambda p: I(N_(N_(p)), p)),
        ("and elimination left", 2, lambda p, q: I(A_(p, q), p)),
        ("and elimination right", 2, lambda p, q: I(A_(p, q), q)),
        ("and introduction", 2, lambda p, q: I(p, I(q, A_(p, q)))),
        ("or introduction", 2, lambda p, q: I(p, O_(p, q))),
        ("or elimination", 3, lambda p, q, r: I(I(p, r), I(I(q, r), I(O_(p, q), r)))),
        ("De Morgan", 2, lambda p, q: iff(N_(O_(p, q)), A_(N_(p), N_(q)))),
        ("contraposition", 2, lambda p, q: I(I(N_(p), N_(q)), I(q, p))),
        ("universal instantiation", 1, lambda p: I(Forall("x", p), substitute(p, "x", y))),
        ("existential generalisation", 1, lambda p: I(substitute(p, "x", y), Exists("x", p))),
        ("universal distribution", 2,
         lambda p, q: I(Forall("x", I(p, q)), I(Forall("x", p), Forall("x", q)))),
        ("quantifier duality", 1, lambda p: iff(N_(Exists("x", p)), Forall("x", N_(p)))),
        ("universal exchange", 1,
         lambda p: I(Forall("x", Forall("y", p)), Forall("y", Forall("x", p)))),
        ("exists-forall exchange", 1,
         lambda p: I(Exists("x", Forall("y", p)), Forall("y", Exists("x", p)))),
        ("non-empty domain", 1, lambda p: I(Forall("x", p), Exists("x", p))),
        ("equality reflexive", 0, lambda: Eq(x, x)),
        ("equality symmetric", 0, lambda: I(Eq(x, y), Eq(y, x))),
        ("equality transitive", 0, lambda: I(A_(Eq(x, y), Eq(y, z)), Eq(x, z))),
        ("Leibniz", 1, lambda p: I(Eq(x, y), I(p, substitute(p, "x", y)))),
    ]


SCHEMATA = _schemata()


def default_instances(sig: Signature) -> list[Formula]:
    """A few open formulas in x, y used to fill schema placeholders."""
    x, y = Var("x"), Var("y")
    out: list[Formula] = [Eq(x, y)]
    for name, arity in sig.relations:
        args = tuple([x, y] * arity)[:arity]
        out.append(Rel(name, args))
        if arity >= 1:
            lifted = tuple([Var("z")] + [y] * (arity - 1))
            out.append(Exists("z", Rel(name, lifted)))
        break
    for name, arity in sig.functions:
        out.append(Eq(Apply(name, tuple([x] * arity)), y))
        break
    if len(out) == 1:
        out.append(Exists("z", Not(Eq(Var("z"), x))))
    return out[:3]


def soundness_suite(S: BValuedStructure, instances: Sequence[Formula] | None = None,
                    params: Sequence | None = None, max_params: int = 3) -> Report:
    """Instances of 25 tautology schemata must all take the value 1.

    Free variables range over ``params`` (default: the structure's own
    parameter list, at most ``max_params`` of them); quantifiers range over the
    whole domain.
    """
    instances = list(instances) if instances is not None else default_instances(S.sig)
    if params is None:
        params = S.parameters()[:max_params]
    params = list(params)
    rep = Report("soundness instances")
    cache: dict = {}
    full = S.algebra.full_mask
    count = 0
    for name, k, build in SCHEMATA:
        bad = None
        for fill in product(instances, repeat=k):
            phi = build(*fill)
            for nu in all_valuations(params, phi.free_order):
                count += 1
                if _eval(S, phi, _env(S, phi, nu), cache) != full:
                    bad = {"formula": str(phi), "valuation": nu}
                    break
            if bad:
                break
        rep.add(name, bad is None, bad)
    rep.data["instances_evaluated"] = count
    return rep


# -- evaluation over all valuations at once -----------------------------------------------

def _axes_value(arr: np.ndarray, shape: tuple) -> np.ndarray:
    return np.broadcast_to(arr, shape)


def boolean_table(S: BValuedStructure, phi: Formula, variables: Sequence[str],
                  cache: dict | None = None) -> np.ndarray:
    """Array of ⟦φ⟧ masks indexed by the values of ``variables`` (every
    variable of φ, free or bound, must be listed).

    Atomic formulas go through the scalar evaluator; connectives and
    quantifiers act on whole arrays, a quantifier over v reducing along v's
    axis.
    """
    variables = tuple(variables)
    n = len(S.domain)
    shape = (n,) * len(variables)
    axis = {v: k for k, v in enumerate(variables)}
    cache = {} if cache is None else cache
    scalar: dict = {}
    full = S.algebra.full_mask

    def go(f):
        hit = cache.get(f)
        if hit is not None:
            return hit
        if isinstance(f, (Eq, Rel)):
            vs = f.free_order
            out = np.zeros(shape, dtype=np.int64)
            for vals in product(range(n), repeat=len(vs)):
                env = dict(zip(vs, vals))
                m = _eval(S, f, env, scalar)
                idx = [slice(None)] * len(variables)
                for v, t in zip(vs, vals):
                    idx[axis[v]] = t
                out[tuple(idx)] = m
        elif isinstance(f, Not):
            out = full & ~go(f.body)
        elif isinstance(f, And):
            out = go(f.left) & go(f.right)
        elif isinstance(f, Or):
            out = go(f.left) | go(f.right)
        elif isinstance(f, Implies):
            out = (full & ~go(f.left)) | go(f.right)
        elif isinstance(f, Exists):
            out = _axes_value(np.bitwise_or.reduce(go(f.body), axis=axis[f.var], keepdims=True),
                              shape)
        elif isinstance(f, Forall):
            out = _axes_value(np.bitwise_and.reduce(go(f.body), axis=axis[f.var], keepdims=True),
                              shape)
        else:
            raise TypeError(f"not a formula: {f!r}")
        cache[f] = out
        return out

    hit = cache.get(phi)
    if hit is not None:
        return hit
    missing = {v for v in _all_vars(phi) if v not in axis}
    if missing:
        raise EvaluationError(f"variables {sorted(missing)} have no axis")
    return go(phi)


def _all_vars(phi):
    from .syntax import all_variables
    return all_variables(phi)


def tarski_table(F: FirstOrderStructure, phi: Formula, variables: Sequence[str],
                 cache: dict | None = None) -> np.ndarray:
    """Boolean array of ``F ⊨ φ`` indexed by (positions in F.domain of) the
    values of ``variables``."""
    variables = tuple(variables)
    n = len(F.domain)
    shape = (n,) * len(variables)
    axis = {v: k for k, v in enumerate(variables)}
    cache = {} if cache is None else cache

    def go(f):
        hit = cache.get(f)
        if hit is not None:
            return hit
        if isinstance(f, (Eq, Rel)):
            vs = f.free_order
            out = np.zeros(shape, dtype=bool)
            for vals in product(range(n), repeat=len(vs)):
                env = {v: F.domain[t] for v, t in zip(vs, vals)}
                idx = [slice(None)] * len(variables)
                for v, t in zip(vs, vals):
                    idx[axis[v]] = t
                out[tuple(idx)] = _tarski(F, f, env, None)
        elif isinstance(f, Not):
            out = ~go(f.body)
        elif isinstance(f, And):
            out = go(f.left) & go(f.right)
        elif isinstance(f, Or):
            out = go(f.left) | go(f.right)
        elif isinstance(f, Implies):
            out = ~go(f.left) | go(f.right)
        elif isinstance(f, Exists):
            out = _axes_value(go(f.body).any(axis=axis[f.var], keepdims=True), shape)
        elif isinstance(f, Forall):
            out = _axes_value(go(f.body).all(axis=axis[f.var], keepdims=True), shape)
        else:
            raise TypeError(f"not a formula: {f!r}")
        cache[f] = out
        return out

    hit = cache.get(phi)
    if hit is not None:
        return hit
    missing = {v for v in _all_vars(phi) if v not in axis}
    if missing:
        raise EvaluationError(f"variables {sorted(missing)} have no axis")
    return go(phi)


def los_sweep(S: BValuedStructure, formulas: Iterable[Formula], variables: Sequence[str],
              max_witnesses: int = 10) -> Report:
    """Łoś clause (i) over every valuation of ``variables``, array-at-a-time.

    Same comparison as :func:`los_check`, organised for large formula sweeps.
    """
    variables = tuple(variables)
    filters = ultrafilters(S.algebra)
    quotients = []
    for G in filters:
        Q = quotient(S, G)
        pos = {e: k for k, e in enumerate(Q.domain)}
        proj = np.array([pos[Q.projection[e]] for e in S.domain])
        quotients.append((G, Q, np.ix_(*([proj] * len(variables))), {}))
    bcache: dict = {}
    mismatches = []
    total = n_formulas = n_bad = 0
    for phi in formulas:
        n_formulas += 1
        b = boolean_table(S, phi, variables, bcache)
        for G, Q, ix, tc in quotients:
            t = tarski_table(Q, phi, variables, tc)[ix]
            diff = ((b >> G.index) & 1) != t
            total += diff.size
            if not diff.any():
                continue
            bad = np.argwhere(diff)
            n_bad += len(bad)
            for pos in bad[:max(0, max_witnesses - len(mismatches))]:
                mismatches.append({"formula": str(phi), "ultrafilter": G.principal_atom,
                                   "valuation": {v: S.domain[int(k)]
                                                 for v, k in zip(variables, pos)}})
    rep = Report("Łoś clause (i)")
    rep.add("membership in G agrees with truth in M/G", n_bad == 0, mismatches or None,
            f"{total} comparisons, {n_bad} mismatches")
    rep.data.update(formulas=n_formulas, comparisons=total, mismatches=n_bad)
    return rep
