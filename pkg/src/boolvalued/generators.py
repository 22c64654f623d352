"""Seeded generators and exhaustive enumerators for sweeps and tests."""
from __future__ import annotations

import random
from itertools import combinations_with_replacement, product
from typing import Iterator, Sequence

from .algebra import AlgElement, BooleanAlgebra, FinitePoset
from .functions import CPlusFunction
from .models import BValuedStructure
from .polish import Basic, BorelCode, Compl, PolishPresentation, UnionFin
from .syntax import (
    And, Eq, Exists, Forall, Formula, Implies, Not, Or, Rel, Signature, Var,
)


def random_partition(rng: random.Random, n: int) -> list[int]:
    """Block label per element; labels are first-occurrence ordered."""
    labels: list[int] = []
    for _ in range(n):
        labels.append(rng.randrange(max(labels, default=-1) + 2))
    return labels


def random_table_structure(rng: random.Random, n_atoms: int, n_elements: int,
                           sig: Signature, density: float = 0.5) -> BValuedStructure:
    """A structure satisfying the model axioms by construction: at each atom
    an equivalence relation, relations that are unions of classes and
    functions acting on classes."""
    B = BooleanAlgebra(tuple(range(n_atoms)))
    n = n_elements
    eq = [[0] * n for _ in range(n)]
    rel = {name: {} for name, _ in sig.relations}
    fun = {name: {} for name, _ in sig.functions}
    for a in range(n_atoms):
        bit = 1 << a
        lab = random_partition(rng, n)
        blocks = max(lab) + 1
        for i in range(n):
            for j in range(n):
                if lab[i] == lab[j]:
                    eq[i][j] |= bit
        for name, arity in sig.relations:
            chosen = {bt for bt in product(range(blocks), repeat=arity) if rng.random() < density}
            for tup in product(range(n), repeat=arity):
                if tuple(lab[i] for i in tup) in chosen:
                    rel[name][tup] = rel[name].get(tup, 0) | bit
        for name, arity in sig.functions:
            image = {bt: rng.randrange(blocks) for bt in product(range(blocks), repeat=arity)}
            for tup in product(range(n), repeat=arity):
                target = image[tuple(lab[i] for i in tup)]
                row = fun[name].setdefault(tup, [0] * n)
                for j in range(n):
                    if lab[j] == target:
                        row[j] |= bit
    domain = [f"e{i}" for i in range(n)]
    return BValuedStructure(B, sig, domain, eq, rel, fun)


def random_poset(rng: random.Random, n: int, p: float = 0.4) -> FinitePoset:
    """Random order on n labelled elements: a random DAG closed transitively."""
    perm = list(range(n))
    rng.shuffle(perm)
    pairs = [(perm[i], perm[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return FinitePoset.from_relation(tuple(range(n)), pairs)


def random_function(rng: random.Random, B: BooleanAlgebra, Y: PolishPresentation,
                    pool: Sequence) -> CPlusFunction:
    return CPlusFunction(B, Y, tuple(rng.choice(pool) for _ in range(B.n_atoms)))


def random_antichain(rng: random.Random, B: BooleanAlgebra) -> list[AlgElement]:
    """Random pairwise-disjoint nonzero elements (labels any atom subset)."""
    label = [rng.randrange(B.n_atoms + 1) for _ in range(B.n_atoms)]
    out = []
    for k in range(B.n_atoms + 1):
        m = 0
        for i, lab in enumerate(label):
            if lab == k:
                m |= 1 << i
        if m and k < B.n_atoms:
            out.append(AlgElement(B, m))
    return out


def all_antichains(B: BooleanAlgebra) -> Iterator[list[AlgElement]]:
    """Every antichain of nonzero elements, as sorted lists of masks."""
    nonzero = list(range(1, B.full_mask + 1))

    def extend(start, used, chosen):
        yield [AlgElement(B, m) for m in chosen]
        for k in range(start, len(nonzero)):
            m = nonzero[k]
            if not m & used:
                yield from extend(k + 1, used | m, chosen + [m])

    yield from extend(0, 0, [])


# -- formulas -----------------------------------------------------------------------

def atomic_formulas(sig: Signature, variables: Sequence[str]) -> list[Formula]:
    vs = [Var(v) for v in variables]
    out: list[Formula] = [Eq(a, b) for a in vs for b in vs]
    for name, arity in sig.relations:
        out += [Rel(name, args) for args in product(vs, repeat=arity)]
    return out


def enumerate_formulas(sig: Signature, variables: Sequence[str], depth: int) -> list[Formula]:
    """Every formula of depth <= ``depth`` built from ¬, ∧, ∃ over atoms in
    ``variables`` (atoms have depth 1), layer by layer."""
    if depth < 1:
        return []
    layers = [atomic_formulas(sig, variables)]
    upto = list(layers[0])
    for _ in range(1, depth):
        top = layers[-1]
        below = upto[:len(upto) - len(top)]
        new: list[Formula] = [Not(f) for f in top]
        for f in top:
            for g in upto:
                new.append(And(f, g))
            for g in below:
                new.append(And(g, f))
        for v in variables:
            new += [Exists(v, f) for f in top]
        layers.append(new)
        upto += new
    return upto


def random_formula(rng: random.Random, sig: Signature, depth: int,
                   scope: Sequence[str] = (), variables: Sequence[str] = ("x", "y", "z"),
                   p_atom: float = 0.3) -> Formula:
    """Random formula of depth <= ``depth`` whose free variables lie in
    ``scope``; with an empty scope the result is a sentence (needs depth >= 2)."""
    scope = list(scope)
    if depth <= 1 or (scope and rng.random() < p_atom):
        if not scope:
            raise ValueError("a sentence needs depth at least 2")
        choices = [("eq", 2)] + [(name, a) for name, a in sig.relations]
        name, arity = rng.choice(choices)
        args = tuple(Var(rng.choice(scope)) for _ in range(arity))
        return Eq(*args) if name == "eq" else Rel(name, args)
    kinds = ["E", "A"] if not scope else ["~", "&", "|", "->", "E", "A"]
    k = rng.choice(kinds)
    if k in ("E", "A"):
        v = rng.choice(list(variables))
        body = random_formula(rng, sig, depth - 1, sorted(set(scope) | {v}), variables, p_atom)
        return Exists(v, body) if k == "E" else Forall(v, body)
    if k == "~":
        return Not(random_formula(rng, sig, depth - 1, scope, variables, p_atom))
    left = random_formula(rng, sig, depth - 1, scope, variables, p_atom)
    right = random_formula(rng, sig, depth - 1, scope, variables, p_atom)
    return {"&": And, "|": Or, "->": Implies}[k](left, right)


def random_sentence(rng: random.Random, sig: Signature, depth: int) -> Formula:
    return random_formula(rng, sig, depth, ())


# -- Borel codes --------------------------------------------------------------------

def enumerate_codes(n_balls: int, depth: int, arity: int = 1,
                    union_sizes: Sequence[int] = (0, 2)) -> list[BorelCode]:
    """Every code of depth <= ``depth`` over balls ``0..n_balls-1`` on
    coordinates ``0..arity-1``; unions take ``union_sizes`` children
    (unordered, repetition allowed) with at least one from the top layer."""
    if depth < 1:
        return []
    layers = [[Basic(i, c) for c in range(arity) for i in range(n_balls)]]
    upto = list(layers[0])
    for _ in range(1, depth):
        top = layers[-1]
        top_ids = {id(c) for c in top}
        new: list[BorelCode] = [Compl(c) for c in top]
        for size in union_sizes:
            if size == 0:
                if len(layers) == 1:
                    new.append(UnionFin(()))
                continue
            for combo in combinations_with_replacement(range(len(upto)), size):
                if any(id(upto[k]) in top_ids for k in combo):
                    new.append(UnionFin(tuple(upto[k] for k in combo)))
        layers.append(new)
        upto += new
    return upto
