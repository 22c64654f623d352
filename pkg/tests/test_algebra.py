import random

import pytest
from hypothesis import given, strategies as st

from boolvalued import (
    AlgebraError, BooleanAlgebra, FinitePoset, PosetError, complement, inf, intclosure,
    is_antichain, is_predense, join, make_powerset_algebra, meet, regular_open_sets,
    ro_completion, sup, ultrafilters,
)
from boolvalued.algebra import ro_isomorphism
from boolvalued.generators import random_poset

B3 = make_powerset_algebra(["a", "b", "c"])


def el(*atoms):
    return B3.element(atoms)


def test_powerset_sizes():
    assert len(make_powerset_algebra(["a"])) == 2
    assert len(B3) == 8
    assert len(B3.elements()) == 8
    with pytest.raises(AlgebraError):
        make_powerset_algebra(["a", "a"])
    with pytest.raises(AlgebraError):
        BooleanAlgebra(())


def test_lattice_operations():
    assert join(el("a"), el("b")) == el("a", "b")
    assert complement(el("a")) == el("b", "c")
    assert meet(el("a", "b"), el("b", "c")) == el("b")
    assert sup([el("a"), el("b")]) == el("a", "b")
    assert sup([], B3) == B3.zero
    assert inf([el("a", "b"), el("b", "c")]) == el("b")
    assert inf([], B3) == B3.one


def test_antichains():
    assert is_antichain([el("a"), el("b")])
    assert not is_predense([el("a"), el("b")])
    assert is_antichain([el("a"), el("b"), el("c")])
    assert is_predense([el("a"), el("b"), el("c")])
    assert not is_antichain([el("a", "b"), el("b")])


def test_ultrafilters_are_principal():
    assert len(ultrafilters(B3)) == 3
    assert len(ultrafilters(make_powerset_algebra(["a"]))) == 1
    B2 = make_powerset_algebra(["a", "b"])
    G = ultrafilters(B2)[0]
    assert G.principal_atom == "a"
    assert B2.element(["a"]) in G and B2.one in G
    assert B2.element(["b"]) not in G and B2.zero not in G


def test_different_algebras_do_not_mix():
    other = make_powerset_algebra(["x", "y", "z"])
    with pytest.raises(AlgebraError):
        join(el("a"), other.element(["x"]))


def test_intclosure_examples():
    chain = FinitePoset.from_relation(("c0", "c1"), [("c0", "c1")])
    assert intclosure(chain, set()) == frozenset()
    assert intclosure(chain, {"c0", "c1"}) == {"c0", "c1"}
    assert intclosure(chain, {"c0"}) == {"c0", "c1"}
    with pytest.raises(PosetError):
        intclosure(chain, {"c1"})


def test_ro_completion_examples():
    assert len(ro_completion(FinitePoset.antichain(["p", "q"])).algebra) == 4
    assert len(ro_completion(FinitePoset.antichain(["p"])).algebra) == 2
    # root above two incomparable points
    vee = FinitePoset.from_relation(("a", "b", "r"), [("a", "r"), ("b", "r")])
    ro = ro_completion(vee)
    assert ro.algebra.n_atoms == 2
    assert sorted(map(sorted, ro.atom_sets)) == [["a"], ["b"]]
    assert ro.embedding["r"].is_one
    algebra, embedding = ro
    assert algebra is ro.algebra and embedding is ro.embedding


def brute_regular_open(P):
    # a down-set U is regular open iff it equals the interior of its closure,
    # computed here from scratch: closure = up-set generated, interior = largest down-set inside
    out = set()
    for U in P.down_sets():
        closure = {p for p in P.elements if any(r in U for r in P.down(p))}
        interior = frozenset(p for p in closure if P.down(p) <= closure)
        if interior == U:
            out.add(U)
    return out


@pytest.mark.parametrize("seed", range(40))
def test_regular_open_sets_match_brute_force(seed):
    rng = random.Random(seed)
    P = random_poset(rng, rng.randint(1, 5))
    assert set(regular_open_sets(P)) == brute_regular_open(P)
    assert len(brute_regular_open(P)) == 2 ** len(P.minimal_elements())


@given(st.integers(0, 10_000), st.integers(1, 6))
def test_ro_isomorphism_property(seed, n):
    _, rep = ro_isomorphism(random_poset(random.Random(seed), n))
    assert rep.ok, rep.failures


@given(st.integers(0, 255), st.integers(0, 255))
def test_de_morgan(x, y):
    B = BooleanAlgebra(tuple(range(8)))
    a, b = B.from_mask(x), B.from_mask(y)
    assert ~(a | b) == ~a & ~b
    assert ~(a & b) == ~a | ~b
    assert (a <= b) == ((a & b) == a)
