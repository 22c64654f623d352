import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from boolvalued import (
    INFINITY, Basic, BooleanAlgebra, FunctionSpaceError, Prim, Signature,
    StructureError, as_bvalued_structure, check_morphism, check_structure_axioms, constant,
    constant_embedding, eval_boolean, germ_quotient, germs_match_quotient, lift_function,
    lift_relation, make_function, mix, parse_formula, point, quotient, ultrafilters,
)
from boolvalued.functions import constants_carrier
from boolvalued.generators import random_antichain, random_function
from boolvalued.polish import diagonal_code
from cases import COMPLEX, COMPLEX_CODES, COMPLEX_POOL, SIG, THREE, THREE_CODES

AB = BooleanAlgebra(("a", "b"))
ABC = BooleanAlgebra(("a", "b", "c"))
DIAG = diagonal_code(COMPLEX)


def f_ab(x, y, B=AB, Y=COMPLEX):
    return make_function(B, Y, {"a": x, "b": y})


def test_valid_functions():
    assert constant(AB, COMPLEX, point(3, -1)).is_constant
    f = f_ab(point(0, 0), point(1, 0))
    assert f("a") == point(0, 0) and f("b") == point(1, 0)
    with pytest.raises(FunctionSpaceError):
        f_ab(INFINITY, point(0, 0))
    with pytest.raises(FunctionSpaceError):
        make_function(AB, COMPLEX, {"a": point(0, 0)})
    with pytest.raises(FunctionSpaceError):
        make_function(AB, THREE, {"a": 7, "b": 0})


def test_lift_relation_examples():
    f = f_ab(point(0, 0), point(1, 0))
    g = constant(AB, COMPLEX, point(0, 0))
    assert lift_relation(DIAG, f, f).is_one
    assert lift_relation(DIAG, f, g) == AB.element("a")
    h = f_ab(point(0, 0), point(2, 0))
    assert lift_relation(Basic(0), h) == AB.element("a")


def test_lift_function_examples():
    add = Prim("add", (0, 1, 2))
    two, three = constant(AB, COMPLEX, point(2, 0)), constant(AB, COMPLEX, point(3, 0))
    assert lift_function(add, two, three) == constant(AB, COMPLEX, point(5, 0))
    f = f_ab(point(1, 0), point(2, 0))
    one = constant(AB, COMPLEX, point(1, 0))
    assert lift_function(add, f, one).values == (point(2, 0), point(3, 0))
    with pytest.raises(FunctionSpaceError, match="non-functional"):
        lift_function(Prim("inv", (0, 1)), f_ab(point(0, 0), point(1, 0)))


def test_lift_function_on_finite_space():
    p = THREE.points
    succ = THREE_CODES[1]["n"]
    f = make_function(ABC, THREE, {"a": p[0], "b": p[1], "c": p[2]})
    assert lift_function(succ, f).values == (p[1], p[2], p[0])


def test_mix_examples():
    five, seven = constant(ABC, COMPLEX, point(5, 0)), constant(ABC, COMPLEX, point(7, 0))
    g = mix([ABC.element("a"), ABC.element("b")], [five, seven], point(0, 0))
    assert g.values == (point(5, 0), point(7, 0), point(0, 0))
    assert mix([], [], point(4, 4), ABC, COMPLEX) == constant(ABC, COMPLEX, point(4, 4))
    with pytest.raises(FunctionSpaceError):
        mix([ABC.element("ab"), ABC.element("b")], [five, seven])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_mixing_property(seed, n):
    rng = random.Random(seed)
    B = BooleanAlgebra(tuple(range(n)))
    anti = random_antichain(rng, B)
    fs = [random_function(rng, B, COMPLEX, COMPLEX_POOL) for _ in anti]
    d = rng.choice(COMPLEX_POOL)
    g = mix(anti, fs, d, B, COMPLEX)
    for a, f in zip(anti, fs):
        assert a <= lift_relation(DIAG, g, f)
    covered = 0
    for a in anti:
        covered |= a.mask
    assert all(g.values[i] == d for i in range(n) if not covered >> i & 1)


def test_two_constants_pass_axioms():
    S = as_bvalued_structure(AB, COMPLEX, SIG, *COMPLEX_CODES,
                             constants_carrier(AB, COMPLEX, [point(0, 0), point(1, 0)]))
    assert check_structure_axioms(S).ok


def test_constants_are_injective():
    pts = [point(0, 0), point(1, 0), point(0, 1)]
    S = as_bvalued_structure(ABC, COMPLEX, Signature(), {}, {},
                             constants_carrier(ABC, COMPLEX, pts))
    for x, y in product(pts, repeat=2):
        v = S.eq_value(constant(ABC, COMPLEX, x), constant(ABC, COMPLEX, y))
        assert v.is_one == (x == y) and v.is_zero == (x != y)


def test_carrier_is_closed_under_mixing_and_functions():
    carrier = [f_ab(point(0, 0), point(1, 0)), constant(AB, COMPLEX, point(-1, 0))]
    S = as_bvalued_structure(AB, COMPLEX, SIG, *COMPLEX_CODES, carrier)
    values = {f.values for f in S.domain}
    per_atom = [{v[i] for v in values} for i in range(2)]
    assert values == set(product(*per_atom))
    neg = lift_function(COMPLEX_CODES[1]["n"], carrier[0])
    assert neg in S.domain


def test_carrier_bound():
    rng = random.Random(0)
    carrier = [random_function(rng, ABC, COMPLEX, COMPLEX_POOL) for _ in range(6)]
    with pytest.raises(StructureError, match="above the bound"):
        as_bvalued_structure(ABC, COMPLEX, SIG, *COMPLEX_CODES, carrier, max_carrier=10)


def test_exists_value_in_function_space():
    carrier = constants_carrier(AB, COMPLEX, [point(0, 0), point(1, 0)])
    S = as_bvalued_structure(AB, COMPLEX, SIG, *COMPLEX_CODES, carrier)
    phi = parse_formula("E x . R(x) & ~(x = y)", SIG)
    # R is the unit ball: only 0 lies in it, so the value is 1 for y = 1 and 0 for y = 0
    assert eval_boolean(S, phi, {"y": carrier[1]}).is_one
    assert eval_boolean(S, phi, {"y": carrier[0]}).is_zero


def test_constant_embedding_is_an_embedding():
    carrier = constants_carrier(AB, COMPLEX, [point(0, 0), point(1, 0), point(-1, 0)])
    S = as_bvalued_structure(AB, COMPLEX, SIG, *COMPLEX_CODES, carrier)
    Yc, w = constant_embedding(S)
    assert check_morphism(Yc, S, w).data["classification"] == "embedding"


def test_germ_examples():
    c0, c1 = constant(AB, COMPLEX, point(0, 0)), constant(AB, COMPLEX, point(1, 0))
    S = as_bvalued_structure(AB, COMPLEX, Signature({"R": 1}), {"R": Basic(0)}, {}, [c0, c1])
    for p in ultrafilters(AB):
        g = germ_quotient(S, p)
        assert len(g.germs) == 2
        assert g.value_isomorphism_report(S).ok
    f = f_ab(point(0, 0), point(1, 0))
    S = as_bvalued_structure(AB, COMPLEX, Signature(), {}, {}, [c0, c1, f])
    Ga, Gb = ultrafilters(AB)
    assert germ_quotient(S, Ga).class_of[f] == germ_quotient(S, Ga).class_of[c0]
    assert germ_quotient(S, Gb).class_of[f] == germ_quotient(S, Gb).class_of[c1]


def test_germs_agree_with_generic_quotient():
    from cases import function_space_cases
    for label, S in function_space_cases(seeds=1):
        for p in ultrafilters(S.algebra):
            assert germs_match_quotient(S, p), label
            g = germ_quotient(S, p)
            assert g.value_isomorphism_report(S).ok, label
            # relations of the germ structure are read off the values
            Q = quotient(S, p)
            for name, arity in S.sig.relations:
                for tup in Q.relations[name]:
                    assert lift_relation(S.relation_codes[name], *tup).mask & p.bit


def test_function_leaving_carrier_is_refused():
    # without the closure step n(x) would leave the carrier; the structure adds it
    c = constant(AB, COMPLEX, point(1, 0))
    S = as_bvalued_structure(AB, COMPLEX, SIG, *COMPLEX_CODES, [c])
    assert constant(AB, COMPLEX, point(-1, 0)) in S.domain
