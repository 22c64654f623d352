import pytest
from hypothesis import given, settings, strategies as st
import random

from boolvalued import (
    And, Apply, Eq, Exists, Forall, Not, Rel, Signature, SignatureError, SyntaxErrorAt, Var,
    format_formula, formula_depth, parse_formula, parse_term,
)
from boolvalued.generators import random_formula
from boolvalued.syntax import free_variables, lower, rename_shadowed, substitute

SIG = Signature({"R": 2, "P": 1}, {"c": 0, "f": 1})
x, y = Var("x"), Var("y")


def test_parse_examples():
    assert parse_formula("E x . x = c", SIG) == Exists("x", Eq(x, Apply("c", ())))
    assert parse_formula("A x . E y . R(x,y)", SIG) == Forall("x", Exists("y", Rel("R", (x, y))))
    with pytest.raises(SignatureError):
        parse_formula("R(x)", SIG)


def test_format_examples():
    assert format_formula(Eq(x, x)) == "x = x"
    assert format_formula(Not(Eq(x, y))) == "~(x = y)"


def test_free_variables():
    assert free_variables(Exists("x", Eq(x, y))) == {"y"}
    assert free_variables(Eq(x, x)) == {"x"}
    assert free_variables(parse_formula("A x . E y . R(x,y)", SIG)) == frozenset()


def test_precedence_and_associativity():
    phi = parse_formula("P(x) | P(y) & ~P(x) -> P(y) -> P(x)", SIG)
    assert format_formula(parse_formula(format_formula(phi), SIG)) == format_formula(phi)
    assert type(phi).__name__ == "Implies"
    assert type(phi.right).__name__ == "Implies"
    assert type(phi.left).__name__ == "Or"


def test_errors_carry_positions():
    with pytest.raises(SyntaxErrorAt) as exc:
        parse_formula("P(x) & ", SIG)
    assert exc.value.position is not None
    with pytest.raises(SignatureError):
        parse_formula("Q(x)", SIG)
    with pytest.raises(SignatureError):
        Signature({"E": 1})


def test_depth_counts_atoms_as_one():
    assert formula_depth(Eq(x, y)) == 1
    assert formula_depth(Not(Eq(x, y))) == 2
    assert formula_depth(Exists("x", And(Eq(x, y), Not(Eq(x, x))))) == 4


def test_terms():
    assert parse_term("f(f(c))", SIG) == Apply("f", (Apply("f", (Apply("c", ()),)),))


def test_substitution_avoids_capture():
    phi = Exists("y", Rel("R", (x, y)))
    out = substitute(phi, "x", y)
    assert free_variables(out) == {"y"}
    assert out.var != "y"


def test_lowering_removes_derived_connectives():
    phi = parse_formula("A x . (P(x) -> E y . R(x,y) | P(y))", SIG)
    text = format_formula(lower(phi))
    assert "A" not in text.split() and "->" not in text and "|" not in text


@settings(max_examples=200)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_parse_format_round_trip(seed, depth):
    phi = random_formula(random.Random(seed), SIG, depth, ["x", "y"])
    back = parse_formula(format_formula(phi), SIG)
    # shadowing quantifiers are renamed on parse; otherwise the tree comes back unchanged
    assert back == rename_shadowed(phi)
    if rename_shadowed(phi) == phi:
        assert back == phi
    assert format_formula(parse_formula(format_formula(back), SIG)) == format_formula(back)


def test_shadowed_quantifier_is_renamed():
    phi = parse_formula("E y . A y . R(y,y)", SIG)
    assert phi.var == "y" and phi.body.var != "y"
