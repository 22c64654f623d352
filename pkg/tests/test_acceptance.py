"""Acceptance criteria, each run at its stated size and time budget.

Every test appends one PASS/FAIL line; conftest prints them at the end of the
session.
"""
from __future__ import annotations

import random
import time
from fractions import Fraction as F
from itertools import product

import pytest

from boolvalued import (
    BooleanAlgebra, PolishPresentation, Signature, check_structure_axioms, find_witness,
    function_from_name, germs_match_quotient, lift_relation, lift_relation_on_names, mix,
    name_from_function, point, soundness_suite, ultrafilters,
)
from boolvalued.algebra import ro_isomorphism
from boolvalued.functions import CPlusFunction, germ_quotient
from boolvalued.generators import (
    all_antichains, atomic_formulas, enumerate_codes, enumerate_formulas, random_function,
    random_poset, random_sentence, random_table_structure,
)
from boolvalued.models import Exists, Var, Eq, Rel, Apply, los_sweep, quotient
from boolvalued.polish import diagonal_code, set_code
from boolvalued.spotcheck import elementarity_spotcheck
from cases import ACCEPTANCE_LINES, SIG, function_space_cases


def record(n: int, title: str, ok: bool, elapsed: float, limit: float, detail: str = ""):
    status = "PASS" if ok and elapsed < limit else "FAIL"
    line = f"[{status}] criterion {n:>2}: {title} ({elapsed:.2f}s, budget {limit:g}s)"
    if detail:
        line += f" {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return status == "PASS"


@pytest.fixture(scope="module")
def fs_cases():
    return function_space_cases()


def test_criterion_01_structure_axioms():
    t0 = time.perf_counter()
    cases = function_space_cases()
    failures = [label for label, S in cases if not check_structure_axioms(S).ok]
    elapsed = time.perf_counter() - t0
    assert record(1, "function-space structures satisfy the model axioms", not failures,
                  elapsed, 10, f"{len(cases)} structures, {len(failures)} failing"), failures


def test_criterion_02_los_sweep():
    t0 = time.perf_counter()
    rng = random.Random(2)
    sig = Signature({"R": 2})
    formulas = enumerate_formulas(sig, ["x", "y"], 3)
    mismatches = comparisons = 0
    for k in range(50):
        S = random_table_structure(rng, rng.randint(1, 3), rng.randint(1, 3), sig)
        assert check_structure_axioms(S).ok
        rep = los_sweep(S, formulas, ["x", "y"])
        mismatches += rep.data["mismatches"]
        comparisons += rep.data["comparisons"]
    elapsed = time.perf_counter() - t0
    assert record(2, "Łoś sweep, depth <= 3", mismatches == 0, elapsed, 60,
                  f"{len(formulas)} formulas, {comparisons} comparisons, "
                  f"{mismatches} mismatches")


def test_criterion_03_mixing():
    t0 = time.perf_counter()
    rng = random.Random(3)
    Y = PolishPresentation.complex()
    pool = [point(a, b) for a in range(-2, 3) for b in range(-2, 3)]
    diag = diagonal_code(Y)
    algebras = [BooleanAlgebra(tuple(range(n))) for n in (1, 2, 3, 4)]
    every = [(B, anti) for B in algebras for anti in all_antichains(B)]
    cases = bad = 0
    # every antichain, with fresh seeded families each round, until 100 cases
    while cases < 100:
        for B, anti in every:
            n_atoms = B.n_atoms
            fs = [random_function(rng, B, Y, pool) for _ in anti]
            default = rng.choice(pool)
            g = mix(anti, fs, default, B, Y)
            cases += 1
            ok = all(a <= lift_relation(diag, g, f) for a, f in zip(anti, fs))
            covered = 0
            for a in anti:
                covered |= a.mask
            ok &= all(g.values[i] == default for i in range(n_atoms) if not covered >> i & 1)
            bad += not ok
    elapsed = time.perf_counter() - t0
    assert record(3, "mixing along antichains", bad == 0, elapsed, 5,
                  f"{len(every)} antichains, {cases} cases, {bad} failing")


def _depth_one_existentials(sig):
    x, y = Var("x"), Var("y")
    out = [Exists("x", a) for a in atomic_formulas(sig, ["x", "y"]) if "x" in a.free]
    for name, _ in sig.functions:
        out.append(Exists("x", Eq(Apply(name, (x,)), y)))
        out.append(Exists("x", Eq(Apply(name, (y,)), x)))
        out.append(Exists("x", Rel("R", (Apply(name, (x,)),))))
    return out


def test_criterion_04_fullness(fs_cases):
    t0 = time.perf_counter()
    rng = random.Random(4)
    formulas = _depth_one_existentials(SIG)
    bad = []
    for k in range(200):
        label, S = fs_cases[rng.randrange(len(fs_cases))]
        phi = rng.choice(formulas)
        nu = {"y": rng.choice(list(S.base_carrier))}
        g, rep = find_witness(S, phi, valuation=nu, pool=S.domain)
        if not rep.data["exact"]:
            bad.append((label, str(phi)))
    elapsed = time.perf_counter() - t0
    assert record(4, "fullness witnesses are exact", not bad, elapsed, 30,
                  f"200 cases, {len(bad)} inexact"), bad[:3]


def _round_trip_frames():
    C = PolishPresentation.complex()
    c_pool = ([point(a, b) for a in range(-2, 3) for b in range(-2, 3)]
              + [point(F(2 * a + 1, 2), F(2 * b + 1, 2)) for a in range(-2, 2)
                 for b in range(-2, 2)])
    D = PolishPresentation.finite([(0, 0), (1, 0), (0, 1), (F(1, 2), F(1, 3)), (3, 3)])
    frames = []
    for Y, pool in ((C, c_pool), (D, list(D.points))):
        frames.append((Y, pool, Y.adequate_bound(pool)))
    return frames


def test_criterion_05_name_round_trips():
    t0 = time.perf_counter()
    frames = _round_trip_frames()
    rng = random.Random(5)
    bad_a = bad_b = 0
    for k in range(1000):
        Y, pool, bound = frames[k % 2]
        B = BooleanAlgebra(tuple(range(rng.randint(1, 3))))
        f = random_function(rng, B, Y, pool)
        tau = name_from_function(f, bound)
        back = function_from_name(tau, list(f.values) + pool)
        bad_a += back != f
        bad_b += name_from_function(back, bound) != tau
    elapsed = time.perf_counter() - t0
    assert record(5, "name round trips", bad_a == bad_b == 0, elapsed, 30,
                  f"1000 functions, {bad_a} + {bad_b} failing")


def test_criterion_06_predicate_preservation():
    t0 = time.perf_counter()
    C = PolishPresentation.complex()
    B = BooleanAlgebra(("a", "b", "c"))
    carrier = [CPlusFunction(B, C, (point(0, 0), point(1, 0), point(F(1, 2), F(1, 2)))),
               CPlusFunction(B, C, (point(-1, 1), point(0, 0), point(0, 0))),
               CPlusFunction(B, C, (point(2, 0), point(-1, -1), point(1, 0)))]
    values = [v for f in carrier for v in f.values]
    bound = max(10, C.adequate_bound(values))
    names = {f: name_from_function(f, bound) for f in carrier}
    checked = bad = 0
    for arity in (1, 2):
        for code in enumerate_codes(10, 3, arity):
            for fs in product(carrier, repeat=arity):
                lhs = lift_relation(code, *fs)
                rhs = lift_relation_on_names(code, *(names[f] for f in fs), candidates=values)
                checked += 1
                bad += lhs != rhs
    elapsed = time.perf_counter() - t0
    assert record(6, "lifted relations agree on functions and names", bad == 0, elapsed, 30,
                  f"{checked} code/tuple pairs, {bad} disagreeing")


def test_criterion_07_ro_completion():
    t0 = time.perf_counter()
    rng = random.Random(7)
    bad = 0
    for k in range(500):
        P = random_poset(rng, rng.randint(1, 5))
        _, rep = ro_isomorphism(P)
        bad += not rep.ok
    elapsed = time.perf_counter() - t0
    assert record(7, "RO(P) is the powerset of min(P)", bad == 0, elapsed, 10,
                  f"500 posets, {bad} failing")


def test_criterion_08_soundness():
    cases = function_space_cases()
    t0 = time.perf_counter()
    bad = [label for label, S in cases if not soundness_suite(S).ok]
    elapsed = time.perf_counter() - t0
    schemata = len(soundness_suite(cases[0][1]).checks)
    assert schemata >= 20
    assert record(8, "tautology instances take value 1", not bad, elapsed, 5,
                  f"{schemata} schemata on {len(cases)} structures, {len(bad)} failing"), bad


def _spotcheck_frames(rng):
    for size in (1, 2, 3, 4):
        Y = PolishPresentation.finite(list(range(size)))
        members = [(p,) for p in Y.points if rng.random() < 0.5]
        pairs = [(p, q) for p in Y.points for q in Y.points if rng.random() < 0.4]
        sig = Signature({"R": 1, "S": 2})
        yield Y, sig, {"R": set_code(Y, members), "S": set_code(Y, pairs)}


def test_criterion_09_elementarity():
    t0 = time.perf_counter()
    rng = random.Random(9)
    mismatches = configs = 0
    for Y, sig, codes in _spotcheck_frames(rng):
        sentences = [random_sentence(rng, sig, 3) for _ in range(200)]
        for n_atoms in (1, 2, 3):
            B = BooleanAlgebra(tuple(range(n_atoms)))
            rep = elementarity_spotcheck(Y, sentences, B, sig, codes)
            mismatches += rep.data["mismatches"]
            configs += 1
    elapsed = time.perf_counter() - t0
    assert record(9, "Y and its germ structures agree", mismatches == 0, elapsed, 30,
                  f"{configs} configurations x 200 sentences, {mismatches} mismatches")


def test_criterion_10_cross_oracle():
    t0 = time.perf_counter()
    bad = checked = 0
    for label, S in function_space_cases():
        for p in ultrafilters(S.algebra):
            checked += 1
            bad += not germs_match_quotient(S, p)
    rng = random.Random(9)
    from boolvalued import as_bvalued_structure, constants_carrier
    for Y, sig, codes in _spotcheck_frames(rng):
        for n_atoms in (1, 2, 3):
            B = BooleanAlgebra(tuple(range(n_atoms)))
            S = as_bvalued_structure(B, Y, sig, codes, {}, constants_carrier(B, Y, Y.points))
            for p in ultrafilters(B):
                checked += 1
                bad += not quotient(S, p).same_as(germ_quotient(S, p).to_first_order())
    elapsed = time.perf_counter() - t0
    assert record(10, "germ quotient = generic quotient", bad == 0, elapsed, 60,
                  f"{checked} (structure, point) pairs, {bad} disagreeing")
