"""Command-line entry point.

Exit status: 0 when every check passes, 1 when some check fails, 2 on usage
or input errors.  ``--json`` prints ``{"cmd", "seed", "checks", ...}``.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field

from . import serialize as ser
from .algebra import BooleanAlgebra, ro_completion
from .functions import germ_quotient, lift_function, lift_relation, mix
from .generators import enumerate_formulas, random_sentence, random_table_structure
from .models import (
    check_morphism, check_structure_axioms, eval_boolean, find_witness, los_check, los_sweep,
    quotient, soundness_suite,
)
from .names import (
    check_name_coherence, function_from_name, lift_relation_on_names, name_from_function,
    predicate_preservation_report, quotient_equivalence_check,
)
from .polish import PolishPresentation, set_code
from .report import Report, _jsonable
from .spotcheck import elementarity_spotcheck
from .syntax import Signature, parse_formula

COMMANDS = ("eval", "check-axioms", "quotient", "los-sweep", "morphism", "ro-complete", "lift",
            "mix", "germ", "name-of", "realize", "check-name", "rb-lift", "quotient-equiv",
            "elementarity-spotcheck", "soundness", "find-witness")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    cmd: str
    seed: int = 0
    fmt: str = "text"
    inputs: dict = field(default_factory=dict)
    bound: int | None = None
    depth: int | None = None


# -- input helpers ---------------------------------------------------------------------

def _algebra(args) -> BooleanAlgebra:
    if getattr(args, "algebra", None):
        return ser.algebra_from_json(ser.load_json(args.algebra))
    if getattr(args, "atom_names", None):
        return BooleanAlgebra(tuple(a.strip() for a in args.atom_names.split(",") if a.strip()))
    raise UsageError("give --algebra FILE or --atom-names a,b,...")


def _space(args) -> PolishPresentation:
    if getattr(args, "space", None):
        return ser.space_from_json(ser.load_json(args.space))
    if getattr(args, "mode", None):
        return ser.space_from_json({"mode": args.mode})
    raise UsageError("give --space FILE or --mode MODE")


def _functions(B, Y, path):
    data = ser.load_json(path)
    if isinstance(data, dict):
        data = [data]
    return [ser.function_from_json(B, Y, f) for f in data]


def _points(path):
    return [ser.point_from_json(p) for p in ser.load_json(path)]


def _valuation(S, text):
    out = {}
    if not text:
        return out
    look = {str(e): e for e in S.domain}
    for part in text.split(","):
        if "=" not in part:
            raise UsageError(f"bad valuation entry {part!r}; use var=element")
        v, e = (s.strip() for s in part.split("=", 1))
        if e not in look:
            raise UsageError(f"unknown domain element {e!r}")
        out[v] = look[e]
    return out


def _render_structure(F) -> dict:
    return {"domain": [str(x) for x in F.domain],
            "relations": {k: sorted([[str(x) for x in t] for t in v])
                          for k, v in F.relations.items()},
            "functions": {k: {",".join(str(x) for x in t): str(y) for t, y in v.items()}
                          for k, v in F.functions.items()}}


# -- commands ------------------------------------------------------------------------------
# Each returns (Report, extra JSON fields, text for the text format or None).

def cmd_eval(args, cfg):
    S = ser.structure_from_json(ser.load_json(args.model))
    phi = parse_formula(args.formula, S.sig)
    value = eval_boolean(S, phi, _valuation(S, args.valuation))
    rep = Report("eval")
    return rep, {"formula": str(phi), "value": ser.element_to_json(value)}, repr(value)


def cmd_check_axioms(args, cfg):
    S = ser.structure_from_json(ser.load_json(args.model))
    return check_structure_axioms(S, args.method), {}, None


def cmd_quotient(args, cfg):
    S = ser.structure_from_json(ser.load_json(args.model))
    G = ser.ultrafilter_from_json(S.algebra, args.ultrafilter)
    F = quotient(S, G)
    body = _render_structure(F)
    body["classes"] = {str(k): str(v) for k, v in F.projection.items()}
    return Report("quotient"), {"quotient": body}, ser.dumps(body)


def cmd_los_sweep(args, cfg):
    variables = [v.strip() for v in args.variables.split(",")]
    if args.model:
        S = ser.structure_from_json(ser.load_json(args.model))
        structures = [S]
    else:
        rng = random.Random(cfg.seed)
        sig = Signature({"R": 2})
        structures = [random_table_structure(rng, args.atoms, args.domain, sig)
                      for _ in range(args.structures)]
    rep = Report("Łoś sweep")
    total = 0
    for k, S in enumerate(structures):
        axioms = check_structure_axioms(S)
        rep.add(f"structure {k}: axioms", axioms.ok)
        formulas = enumerate_formulas(S.sig, variables, cfg.depth)
        r = los_sweep(S, formulas, variables) if args.vectorized else los_check(S, formulas)
        total += r.data["mismatches"]
        rep.extend(r, prefix=f"structure {k}: ")
    return rep, {"mismatches": total, "structures": len(structures)}, None


def cmd_morphism(args, cfg):
    M = ser.structure_from_json(ser.load_json(args.source))
    N = ser.structure_from_json(ser.load_json(args.target))
    w = ser.witness_from_json(M, N, ser.load_json(args.witness))
    rep = check_morphism(M, N, w)
    cls = rep.data["classification"]
    if args.expect and cls != args.expect:
        rep.add(f"classification is {args.expect}", False, cls)
    return rep, {"classification": cls}, None


def cmd_ro_complete(args, cfg):
    P = ser.poset_from_json(ser.load_json(args.poset))
    ro = ro_completion(P)
    rep = Report("regular-open completion")
    mins = P.minimal_elements()
    rep.add("number of atoms = number of minimal elements", ro.algebra.n_atoms == len(mins))
    body = {"atoms": [sorted(map(str, s)) for s in ro.atom_sets],
            "embedding": {str(p): ser.element_to_json(x) for p, x in ro.embedding.items()}}
    return rep, body, None


def cmd_lift(args, cfg):
    B, Y = _algebra(args), _space(args)
    code = ser.code_from_json(ser.load_json(args.code))
    fs = _functions(B, Y, args.functions)
    if args.graph:
        g = lift_function(code, *fs)
        return Report("lift"), {"function": ser.function_to_json(g)}, repr(g)
    value = lift_relation(code, *fs)
    return Report("lift"), {"value": ser.element_to_json(value)}, repr(value)


def cmd_mix(args, cfg):
    B, Y = _algebra(args), _space(args)
    anti = [ser.element_from_json(B, x) for x in ser.load_json(args.antichain)]
    fs = _functions(B, Y, args.functions) if args.functions else []
    default = None
    if args.default is not None:
        # a JSON list "[re, im]" or a bare rational "p/q"
        text = args.default.strip()
        default = ser.point_from_json(json.loads(text) if text.startswith("[") else text)
    f = mix(anti, fs, default, B, Y)
    return Report("mix"), {"function": ser.function_to_json(f)}, repr(f)


def cmd_germ(args, cfg):
    S = ser.structure_from_json(ser.load_json(args.model))
    if not hasattr(S, "space"):
        raise UsageError("germ needs a function-space structure")
    p = ser.ultrafilter_from_json(S.algebra, args.ultrafilter)
    g = germ_quotient(S, p)
    rep = g.value_isomorphism_report(S)
    rep.add("germ structure = quotient M/p", quotient(S, p).same_as(g.to_first_order()))
    body = _render_structure(g.to_first_order())
    body["values"] = {str(k): ser.point_to_json(v) for k, v in g.value.items()}
    return rep, {"germs": body}, None


def cmd_name_of(args, cfg):
    B, Y = _algebra(args), _space(args)
    (f,) = _functions(B, Y, args.function)[:1]
    k = args.bound if args.bound is not None else Y.adequate_bound(f.values)
    tau = name_from_function(f, k)
    return Report("name"), {"name": ser.name_to_json(tau)}, ser.dumps(ser.name_to_json(tau))


def cmd_realize(args, cfg):
    B, Y = _algebra(args), _space(args)
    tau = ser.name_from_json(B, Y, ser.load_json(args.name))
    f = function_from_name(tau, _points(args.candidates))
    return Report("realize"), {"function": ser.function_to_json(f)}, repr(f)


def cmd_check_name(args, cfg):
    B, Y = _algebra(args), _space(args)
    tau = ser.name_from_json(B, Y, ser.load_json(args.name))
    return check_name_coherence(tau), {}, None


def cmd_rb_lift(args, cfg):
    B, Y = _algebra(args), _space(args)
    code = ser.code_from_json(ser.load_json(args.code))
    cands = _points(args.candidates) if args.candidates else []
    if args.functions:
        fs = _functions(B, Y, args.functions)
        k = args.bound if args.bound is not None else Y.adequate_bound(
            [v for f in fs for v in f.values])
        rep = predicate_preservation_report(code, fs, k, cands)
        return rep, {"value": ser.element_to_json(rep.data["value"])}, None
    if not args.names:
        raise UsageError("rb-lift needs --names FILE or --functions FILE")
    data = ser.load_json(args.names)
    names = [ser.name_from_json(B, Y, t) for t in (data if isinstance(data, list) else [data])]
    value = lift_relation_on_names(code, *names, candidates=cands)
    return Report("rb-lift"), {"value": ser.element_to_json(value)}, repr(value)


def cmd_quotient_equiv(args, cfg):
    B, Y = _algebra(args), _space(args)
    carrier = _functions(B, Y, args.carrier)
    G = ser.ultrafilter_from_json(B, args.ultrafilter)
    return quotient_equivalence_check(carrier, G), {}, None


def cmd_elementarity(args, cfg):
    if args.space:
        Y = ser.space_from_json(ser.load_json(args.space))
    else:
        Y = PolishPresentation.finite(list(range(args.points)))
    B = BooleanAlgebra(tuple(range(args.atoms)))
    rng = random.Random(cfg.seed)
    if args.relations:
        codes = {k: ser.code_from_json(v) for k, v in ser.load_json(args.relations).items()}
        sig = Signature({k: _code_arity(v) for k, v in codes.items()})
    else:
        members = [p for p in Y.points if rng.random() < 0.5] or [Y.points[0]]
        pairs = [(p, q) for p in Y.points for q in Y.points if rng.random() < 0.4]
        codes = {"R": set_code(Y, [(p,) for p in members]), "S": set_code(Y, pairs)}
        sig = Signature({"R": 1, "S": 2})
    sentences = [random_sentence(rng, sig, cfg.depth) for _ in range(args.sentences)]
    rep = elementarity_spotcheck(Y, sentences, B, sig, codes)
    return rep, {"sentences": len(sentences)}, None


def _code_arity(code):
    from .polish import code_arity
    return max(1, code_arity(code))


def cmd_soundness(args, cfg):
    S = ser.structure_from_json(ser.load_json(args.model))
    return soundness_suite(S), {}, None


def cmd_find_witness(args, cfg):
    S = ser.structure_from_json(ser.load_json(args.model))
    phi = parse_formula(args.formula, S.sig)
    g, rep = find_witness(S, phi, args.var, _valuation(S, args.valuation))
    return rep, {"witness": str(g)}, None


HANDLERS = {
    "eval": cmd_eval, "check-axioms": cmd_check_axioms, "quotient": cmd_quotient,
    "los-sweep": cmd_los_sweep, "morphism": cmd_morphism, "ro-complete": cmd_ro_complete,
    "lift": cmd_lift, "mix": cmd_mix, "germ": cmd_germ, "name-of": cmd_name_of,
    "realize": cmd_realize, "check-name": cmd_check_name, "rb-lift": cmd_rb_lift,
    "quotient-equiv": cmd_quotient_equiv, "elementarity-spotcheck": cmd_elementarity,
    "soundness": cmd_soundness, "find-witness": cmd_find_witness,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomised sweeps")
    common.add_argument("--json", action="store_true", help="print a JSON report")

    frame = argparse.ArgumentParser(add_help=False)
    frame.add_argument("--algebra", help="algebra JSON file {\"atoms\": [...]}")
    frame.add_argument("--atom-names", help="comma-separated atoms (instead of --algebra)")
    frame.add_argument("--space", help="space JSON file")
    frame.add_argument("--mode", help="built-in space mode (instead of --space)")

    p = argparse.ArgumentParser(prog="boolvalued", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", metavar="COMMAND")
    sub.required = True

    def add(name, *parents, help=None):
        return sub.add_parser(name, parents=[common, *parents], help=help)

    q = add("eval", help="Boolean value of a formula")
    q.add_argument("--model", required=True)
    q.add_argument("--formula", required=True)
    q.add_argument("--valuation", default="", help="x=elem,y=elem")

    q = add("check-axioms", help="check the model axioms exhaustively")
    q.add_argument("--model", required=True)
    q.add_argument("--method", choices=("auto", "brute", "classes"), default="auto")

    q = add("quotient", help="quotient by the ultrafilter at an atom")
    q.add_argument("--model", required=True)
    q.add_argument("--ultrafilter", required=True, help="atom")

    q = add("los-sweep", help="exhaustive Łoś comparison")
    q.add_argument("--model")
    q.add_argument("--atoms", type=int, default=3)
    q.add_argument("--domain", type=int, default=3)
    q.add_argument("--structures", type=int, default=1)
    q.add_argument("--depth", type=int, default=2)
    q.add_argument("--variables", default="x,y")
    q.add_argument("--scalar", dest="vectorized", action="store_false",
                   help="use the per-valuation evaluator")

    q = add("morphism", help="classify a morphism witness")
    q.add_argument("--source", required=True)
    q.add_argument("--target", required=True)
    q.add_argument("--witness", required=True)
    q.add_argument("--expect", choices=("none", "morphism", "injective morphism", "embedding",
                                        "isomorphism"))

    q = add("ro-complete", help="regular-open completion of a finite poset")
    q.add_argument("--poset", required=True)

    q = add("lift", frame, help="lift a Borel relation (or graph, with --graph)")
    q.add_argument("--code", required=True)
    q.add_argument("--functions", required=True)
    q.add_argument("--graph", action="store_true")

    q = add("mix", frame, help="mix functions along an antichain")
    q.add_argument("--antichain", required=True)
    q.add_argument("--functions")
    q.add_argument("--default")

    q = add("germ", help="germ structure of a function-space model")
    q.add_argument("--model", required=True)
    q.add_argument("--ultrafilter", required=True)

    q = add("name-of", frame, help="name of a function")
    q.add_argument("--function", required=True)
    q.add_argument("--bound", type=int)

    q = add("realize", frame, help="function of a name")
    q.add_argument("--name", required=True)
    q.add_argument("--candidates", required=True)

    q = add("check-name", frame, help="coherence of a name")
    q.add_argument("--name", required=True)

    q = add("rb-lift", frame, help="lift a Borel relation on names")
    q.add_argument("--code", required=True)
    q.add_argument("--names")
    q.add_argument("--functions")
    q.add_argument("--candidates")
    q.add_argument("--bound", type=int)

    q = add("quotient-equiv", frame, help="restricted functions are G-equivalent")
    q.add_argument("--carrier", required=True)
    q.add_argument("--ultrafilter", required=True)

    q = add("elementarity-spotcheck", help="Y versus germ structures on random sentences")
    q.add_argument("--space")
    q.add_argument("--points", type=int, default=3)
    q.add_argument("--relations", help="JSON {name: code}")
    q.add_argument("--atoms", type=int, default=3)
    q.add_argument("--sentences", type=int, default=200)
    q.add_argument("--depth", type=int, default=3)

    q = add("soundness", help="tautology instances take value 1")
    q.add_argument("--model", required=True)

    q = add("find-witness", help="fullness witness by mixing")
    q.add_argument("--model", required=True)
    q.add_argument("--formula", required=True)
    q.add_argument("--var")
    q.add_argument("--valuation", default="")
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    cfg = RunConfig(args.cmd, args.seed, "json" if args.json else "text",
                    depth=getattr(args, "depth", None), bound=getattr(args, "bound", None))
    try:
        rep, extra, text = HANDLERS[args.cmd](args, cfg)
    except (UsageError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if exc.args else type(exc).__name__
        if cfg.fmt == "json":
            print(ser.dumps({"cmd": cfg.cmd, "seed": cfg.seed, "error": str(msg),
                             "checks": []}), file=out)
        print(f"error: {msg}", file=err)
        return 2
    code = 0 if rep.ok else 1
    if cfg.fmt == "json":
        body = {"cmd": cfg.cmd, "seed": cfg.seed,
                "checks": [c.to_json() for c in rep.checks]}
        if rep.data:
            body["data"] = rep.to_json()["data"]
        if rep.notes:
            body["notes"] = list(rep.notes)
        body.update(_jsonable(extra))
        print(ser.dumps(body), file=out)
    else:
        if text is not None:
            print(text, file=out)
        if rep.checks or text is None:
            print(rep, file=out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
