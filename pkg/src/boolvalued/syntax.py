"""First-order syntax: signatures, terms, formulas, a parser and a printer.

Concrete grammar (ASCII)::

    formula  := implies
    implies  := or ( "->" implies )?          right associative
    or       := and ( "|" and )*
    and      := unary ( "&" unary )*
    unary    := "~" unary | ("A" | "E") var "." formula | "(" formula ")" | atom
    atom     := REL "(" term ("," term)* ")" | term "=" term
    term     := var | FUN "(" term ("," term)* ")" | CONST

Quantifier bodies extend as far to the right as possible.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Union

DEFAULT_MAX_DEPTH = 32
QUANTIFIER_KEYWORDS = ("A", "E")


class SyntaxErrorAt(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    relations: Mapping[str, int]
    functions: Mapping[str, int]

    def __init__(self, relations: Mapping[str, int] | None = None,
                 functions: Mapping[str, int] | None = None):
        rel = dict(relations or {})
        fun = dict(functions or {})
        clash = set(rel) & set(fun)
        if clash:
            raise SignatureError(f"symbols used as both relation and function: {sorted(clash)}")
        for name, arity in list(rel.items()) + list(fun.items()):
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
                raise SignatureError(f"bad symbol name {name!r}")
            if name in QUANTIFIER_KEYWORDS:
                raise SignatureError(f"{name!r} is reserved for quantifiers")
            if not isinstance(arity, int) or arity < 0:
                raise SignatureError(f"bad arity {arity!r} for {name!r}")
        for name, arity in rel.items():
            if arity == 0:
                raise SignatureError(f"relation {name!r} needs arity >= 1")
        object.__setattr__(self, "relations", tuple(sorted(rel.items())))
        object.__setattr__(self, "functions", tuple(sorted(fun.items())))

    @cached_property
    def relation_arity(self) -> dict:
        return dict(self.relations)

    @cached_property
    def function_arity(self) -> dict:
        return dict(self.functions)

    def to_json(self) -> dict:
        return {"relations": dict(self.relations), "functions": dict(self.functions)}

    @classmethod
    def from_json(cls, data: Mapping) -> Signature:
        return cls(data.get("relations", {}), data.get("functions", {}))


# -- terms -------------------------------------------------------------------

class _Node:
    """Syntax nodes are immutable; hash and free variables are memoized."""

    @cached_property
    def _hash(self) -> int:
        return hash((type(self).__name__,) + self._key())

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, eq=True)
class Var(_Node):
    name: str

    def _key(self):
        return (self.name,)

    __hash__ = _Node.__hash__

    def __str__(self):
        return self.name


@dataclass(frozen=True, eq=True)
class Apply(_Node):
    function: str
    args: tuple = ()

    def _key(self):
        return (self.function, self.args)

    __hash__ = _Node.__hash__

    def __str__(self):
        return format_term(self)


Term = Union[Var, Apply]


def term_variables(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t.name])
    out = frozenset()
    for a in t.args:
        out |= term_variables(a)
    return out


# -- formulas ----------------------------------------------------------------

class _Formula(_Node):
    @cached_property
    def free(self) -> frozenset:
        return free_variables(self)

    @cached_property
    def free_order(self) -> tuple:
        return tuple(sorted(self.free))

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True, eq=True)
class Eq(_Formula):
    left: Term
    right: Term

    def _key(self):
        return (self.left, self.right)

    __hash__ = _Node.__hash__
    __str__ = _Formula.__str__


@dataclass(frozen=True, eq=True)
class Rel(_Formula):
    name: str
    args: tuple

    def _key(self):
        return (self.name, self.args)

    __hash__ = _Node.__hash__
    __str__ = _Formula.__str__


@dataclass(frozen=True, eq=True)
class Not(_Formula):
    body: "Formula"

    def _key(self):
        return (self.body,)

    __hash__ = _Node.__hash__
    __str__ = _Formula.__str__


@dataclass(frozen=True, eq=True)
class And(_Formula):
    left: "Formula"
    right: "Formula"

    def _key(self):
        return (self.left, self.right)

    __hash__ = _Node.__hash__
    __str__ = _Formula.__str__


@dataclass(frozen=True, eq=True)
class Or(_Formula):
    left: "Formula"
    right: "Formula"

    def _key(self):
        return (self.left, self.right)

    __hash__ = _Node.__hash__
    __str__ = _Formula.__str__


@dataclass(frozen=True, eq=True)
class Implies(_Formula):
    left: "Formula"
    right: "Formula"

    def _key(self):
        return (self.left, self.right)

    __hash__ = _Node.__hash__
    __str__ = _Formula.__str__


@dataclass(frozen=True, eq=True)
class Exists(_Formula):
    var: str
    body: "Formula"

    def _key(self):
        return (self.var, self.body)

    __hash__ = _Node.__hash__
    __str__ = _Formula.__str__


@dataclass(frozen=True, eq=True)
class Forall(_Formula):
    var: str
    body: "Formula"

    def _key(self):
        return (self.var, self.body)

    __hash__ = _Node.__hash__
    __str__ = _Formula.__str__


Formula = Union[Eq, Rel, Not, And, Or, Implies, Exists, Forall]
BINARY = (And, Or, Implies)
QUANTIFIERS = (Exists, Forall)
ATOMIC = (Eq, Rel)


def iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def free_variables(phi: Formula) -> frozenset:
    if isinstance(phi, Eq):
        return term_variables(phi.left) | term_variables(phi.right)
    if isinstance(phi, Rel):
        out = frozenset()
        for t in phi.args:
            out |= term_variables(t)
        return out
    if isinstance(phi, Not):
        return phi.body.free
    if isinstance(phi, BINARY):
        return phi.left.free | phi.right.free
    if isinstance(phi, QUANTIFIERS):
        return phi.body.free - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def formula_depth(phi: Formula) -> int:
    """Height of the syntax tree; atomic formulas have depth 1."""
    if isinstance(phi, ATOMIC):
        return 1
    if isinstance(phi, Not) or isinstance(phi, QUANTIFIERS):
        return 1 + formula_depth(phi.body)
    return 1 + max(formula_depth(phi.left), formula_depth(phi.right))


def is_sentence(phi: Formula) -> bool:
    return not phi.free


def lower(phi: Formula) -> Formula:
    """Rewrite into the primitive connectives ~, &, E."""
    if isinstance(phi, ATOMIC):
        return phi
    if isinstance(phi, Not):
        return Not(lower(phi.body))
    if isinstance(phi, And):
        return And(lower(phi.left), lower(phi.right))
    if isinstance(phi, Or):
        return Not(And(Not(lower(phi.left)), Not(lower(phi.right))))
    if isinstance(phi, Implies):
        return Not(And(lower(phi.left), Not(lower(phi.right))))
    if isinstance(phi, Exists):
        return Exists(phi.var, lower(phi.body))
    if isinstance(phi, Forall):
        return Not(Exists(phi.var, Not(lower(phi.body))))
    raise TypeError(f"not a formula: {phi!r}")


def all_variables(phi: Formula) -> frozenset:
    """Free and bound variable names occurring anywhere in ``phi``."""
    if isinstance(phi, ATOMIC):
        return phi.free
    if isinstance(phi, Not):
        return all_variables(phi.body)
    if isinstance(phi, BINARY):
        return all_variables(phi.left) | all_variables(phi.right)
    return all_variables(phi.body) | {phi.var}


def _fresh(base: str, avoid: set) -> str:
    stem = base.rstrip("0123456789") or "v"
    i = 1
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def substitute_term(t: Term, var: str, replacement: Term) -> Term:
    if isinstance(t, Var):
        return replacement if t.name == var else t
    return Apply(t.function, tuple(substitute_term(a, var, replacement) for a in t.args))


def substitute(phi: Formula, var: str, replacement: Term) -> Formula:
    """Capture-avoiding substitution of ``replacement`` for free ``var``."""
    if var not in phi.free:
        return phi
    if isinstance(phi, Eq):
        return Eq(substitute_term(phi.left, var, replacement),
                  substitute_term(phi.right, var, replacement))
    if isinstance(phi, Rel):
        return Rel(phi.name, tuple(substitute_term(a, var, replacement) for a in phi.args))
    if isinstance(phi, Not):
        return Not(substitute(phi.body, var, replacement))
    if isinstance(phi, BINARY):
        return type(phi)(substitute(phi.left, var, replacement),
                         substitute(phi.right, var, replacement))
    bound, body = phi.var, phi.body
    if bound in term_variables(replacement):
        new = _fresh(bound, set(all_variables(body)) | term_variables(replacement) | {var})
        body = substitute(body, bound, Var(new))
        bound = new
    return type(phi)(bound, substitute(body, var, replacement))


def check_formula(phi: Formula, sig: Signature) -> None:
    """Raise SignatureError on unknown symbols or arity mismatches."""
    def term(t):
        if isinstance(t, Var):
            return
        arity = sig.function_arity.get(t.function)
        if arity is None:
            raise SignatureError(f"unknown function symbol {t.function!r}")
        if arity != len(t.args):
            raise SignatureError(
                f"{t.function!r} has arity {arity}, applied to {len(t.args)} arguments")
        for a in t.args:
            term(a)

    if isinstance(phi, Eq):
        term(phi.left)
        term(phi.right)
    elif isinstance(phi, Rel):
        arity = sig.relation_arity.get(phi.name)
        if arity is None:
            raise SignatureError(f"unknown relation symbol {phi.name!r}")
        if arity != len(phi.args):
            raise SignatureError(
                f"{phi.name!r} has arity {arity}, applied to {len(phi.args)} arguments")
        for a in phi.args:
            term(a)
    elif isinstance(phi, Not) or isinstance(phi, QUANTIFIERS):
        check_formula(phi.body, sig)
    else:
        check_formula(phi.left, sig)
        check_formula(phi.right, sig)


# -- printer -----------------------------------------------------------------

def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.function
    return f"{t.function}({', '.join(format_term(a) for a in t.args)})"


_PREC = {Implies: 1, Or: 2, And: 3}


def format_formula(phi: Formula) -> str:
    if isinstance(phi, Eq):
        return f"{format_term(phi.left)} = {format_term(phi.right)}"
    if isinstance(phi, Rel):
        return f"{phi.name}({', '.join(format_term(a) for a in phi.args)})"
    if isinstance(phi, QUANTIFIERS):
        q = "E" if isinstance(phi, Exists) else "A"
        return f"{q} {phi.var} . {format_formula(phi.body)}"
    if isinstance(phi, Not):
        inner = format_formula(phi.body)
        if isinstance(phi.body, (Rel, Not)):
            return "~" + inner
        return f"~({inner})"
    prec = _PREC[type(phi)]
    sym = {And: "&", Or: "|", Implies: "->"}[type(phi)]

    def side(child, is_left):
        s = format_formula(child)
        if isinstance(child, QUANTIFIERS):
            return f"({s})"
        if isinstance(child, BINARY):
            cp = _PREC[type(child)]
            if cp < prec:
                return f"({s})"
            if cp == prec:
                # & and | group to the left, -> groups to the right
                right_assoc = isinstance(phi, Implies)
                if is_left == right_assoc:
                    return f"({s})"
        return s

    return f"{side(phi.left, True)} {sym} {side(phi.right, False)}"


# -- parser ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(->)|([A-Za-z_][A-Za-z0-9_]*)|([~&|().,=]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SyntaxErrorAt(f"unexpected character {text[pos:].lstrip()[:1]!r}",
                                pos + len(text[pos:]) - len(text[pos:].lstrip()))
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("op", "->", start))
        elif m.group(2):
            tokens.append(("ident", m.group(2), start))
        else:
            tokens.append(("op", m.group(3), start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature, max_depth: int):
        self.tokens = _tokenize(text)
        self.i = 0
        self.sig = sig
        self.max_depth = max_depth
        self.depth = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, v, pos = self.next()
        if v != value or kind == "eof":
            raise SyntaxErrorAt(f"expected {value!r}, got {v or 'end of input'!r}", pos)

    def enter(self, pos):
        self.depth += 1
        if self.depth > self.max_depth:
            raise SyntaxErrorAt(f"formula deeper than {self.max_depth}", pos)

    def leave(self):
        self.depth -= 1

    def formula(self):
        left = self.disjunction()
        kind, v, pos = self.peek()
        if v == "->" and kind == "op":
            self.next()
            self.enter(pos)
            right = self.formula()
            self.leave()
            return Implies(left, right)
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.peek()[:2] == ("op", "|"):
            pos = self.next()[2]
            self.enter(pos)
            left = Or(left, self.conjunction())
            self.leave()
        return left

    def conjunction(self):
        left = self.unary()
        while self.peek()[:2] == ("op", "&"):
            pos = self.next()[2]
            self.enter(pos)
            left = And(left, self.unary())
            self.leave()
        return left

    def unary(self):
        kind, v, pos = self.peek()
        if kind == "op" and v == "~":
            self.next()
            self.enter(pos)
            out = Not(self.unary())
            self.leave()
            return out
        if kind == "op" and v == "(":
            self.next()
            out = self.formula()
            self.expect(")")
            return out
        if kind == "ident" and v in QUANTIFIER_KEYWORDS:
            self.next()
            kind2, name, pos2 = self.next()
            if kind2 != "ident" or not self._is_variable(name):
                raise SyntaxErrorAt(f"expected a variable after {v!r}", pos2)
            self.expect(".")
            self.enter(pos)
            body = self.formula()
            self.leave()
            return (Exists if v == "E" else Forall)(name, body)
        return self.atom()

    def _is_variable(self, name):
        return (name[0].islower() and name not in self.sig.relation_arity
                and name not in self.sig.function_arity)

    def atom(self):
        kind, v, pos = self.peek()
        if kind == "ident" and v in self.sig.relation_arity:
            self.next()
            args = self.arguments(v, pos)
            arity = self.sig.relation_arity[v]
            if len(args) != arity:
                raise SignatureError(
                    f"{v!r} has arity {arity}, applied to {len(args)} arguments (position {pos})")
            return Rel(v, tuple(args))
        left = self.term()
        kind, v2, pos2 = self.peek()
        if v2 != "=" or kind != "op":
            raise SyntaxErrorAt(f"expected '=' after term, got {v2 or 'end of input'!r}", pos2)
        self.next()
        return Eq(left, self.term())

    def arguments(self, name, pos):
        if self.peek()[1] != "(":
            raise SyntaxErrorAt(f"{name!r} needs an argument list", pos)
        self.next()
        args = [self.term()]
        while self.peek()[1] == ",":
            self.next()
            args.append(self.term())
        self.expect(")")
        return args

    def term(self):
        kind, v, pos = self.next()
        if kind != "ident":
            raise SyntaxErrorAt(f"expected a term, got {v or 'end of input'!r}", pos)
        if v in self.sig.function_arity:
            arity = self.sig.function_arity[v]
            if arity == 0:
                return Apply(v, ())
            args = self.arguments(v, pos)
            if len(args) != arity:
                raise SignatureError(
                    f"{v!r} has arity {arity}, applied to {len(args)} arguments (position {pos})")
            return Apply(v, tuple(args))
        if v in self.sig.relation_arity:
            raise SyntaxErrorAt(f"relation {v!r} used as a term", pos)
        if not self._is_variable(v) or v in QUANTIFIER_KEYWORDS:
            raise SignatureError(f"unknown symbol {v!r} (position {pos})")
        if self.peek()[1] == "(":
            raise SignatureError(f"unknown function symbol {v!r} (position {pos})")
        return Var(v)


def rename_shadowed(phi: Formula, bound: frozenset = frozenset(),
                    avoid: set | None = None) -> Formula:
    """Rename inner quantifiers that rebind a variable already bound outside."""
    if avoid is None:
        avoid = set(all_variables(phi))
    if isinstance(phi, ATOMIC):
        return phi
    if isinstance(phi, Not):
        return Not(rename_shadowed(phi.body, bound, avoid))
    if isinstance(phi, BINARY):
        return type(phi)(rename_shadowed(phi.left, bound, avoid),
                         rename_shadowed(phi.right, bound, avoid))
    var, body = phi.var, phi.body
    if var in bound:
        new = _fresh(var, avoid)
        avoid.add(new)
        body = substitute(body, var, Var(new))
        var = new
    return type(phi)(var, rename_shadowed(body, bound | {var}, avoid))


def parse_formula(text: str, sig: Signature,
                  max_depth: int = DEFAULT_MAX_DEPTH) -> Formula:
    p = _Parser(text, sig, max_depth)
    phi = p.formula()
    kind, v, pos = p.peek()
    if kind != "eof":
        raise SyntaxErrorAt(f"unexpected {v!r}", pos)
    return rename_shadowed(phi)


def parse_term(text: str, sig: Signature) -> Term:
    p = _Parser(text, sig, DEFAULT_MAX_DEPTH)
    t = p.term()
    kind, v, pos = p.peek()
    if kind != "eof":
        raise SyntaxErrorAt(f"unexpected {v!r}", pos)
    return t


def subformulas(phi: Formula) -> Iterable[Formula]:
    yield phi
    if isinstance(phi, Not) or isinstance(phi, QUANTIFIERS):
        yield from subformulas(phi.body)
    elif isinstance(phi, BINARY):
        yield from subformulas(phi.left)
        yield from subformulas(phi.right)
