"""Surface syntax for terms, types and program files.

Terms::

    \\x y. M            abstraction (``λ`` is accepted for ``\\``)
    M N                application, left associative
    rec M              recursion
    bot  Nil  Left(M)  Right(M)  Pair(M, N)  Amb(M, N)
    case M of { Nil -> N; Left(a) -> L; Right(b) -> R;
                Pair(a, b) -> P; Amb(a, b) -> Q; fun(f) -> F }

Types::

    1   a   T + T   T * T   T -> T   fix a. T   A(T)

``*`` binds tighter than ``+``, which binds tighter than ``->``. ``+`` and
``*`` associate to the left, ``->`` to the right.

Program files are sequences of declarations ending in ``;``::

    let name = M;
    def name : T = M;
    type name = T;

Line comments start with ``--``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ambcalc.terms import (
    BOT, CLAUSES, CLAUSE_ARITY, DEFAULT_HINTS, NIL, Amb, App, Case, Free, Lam, Left, Pair, Rec, Right,
    Term, abstract, free_names, replace_free,
)
from ambcalc.ty import AmbTy, Arrow, Fix, Prod, Sum, TVar, Ty, UNIT


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|--[^\n]*)
  | (?P<arrow>->|→)
  | (?P<lam>\\|λ)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<num>[0-9]+)
  | (?P<punct>[().,;{}=:+*])
    """,
    re.VERBOSE,
)

_PATTERNS = {"Nil": "nil", "Left": "left", "Right": "right", "Pair": "pair", "Amb": "amb", "fun": "fun"}
_RESERVED = {"rec", "bot", "case", "of", "let", "def", "type", "fix", "Nil", "Left", "Right", "Pair", "Amb", "fun"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            if kind == "arrow":
                text = "->"
            elif kind == "lam":
                text = "\\"
            out.append(Token(kind, text, line, pos - line_start + 1))
        for i, ch in enumerate(text if kind == "ws" else ""):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


@dataclass
class Definition:
    name: str
    term: Term
    ty: Ty | None
    line: int


@dataclass
class Program:
    """Parsed program file. Terms of definitions are closed: references to
    earlier definitions are inlined."""

    defs: dict[str, Definition] = field(default_factory=dict)
    types: dict[str, Ty] = field(default_factory=dict)

    def term(self, name: str) -> Term:
        return self.defs[name].term

    def merged(self, other: Program) -> Program:
        return Program({**self.defs, **other.defs}, {**self.types, **other.types})


class _Parser:
    def __init__(self, src: str, type_aliases: dict[str, Ty] | None = None) -> None:
        self.toks = tokenize(src)
        self.i = 0
        self.aliases = dict(type_aliases or {})

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind != "eof" and t.text == text

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"{message}, found {found}", tok.line, tok.col)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self, what: str = "identifier") -> str:
        t = self.tok
        if t.kind != "ident" or t.text in _RESERVED:
            raise self.error(f"expected {what}")
        self.i += 1
        return t.text

    def binder(self) -> str:
        return self.ident("variable name")

    # -- terms
    def term(self) -> Term:
        if self.at("\\"):
            return self.lambda_()
        return self.application()

    def lambda_(self) -> Term:
        self.expect("\\")
        names = [self.binder()]
        while not self.at("."):
            names.append(self.binder())
        self.expect(".")
        body = self.term()
        for name in reversed(names):
            body = Lam(abstract(body, (name,)), name)
        return body

    def application(self) -> Term:
        fn = self.prim()
        while True:
            if self.at("\\"):
                return App(fn, self.lambda_())
            if not self.starts_prim():
                return fn
            fn = App(fn, self.prim())

    def starts_prim(self) -> bool:
        t = self.tok
        if t.kind == "ident":
            return t.text not in {"of", "let", "def", "type", "fix", "fun"}
        return t.text == "("

    def prim(self) -> Term:
        if self.at("rec"):
            self.i += 1
            if self.at("\\"):
                return Rec(self.lambda_())
            return Rec(self.prim())
        return self.atom()

    def atom(self) -> Term:
        t = self.tok
        if t.text == "(" and t.kind == "punct":
            self.i += 1
            inner = self.term()
            self.expect(")")
            return inner
        if t.kind != "ident":
            raise self.error("expected a term")
        match t.text:
            case "bot":
                self.i += 1
                return BOT
            case "Nil":
                self.i += 1
                return NIL
            case "Left" | "Right":
                self.i += 1
                self.expect("(")
                arg = self.term()
                self.expect(")")
                return Left(arg) if t.text == "Left" else Right(arg)
            case "Pair" | "Amb":
                self.i += 1
                self.expect("(")
                a = self.term()
                self.expect(",")
                b = self.term()
                self.expect(")")
                return Pair(a, b) if t.text == "Pair" else Amb(a, b)
            case "case":
                return self.case()
        if t.text in _RESERVED:
            raise self.error("expected a term")
        self.i += 1
        return Free(t.text)

    def case(self) -> Term:
        self.expect("case")
        scrut = self.term()
        self.expect("of")
        self.expect("{")
        bodies: dict[str, Term] = {}
        hints = dict(zip(CLAUSES[1:], DEFAULT_HINTS))
        while not self.at("}"):
            tok = self.tok
            if tok.kind != "ident" or tok.text not in _PATTERNS:
                raise self.error("expected a clause pattern")
            name = _PATTERNS[tok.text]
            if name in bodies:
                raise ParseError(f"duplicate {tok.text} clause", tok.line, tok.col)
            self.i += 1
            binders: list[str] = []
            if CLAUSE_ARITY[name]:
                self.expect("(")
                binders.append(self.binder())
                if CLAUSE_ARITY[name] == 2:
                    self.expect(",")
                    binders.append(self.binder())
                self.expect(")")
                hints[name] = tuple(binders)
            self.expect("->")
            bodies[name] = abstract(self.term(), binders)
            if not self.at("}"):
                self.expect(";")
        self.expect("}")
        return Case(scrut, *(bodies.get(n, BOT) for n in CLAUSES), tuple(hints[n] for n in CLAUSES[1:]))

    # -- types
    def type_(self) -> Ty:
        if self.at("fix"):
            self.i += 1
            var = self.binder()
            self.expect(".")
            saved = self.aliases.pop(var, None)
            body = self.type_()
            if saved is not None:
                self.aliases[var] = saved
            return Fix(var, body)
        dom = self.sum_type()
        if self.at("->"):
            self.i += 1
            return Arrow(dom, self.type_())
        return dom

    def sum_type(self) -> Ty:
        t = self.prod_type()
        while self.at("+"):
            self.i += 1
            t = Sum(t, self.prod_type())
        return t

    def prod_type(self) -> Ty:
        t = self.atom_type()
        while self.at("*"):
            self.i += 1
            t = Prod(t, self.atom_type())
        return t

    def atom_type(self) -> Ty:
        t = self.tok
        if t.kind == "num":
            if t.text != "1":
                raise self.error("the only numeric type is 1")
            self.i += 1
            return UNIT
        if t.text == "(" and t.kind == "punct":
            self.i += 1
            inner = self.type_()
            self.expect(")")
            return inner
        if t.text == "A":
            self.i += 1
            self.expect("(")
            inner = self.type_()
            self.expect(")")
            return AmbTy(inner)
        name = self.ident("a type")
        return self.aliases.get(name, TVar(name))

    # -- programs
    def program(self, scope: dict[str, Term], closed: bool) -> Program:
        prog = Program()
        env = dict(scope)
        while self.tok.kind != "eof":
            tok = self.tok
            if self.at("type"):
                self.i += 1
                name = self.ident("type name")
                self.expect("=")
                ty = self.type_()
                self.expect(";")
                self.aliases[name] = ty
                prog.types[name] = ty
                continue
            if self.at("let"):
                self.i += 1
                name = self.ident("definition name")
                ty = None
            elif self.at("def"):
                self.i += 1
                name = self.ident("definition name")
                self.expect(":")
                ty = self.type_()
            else:
                raise self.error("expected 'let', 'def' or 'type'")
            self.expect("=")
            start = self.tok
            term = replace_free(self.term(), env)
            self.expect(";")
            if closed:
                unbound = sorted(free_names(term))
                if unbound:
                    raise ParseError(f"unbound name {unbound[0]!r} in {name}", start.line, start.col)
            prog.defs[name] = Definition(name, term, ty, tok.line)
            env[name] = term
        return prog


def parse_term(src: str, env: dict[str, Term] | None = None) -> Term:
    """Parse one term. Names that are not bound inside the term are looked
    up in ``env`` and otherwise left as free names."""
    p = _Parser(src)
    t = p.term()
    if p.tok.kind != "eof":
        raise p.error("expected end of input")
    return replace_free(t, env) if env else t


def parse_type(src: str, aliases: dict[str, Ty] | None = None) -> Ty:
    p = _Parser(src, aliases)
    t = p.type_()
    if p.tok.kind != "eof":
        raise p.error("expected end of input")
    return t


def parse_program(src: str, *, prelude: bool = True) -> Program:
    """Parse a program file. With ``prelude`` the shipped prelude is in scope,
    and its definitions are included in the result."""
    if prelude:
        from ambcalc.prelude import load_prelude

        base = load_prelude()
    else:
        base = Program()
    p = _Parser(src, base.types)
    own = p.program({n: d.term for n, d in base.defs.items()}, closed=True)
    return base.merged(own)
