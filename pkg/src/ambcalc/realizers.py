"""Extracted combinators as terms, with their types, and instance-level
checks of the concurrency contract they are meant to satisfy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ambcalc.terms import (
    BOT, NIL, Amb, App, Case, Lam, Left, Pair, Rec, Right, Term, Var, app, case, lam, lams, shift, v,
)
from ambcalc.ty import AmbTy, Arrow, Sum, Ty, UNIT, nat, two, three
from ambcalc.values import NILV, AmbV, BotV, LeftV, NilV, RightV, Value


@dataclass(frozen=True)
class NamedProgram:
    name: str
    term: Term
    ty: Ty
    provenance: str


# ---------------------------------------------------------------------------
# Strict application

def strictapp(b: Term, a: Term) -> Term:
    """``b`` applied to ``a`` once ``a`` has a weak head normal form other
    than Amb, and bottom if ``a`` is bottom.

    Pattern variables are introduced as indices, so free names of ``b`` and
    ``a`` are never captured.
    """
    b1, b2 = shift(b, 1), shift(b, 2)
    return Case(
        a,
        App(b, NIL),
        App(b1, Left(Var(0))),
        App(b1, Right(Var(0))),
        App(b2, Pair(Var(1), Var(0))),
        BOT,
        App(b1, Var(0)),
        (("c",), ("c",), ("c", "d"), ("a", "b"), ("c",)),
    )


def seq(a: Term, b: Term) -> Term:
    """``b`` once ``a`` is defined, bottom otherwise."""
    return strictapp(Lam(shift(b, 1), "c"), a)


# ---------------------------------------------------------------------------
# Catalog

INJ_LEFT = lams("x", Left(v("x")))
INJ_RIGHT = lams("x", Right(v("x")))

# Decides a disjunction from a realizer of it: Left or Right, with no payload.
REST_INTRO = lams("a", case(v("a"), left=("_", Left(NIL)), right=("_", Right(NIL))))

# The partial function x |-> x - 1 on unary numerals, undefined at 0.
SLEEP = lams("a", case(v("a"), right=("b", v("b"))))

CONC_LEM = lams("a b", Amb(v("a"), v("b")))
CONC_RETURN = lams("a", Amb(v("a"), BOT))

MAPAMB = lams(
    "f c",
    case(v("c"), amb=("a", "b", Amb(strictapp(v("f"), v("a")), strictapp(v("f"), v("b"))))),
)

AMB_LR = lams("a b", Amb(strictapp(INJ_LEFT, v("a")), strictapp(INJ_RIGHT, v("b"))))

UP = lams("a", Left(v("a")))
DOWN = lams("c", case(v("c"), left=("a", v("a"))))

# Least k with f k = Left, searching 0, 1, 2, ... in unary.
MIN = lams(
    "f",
    App(
        Rec(lams("search k", case(app(v("f"), v("k")), left=("_", v("k")), right=("_", app(v("search"), Right(v("k"))))))),
        Left(NIL),
    ),
)

# The function that is 0 at 0 and undefined elsewhere.
F_PARTIAL = lams("x", case(v("x"), left=("_", Left(NIL)), right=("_", BOT)))


def _arrow(*tys: Ty) -> Ty:
    out = tys[-1]
    for t in reversed(tys[:-1]):
        out = Arrow(t, out)
    return out


def catalog() -> list[NamedProgram]:
    n, b, s3 = nat(), two(), three()
    return [
        NamedProgram("rest_intro", REST_INTRO, _arrow(b, b), "realizer of the restriction introduction rule"),
        NamedProgram("sleep", SLEEP, _arrow(n, n), "partial predecessor, defined on successors"),
        NamedProgram("conc_lem", CONC_LEM, _arrow(n, n, AmbTy(n)), "realizer of Conc-lem"),
        NamedProgram("conc_return", CONC_RETURN, _arrow(n, AmbTy(n)), "realizer of Conc-return"),
        NamedProgram("mapamb", MAPAMB, _arrow(_arrow(n, n), AmbTy(n), AmbTy(n)), "realizer of Conc-mp"),
        NamedProgram("ambLR", AMB_LR, _arrow(b, UNIT, AmbTy(s3)), "realizer of the concurrent or-elimination"),
        NamedProgram("up", UP, _arrow(n, Sum(n, UNIT)), "locally angelic choice, injection"),
        NamedProgram("down", DOWN, _arrow(Sum(n, UNIT), n), "locally angelic choice, projection"),
        NamedProgram("min", MIN, _arrow(_arrow(n, b), n), "minimisation, realizer of Rest-Markov"),
        NamedProgram("f_partial", F_PARTIAL, _arrow(n, n), "0 at 0, undefined elsewhere"),
    ]


def lookup(name: str) -> NamedProgram:
    for p in catalog():
        if p.name == name:
            return p
    raise KeyError(name)


# ---------------------------------------------------------------------------
# Numerals

def numeral(k: int) -> Term:
    """Unary natural number: 0 = Left(Nil), k + 1 = Right(k)."""
    t: Term = Left(NIL)
    for _ in range(k):
        t = Right(t)
    return t


def numeral_value(k: int) -> Value:
    out: Value = LeftV(NILV)
    for _ in range(k):
        out = RightV(out)
    return out


def value_numeral(val: Value) -> int | None:
    k = 0
    while isinstance(val, RightV):
        val, k = val.arg, k + 1
    if isinstance(val, LeftV) and isinstance(val.arg, NilV):
        return k
    return None


def predicate_term(table: list[bool], default: bool) -> Term:
    """A total decision procedure on unary numerals: ``table[k]`` for
    ``k < len(table)``, ``default`` beyond. True is Left(Nil)."""

    def answer(b: bool) -> Term:
        return Left(NIL) if b else Right(NIL)

    body: Term = answer(default)
    # Innermost first: the case analysis for numeral position len(table) - 1.
    for k in reversed(range(len(table))):
        body = case(v(f"k{k}"), left=("_", answer(table[k])), right=(f"k{k + 1}", body))
    return lam("k0", body)


# ---------------------------------------------------------------------------
# Contracts

def check_conc_contract(c: Value, ok: Callable[[Value], bool]) -> bool:
    """``c`` is ``Amb(a, b)`` with at least one side defined and every
    defined side accepted by ``ok``."""
    if not isinstance(c, AmbV):
        return False
    sides = [x for x in (c.left, c.right) if not isinstance(x, BotV)]
    return bool(sides) and all(ok(x) for x in sides)
