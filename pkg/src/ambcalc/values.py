"""Compact values: finite constructor trees over bottom with opaque function
leaves, their order, and the data(.) sets obtained by resolving Amb nodes.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from typing import Iterable

from ambcalc.reduce import OutOfFuel, eval_whnf
from ambcalc.terms import BOT, NIL, Amb, Bot, Lam, Left, Nil, Pair, Right, Term


class Value:
    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, slots=True)
class BotV(Value):
    pass


@dataclass(frozen=True, slots=True)
class NilV(Value):
    pass


@dataclass(frozen=True, slots=True)
class LeftV(Value):
    arg: Value


@dataclass(frozen=True, slots=True)
class RightV(Value):
    arg: Value


@dataclass(frozen=True, slots=True)
class PairV(Value):
    fst: Value
    snd: Value


@dataclass(frozen=True, slots=True)
class AmbV(Value):
    left: Value
    right: Value


@dataclass(frozen=True, slots=True)
class FunV(Value):
    """A function leaf. Two leaves are equal when their abstractions are
    syntactically equal (up to bound variable names)."""

    term: Term


BOTV = BotV()
NILV = NilV()


class Inconsistent(ValueError):
    """Two values have no common upper bound."""


def children(v: Value) -> tuple[Value, ...]:
    match v:
        case LeftV(a) | RightV(a):
            return (a,)
        case PairV(a, b) | AmbV(a, b):
            return (a, b)
    return ()


def _same_head(a: Value, b: Value) -> bool:
    if type(a) is not type(b):
        return False
    return not isinstance(a, FunV) or a == b


def _rebuild(v: Value, args: tuple[Value, ...]) -> Value:
    if not args:
        return v
    return type(v)(*args)


def project(t: Term) -> Value:
    """The committed part of a term: data constructors structurally,
    abstractions as function leaves, anything else (Amb included) bottom."""
    match t:
        case Nil():
            return NILV
        case Left(a):
            return LeftV(project(a))
        case Right(a):
            return RightV(project(a))
        case Pair(a, b):
            return PairV(project(a), project(b))
        case Lam():
            return FunV(t)
    return BOTV


def data_value(t: Term, parts: tuple[Value, ...]) -> Value:
    """The value with the data constructor heading ``t`` over ``parts``."""
    match t:
        case Nil():
            return NILV
        case Left():
            return LeftV(*parts)
        case Right():
            return RightV(*parts)
        case Pair():
            return PairV(*parts)
    raise ValueError(f"not a data constructor: {t}")


def leq(a: Value, b: Value) -> bool:
    if isinstance(a, BotV):
        return True
    if not _same_head(a, b):
        return False
    return all(leq(x, y) for x, y in zip(children(a), children(b)))


def lub(a: Value, b: Value) -> Value:
    if isinstance(a, BotV):
        return b
    if isinstance(b, BotV):
        return a
    if not _same_head(a, b):
        raise Inconsistent(f"{render(a)} and {render(b)} are inconsistent")
    return _rebuild(a, tuple(lub(x, y) for x, y in zip(children(a), children(b))))


def lub_all(values: Iterable[Value]) -> Value:
    out: Value = BOTV
    for v in values:
        out = lub(out, v)
    return out


def rank(v: Value) -> int:
    kids = children(v)
    return 1 + max(rank(k) for k in kids) if kids else 0


def data_set(v: Value) -> frozenset[Value]:
    """All deterministic values obtained by resolving the Amb nodes of ``v``
    in every way that keeps a defined side when there is one."""
    match v:
        case BotV() | NilV() | FunV():
            return frozenset((v,))
        case AmbV(a, b):
            out: set[Value] = set()
            if not isinstance(a, BotV):
                out |= data_set(a)
            if not isinstance(b, BotV):
                out |= data_set(b)
            if not out:
                out.add(BOTV)
            return frozenset(out)
    parts = [data_set(k) for k in children(v)]
    return frozenset(_rebuild(v, combo) for combo in itertools.product(*parts))


def maximal(values: Iterable[Value]) -> frozenset[Value]:
    """Elements not strictly below another element of the collection."""
    vs = set(values)
    return frozenset(x for x in vs if not any(x != y and leq(x, y) for y in vs))


def denote_finitary(t: Term, fuel: int, depth: int = 64) -> Value:
    """A compact approximation of the denotation of a closed term from below.

    Each position is evaluated to weak head normal form with ``fuel``
    steps; positions that run out of fuel, and positions deeper than
    ``depth``, become bottom. Amb is treated as a pairing constructor.
    """
    if depth < 0:
        return BOTV
    try:
        w = eval_whnf(t, fuel)
    except OutOfFuel:
        return BOTV
    match w:
        case Nil():
            return NILV
        case Left(a):
            return LeftV(denote_finitary(a, fuel, depth - 1))
        case Right(a):
            return RightV(denote_finitary(a, fuel, depth - 1))
        case Pair(a, b):
            return PairV(denote_finitary(a, fuel, depth - 1), denote_finitary(b, fuel, depth - 1))
        case Amb(a, b):
            return AmbV(denote_finitary(a, fuel, depth - 1), denote_finitary(b, fuel, depth - 1))
    return FunV(w)


def has_amb(v: Value) -> bool:
    return isinstance(v, AmbV) or any(has_amb(k) for k in children(v))


# ---------------------------------------------------------------------------
# Rendering

def fun_tag(t: Term) -> str:
    from ambcalc.printer import print_term

    return "fun<" + hashlib.sha1(print_term(t).encode()).hexdigest()[:8] + ">"


def render(v: Value) -> str:
    match v:
        case BotV():
            return "bot"
        case NilV():
            return "Nil"
        case LeftV(a):
            return f"Left({render(a)})"
        case RightV(a):
            return f"Right({render(a)})"
        case PairV(a, b):
            return f"Pair({render(a)}, {render(b)})"
        case AmbV(a, b):
            return f"Amb({render(a)}, {render(b)})"
        case FunV(t):
            return fun_tag(t)
    return repr(v)


def render_set(values: Iterable[Value]) -> str:
    return "{" + ", ".join(sorted(render(v) for v in values)) + "}"


def to_json(v: Value) -> object:
    match v:
        case BotV():
            return "bot"
        case NilV():
            return "Nil"
        case LeftV(a):
            return {"Left": to_json(a)}
        case RightV(a):
            return {"Right": to_json(a)}
        case PairV(a, b):
            return {"Pair": [to_json(a), to_json(b)]}
        case AmbV(a, b):
            return {"Amb": [to_json(a), to_json(b)]}
        case FunV(t):
            return {"fun": fun_tag(t)[4:-1]}
    raise TypeError(v)


def value_of_literal(t: Term) -> Value:
    """Read a constructor-only term (``bot``, ``Nil``, ``Left``, ``Right``,
    ``Pair``, ``Amb``, abstractions as function leaves) as a value."""
    match t:
        case Bot():
            return BOTV
        case Nil():
            return NILV
        case Left(a):
            return LeftV(value_of_literal(a))
        case Right(a):
            return RightV(value_of_literal(a))
        case Pair(a, b):
            return PairV(value_of_literal(a), value_of_literal(b))
        case Amb(a, b):
            return AmbV(value_of_literal(a), value_of_literal(b))
        case Lam():
            return FunV(t)
    raise ValueError(f"not a value literal: {t}")


def value_to_term(v: Value) -> Term:
    match v:
        case BotV():
            return BOT
        case NilV():
            return NIL
        case LeftV(a):
            return Left(value_to_term(a))
        case RightV(a):
            return Right(value_to_term(a))
        case PairV(a, b):
            return Pair(value_to_term(a), value_to_term(b))
        case AmbV(a, b):
            return Amb(value_to_term(a), value_to_term(b))
        case FunV(t):
            return t
    raise TypeError(v)
