"""Recursive types with the ``A(.)`` former.

Types use named binders. Equality of recursive types is decided
coinductively (``ty_equal``), so alpha-equivalent types compare equal
without any renaming step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass


class Ty:
    __slots__ = ()

    def __str__(self) -> str:
        return show_type(self)


@dataclass(frozen=True, slots=True)
class TVar(Ty):
    name: str


@dataclass(frozen=True, slots=True)
class Unit(Ty):
    pass


@dataclass(frozen=True, slots=True)
class Prod(Ty):
    left: Ty
    right: Ty


@dataclass(frozen=True, slots=True)
class Sum(Ty):
    left: Ty
    right: Ty


@dataclass(frozen=True, slots=True)
class Arrow(Ty):
    dom: Ty
    cod: Ty


@dataclass(frozen=True, slots=True)
class Fix(Ty):
    var: str
    body: Ty


@dataclass(frozen=True, slots=True)
class AmbTy(Ty):
    body: Ty


UNIT = Unit()


class NormalFormDiverges(ValueError):
    """Raised when stripping ``A`` heads and unfolding never reaches a core type."""


# ---------------------------------------------------------------------------
# Common types

def nat() -> Ty:
    return Fix("a", Sum(UNIT, TVar("a")))


def two() -> Ty:
    return Sum(UNIT, UNIT)


def three() -> Ty:
    return Sum(Sum(UNIT, UNIT), UNIT)


def stream(elem: Ty) -> Ty:
    """``fix a. elem * a``"""
    return Fix("a", Prod(elem, TVar("a")))


def amb_stream(elem: Ty) -> Ty:
    """``fix a. A(elem * a)``"""
    return Fix("a", AmbTy(Prod(elem, TVar("a"))))


# ---------------------------------------------------------------------------
# Variables and substitution

def free_tvars(t: Ty) -> frozenset[str]:
    match t:
        case TVar(name):
            return frozenset((name,))
        case Unit():
            return frozenset()
        case Prod(a, b) | Sum(a, b) | Arrow(a, b):
            return free_tvars(a) | free_tvars(b)
        case Fix(var, body):
            return free_tvars(body) - {var}
        case AmbTy(body):
            return free_tvars(body)
    return frozenset()  # metavariables of the checker carry no names


def _fresh(base: str, avoid: frozenset[str]) -> str:
    for i in itertools.count(1):
        name = f"{base}{i}"
        if name not in avoid:
            return name
    raise AssertionError("unreachable")


def subst_ty(t: Ty, name: str, s: Ty) -> Ty:
    """Capture-avoiding substitution of ``s`` for the type variable ``name``."""
    match t:
        case TVar(n):
            return s if n == name else t
        case Prod(a, b):
            return Prod(subst_ty(a, name, s), subst_ty(b, name, s))
        case Sum(a, b):
            return Sum(subst_ty(a, name, s), subst_ty(b, name, s))
        case Arrow(a, b):
            return Arrow(subst_ty(a, name, s), subst_ty(b, name, s))
        case AmbTy(body):
            return AmbTy(subst_ty(body, name, s))
        case Fix(var, body):
            if var == name or name not in free_tvars(body):
                return t
            fs = free_tvars(s)
            if var in fs:
                new = _fresh(var, fs | free_tvars(body))
                body = subst_ty(body, var, TVar(new))
                var = new
            return Fix(var, subst_ty(body, name, s))
    return t


def unfold(t: Fix) -> Ty:
    """One unrolling: ``body[fix a. body / a]``."""
    return subst_ty(t.body, t.var, t)


# ---------------------------------------------------------------------------
# Regularity

def _strictly_positive(t: Ty, name: str) -> bool:
    match t:
        case TVar() | Unit():
            return True
        case Prod(a, b) | Sum(a, b):
            return _strictly_positive(a, name) and _strictly_positive(b, name)
        case Arrow(a, b):
            return name not in free_tvars(a) and _strictly_positive(b, name)
        case AmbTy(body):
            return _strictly_positive(body, name)
        case Fix(var, body):
            return var == name or _strictly_positive(body, name)
    return True


def _is_amb_tower_over(t: Ty, name: str) -> bool:
    while isinstance(t, AmbTy):
        t = t.body
    return t == TVar(name)


def is_regular(t: Ty) -> bool:
    """Every ``fix a. r`` inside ``t`` is strictly positive in ``a``, ``r`` is
    not ``A^k(a)``, and ``a`` occurs free in ``r``."""
    match t:
        case TVar() | Unit():
            return True
        case Prod(a, b) | Sum(a, b) | Arrow(a, b):
            return is_regular(a) and is_regular(b)
        case AmbTy(body):
            return is_regular(body)
        case Fix(var, body):
            return (
                var in free_tvars(body)
                and _strictly_positive(body, var)
                and not _is_amb_tower_over(body, var)
                and is_regular(body)
            )
    return True


def amb_normal_form(t: Ty) -> tuple[int, Ty]:
    """Return ``(k, core)`` with ``t`` equal to ``A^k(core)`` and ``core``
    neither a fixed point nor an ``A`` type."""
    k = 0
    seen: set[Ty] = set()
    while True:
        match t:
            case AmbTy(body):
                k += 1
                t = body
            case Fix():
                if t in seen:
                    raise NormalFormDiverges(f"no core type below {t}")
                seen.add(t)
                t = unfold(t)
            case _:
                return k, t


def wrap_amb(k: int, t: Ty) -> Ty:
    for _ in range(k):
        t = AmbTy(t)
    return t


# ---------------------------------------------------------------------------
# Equality

def ty_equal(a: Ty, b: Ty) -> bool:
    """Equality of recursive types up to unfolding.

    Pairs under comparison are assumed equal while their unfoldings are
    explored; a mismatch anywhere refutes the whole comparison.
    """
    assumed: set[tuple[Ty, Ty]] = set()
    todo = [(a, b)]
    while todo:
        x, y = todo.pop()
        if x == y or (x, y) in assumed:
            continue
        if isinstance(x, Fix) or isinstance(y, Fix):
            assumed.add((x, y))
            todo.append((unfold(x) if isinstance(x, Fix) else x, unfold(y) if isinstance(y, Fix) else y))
            continue
        match x, y:
            case Prod(a1, b1), Prod(a2, b2):
                todo += [(a1, a2), (b1, b2)]
            case Sum(a1, b1), Sum(a2, b2):
                todo += [(a1, a2), (b1, b2)]
            case Arrow(a1, b1), Arrow(a2, b2):
                todo += [(a1, a2), (b1, b2)]
            case AmbTy(a1), AmbTy(a2):
                todo.append((a1, a2))
            case _:
                return False
    return True


# ---------------------------------------------------------------------------
# Printing

_T_FIX, _T_ARROW, _T_SUM, _T_PROD, _T_ATOM = range(5)


def show_type(t: Ty, level: int = _T_FIX) -> str:
    def paren(s: str, own: int) -> str:
        return s if level <= own else f"({s})"

    match t:
        case TVar(name):
            return name
        case Unit():
            return "1"
        case AmbTy(body):
            return f"A({show_type(body)})"
        case Fix(var, body):
            return paren(f"fix {var}. {show_type(body)}", _T_FIX)
        case Arrow(a, b):
            return paren(f"{show_type(a, _T_SUM)} -> {show_type(b, _T_ARROW)}", _T_ARROW)
        case Sum(a, b):
            return paren(f"{show_type(a, _T_SUM)} + {show_type(b, _T_PROD)}", _T_SUM)
        case Prod(a, b):
            return paren(f"{show_type(a, _T_PROD)} * {show_type(b, _T_ATOM)}", _T_PROD)
    return repr(t)
