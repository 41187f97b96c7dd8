"""Abstract syntax of programs: a lambda calculus with constructors, case,
recursion, bottom and the Amb constructor.

Terms are locally nameless. Bound variables are de Bruijn indices
(``Var``); names that are not yet bound are ``Free`` nodes, which is what the
parser produces for identifiers before their binder is closed over them.
Binder names are kept only as printing hints and do not take part in
equality or hashing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterator


class ConstructorTag(enum.Enum):
    NIL = ("Nil", 0)
    LEFT = ("Left", 1)
    RIGHT = ("Right", 1)
    PAIR = ("Pair", 2)
    AMB = ("Amb", 2)

    def __init__(self, label: str, arity: int) -> None:
        self.label = label
        self.arity = arity

    @property
    def is_data(self) -> bool:
        return self is not ConstructorTag.AMB


DATA_CONSTRUCTORS = frozenset(t for t in ConstructorTag if t.is_data)


class Term:
    """Base class of all term nodes.

    Subclasses cache two derived quantities at construction time: ``_fb``,
    one more than the largest free de Bruijn index (0 for terms without
    dangling indices), and ``_h``, a structural hash.
    """

    __slots__ = ()

    def _key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other) or self._h != other._h:  # type: ignore[attr-defined]
            return False
        return self._key() == other._key()  # type: ignore[attr-defined]

    def __ne__(self, other: object) -> bool:
        return not self.__eq__(other)

    def __hash__(self) -> int:
        return self._h  # type: ignore[attr-defined]

    @property
    def is_closed(self) -> bool:
        return self._fb == 0 and not self._named  # type: ignore[attr-defined]

    def __str__(self) -> str:
        from ambcalc.printer import print_term

        return print_term(self)


def _init(obj: Term, fb: int, named: bool, key: tuple) -> None:
    object.__setattr__(obj, "_fb", fb)
    object.__setattr__(obj, "_named", named)
    object.__setattr__(obj, "_h", hash((type(obj).__name__,) + key))


_CACHE = dict(init=False, repr=False, compare=False)


@dataclass(frozen=True, eq=False, slots=True)
class Var(Term):
    index: int
    _fb: int = field(**_CACHE)
    _named: bool = field(**_CACHE)
    _h: int = field(**_CACHE)

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("de Bruijn indices must be non-negative")
        _init(self, self.index + 1, False, (self.index,))

    def _key(self) -> tuple:
        return (self.index,)


@dataclass(frozen=True, eq=False, slots=True)
class Free(Term):
    """A name waiting to be bound by an enclosing binder or a definition."""

    name: str
    _fb: int = field(**_CACHE)
    _named: bool = field(**_CACHE)
    _h: int = field(**_CACHE)

    def __post_init__(self) -> None:
        _init(self, 0, True, (self.name,))

    def _key(self) -> tuple:
        return (self.name,)


@dataclass(frozen=True, eq=False, slots=True)
class Lam(Term):
    body: Term
    hint: str = field(default="x", compare=False)
    _fb: int = field(**_CACHE)
    _named: bool = field(**_CACHE)
    _h: int = field(**_CACHE)

    def __post_init__(self) -> None:
        b = self.body
        _init(self, max(0, b._fb - 1), b._named, (b._h,))

    def _key(self) -> tuple:
        return (self.body,)


@dataclass(frozen=True, eq=False, slots=True)
class App(Term):
    fn: Term
    arg: Term
    _fb: int = field(**_CACHE)
    _named: bool = field(**_CACHE)
    _h: int = field(**_CACHE)

    def __post_init__(self) -> None:
        f, a = self.fn, self.arg
        _init(self, max(f._fb, a._fb), f._named or a._named, (f._h, a._h))

    def _key(self) -> tuple:
        return (self.fn, self.arg)


@dataclass(frozen=True, eq=False, slots=True)
class Rec(Term):
    body: Term
    _fb: int = field(**_CACHE)
    _named: bool = field(**_CACHE)
    _h: int = field(**_CACHE)

    def __post_init__(self) -> None:
        _init(self, self.body._fb, self.body._named, (self.body._h,))

    def _key(self) -> tuple:
        return (self.body,)


@dataclass(frozen=True, eq=False, slots=True)
class Bot(Term):
    _fb: int = field(**_CACHE)
    _named: bool = field(**_CACHE)
    _h: int = field(**_CACHE)

    def __post_init__(self) -> None:
        _init(self, 0, False, ())

    def _key(self) -> tuple:
        return ()


@dataclass(frozen=True, eq=False, slots=True)
class Nil(Term):
    _fb: int = field(**_CACHE)
    _named: bool = field(**_CACHE)
    _h: int = field(**_CACHE)

    def __post_init__(self) -> None:
        _init(self, 0, False, ())

    def _key(self) -> tuple:
        return ()

    tag = ConstructorTag.NIL

    @property
    def args(self) -> tuple[Term, ...]:
        return ()


@dataclass(frozen=True, eq=False, slots=True)
class Left(Term):
    arg: Term
    _fb: int = field(**_CACHE)
    _named: bool = field(**_CACHE)
    _h: int = field(**_CACHE)

    def __post_init__(self) -> None:
        _init(self, self.arg._fb, self.arg._named, (self.arg._h,))

    def _key(self) -> tuple:
        return (self.arg,)

    tag = ConstructorTag.LEFT

    @property
    def args(self) -> tuple[Term, ...]:
        return (self.arg,)


@dataclass(frozen=True, eq=False, slots=True)
class Right(Term):
    arg: Term
    _fb: int = field(**_CACHE)
    _named: bool = field(**_CACHE)
    _h: int = field(**_CACHE)

    def __post_init__(self) -> None:
        _init(self, self.arg._fb, self.arg._named, (self.arg._h,))

    def _key(self) -> tuple:
        return (self.arg,)

    tag = ConstructorTag.RIGHT

    @property
    def args(self) -> tuple[Term, ...]:
        return (self.arg,)


@dataclass(frozen=True, eq=False, slots=True)
class Pair(Term):
    fst: Term
    snd: Term
    _fb: int = field(**_CACHE)
    _named: bool = field(**_CACHE)
    _h: int = field(**_CACHE)

    def __post_init__(self) -> None:
        a, b = self.fst, self.snd
        _init(self, max(a._fb, b._fb), a._named or b._named, (a._h, b._h))

    def _key(self) -> tuple:
        return (self.fst, self.snd)

    tag = ConstructorTag.PAIR

    @property
    def args(self) -> tuple[Term, ...]:
        return (self.fst, self.snd)


@dataclass(frozen=True, eq=False, slots=True)
class Amb(Term):
    left: Term
    right: Term
    _fb: int = field(**_CACHE)
    _named: bool = field(**_CACHE)
    _h: int = field(**_CACHE)

    def __post_init__(self) -> None:
        a, b = self.left, self.right
        _init(self, max(a._fb, b._fb), a._named or b._named, (a._h, b._h))

    def _key(self) -> tuple:
        return (self.left, self.right)

    tag = ConstructorTag.AMB

    @property
    def args(self) -> tuple[Term, ...]:
        return (self.left, self.right)


# Clause order inside a Case node and the number of variables each binds.
CLAUSES = ("nil", "left", "right", "pair", "amb", "fun")
CLAUSE_ARITY = {"nil": 0, "left": 1, "right": 1, "pair": 2, "amb": 2, "fun": 1}
TAG_CLAUSE = {
    ConstructorTag.NIL: "nil",
    ConstructorTag.LEFT: "left",
    ConstructorTag.RIGHT: "right",
    ConstructorTag.PAIR: "pair",
    ConstructorTag.AMB: "amb",
}
DEFAULT_HINTS = (("a",), ("b",), ("a", "b"), ("a", "b"), ("f",))


@dataclass(frozen=True, eq=False, slots=True)
class Case(Term):
    """``case scrut of {...}`` with all six clauses present.

    A clause body lives under as many binders as its pattern has variables;
    for two-variable patterns the second variable is index 0.
    """

    scrut: Term
    nil: Term
    left: Term
    right: Term
    pair: Term
    amb: Term
    fun: Term
    hints: tuple = field(default=DEFAULT_HINTS, compare=False)
    _fb: int = field(**_CACHE)
    _named: bool = field(**_CACHE)
    _h: int = field(**_CACHE)

    def __post_init__(self) -> None:
        fb = self.scrut._fb
        named = self.scrut._named
        hs = [self.scrut._h]
        for name in CLAUSES:
            body = getattr(self, name)
            fb = max(fb, body._fb - CLAUSE_ARITY[name])
            named = named or body._named
            hs.append(body._h)
        _init(self, max(fb, 0), named, tuple(hs))

    def _key(self) -> tuple:
        return (self.scrut, self.nil, self.left, self.right, self.pair, self.amb, self.fun)

    def clause(self, name: str) -> Term:
        return getattr(self, name)

    def clause_hints(self, name: str) -> tuple[str, ...]:
        if name == "nil":
            return ()
        return tuple(self.hints[CLAUSES.index(name) - 1])

    def with_scrut(self, scrut: Term) -> Case:
        return Case(scrut, self.nil, self.left, self.right, self.pair, self.amb, self.fun, self.hints)


BOT = Bot()
NIL = Nil()

CONSTRUCTOR_TYPES = (Nil, Left, Right, Pair, Amb)
DATA_TYPES = (Nil, Left, Right, Pair)


def is_constructor(t: Term) -> bool:
    return isinstance(t, CONSTRUCTOR_TYPES)


def is_data_constructor(t: Term) -> bool:
    return isinstance(t, DATA_TYPES)


def is_whnf(t: Term) -> bool:
    """A term headed by a constructor (Amb included) or an abstraction."""
    return isinstance(t, (Lam, Nil, Left, Right, Pair, Amb))


def rebuild(t: Term, args: tuple[Term, ...]) -> Term:
    """Same constructor as ``t`` over new arguments."""
    if isinstance(t, Nil):
        return t
    return type(t)(*args)


# ---------------------------------------------------------------------------
# Index manipulation

def _map(t: Term, depth: int, on_var: Callable[[Var, int], Term], on_free: Callable[[Free, int], Term] | None = None) -> Term:
    # Generic structural rebuild; `depth` counts binders crossed so far.
    match t:
        case Var():
            return on_var(t, depth)
        case Free():
            return on_free(t, depth) if on_free else t
        case Lam(body, hint):
            return Lam(_map(body, depth + 1, on_var, on_free), hint)
        case App(f, a):
            return App(_map(f, depth, on_var, on_free), _map(a, depth, on_var, on_free))
        case Rec(body):
            return Rec(_map(body, depth, on_var, on_free))
        case Bot() | Nil():
            return t
        case Left(a):
            return Left(_map(a, depth, on_var, on_free))
        case Right(a):
            return Right(_map(a, depth, on_var, on_free))
        case Pair(a, b):
            return Pair(_map(a, depth, on_var, on_free), _map(b, depth, on_var, on_free))
        case Amb(a, b):
            return Amb(_map(a, depth, on_var, on_free), _map(b, depth, on_var, on_free))
        case Case():
            bodies = [
                _map(t.clause(name), depth + CLAUSE_ARITY[name], on_var, on_free) for name in CLAUSES
            ]
            return Case(_map(t.scrut, depth, on_var, on_free), *bodies, t.hints)
    raise TypeError(f"not a term: {t!r}")


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Add ``by`` to every free index of ``t`` that is at least ``cutoff``."""
    if by == 0 or t._fb <= cutoff:
        return t
    return _shift_walk(t, cutoff, by)


def _shift_walk(t: Term, cutoff: int, by: int) -> Term:
    if t._fb <= cutoff:
        return t
    match t:
        case Var(i):
            return Var(i + by) if i >= cutoff else t
        case Lam(body, hint):
            return Lam(_shift_walk(body, cutoff + 1, by), hint)
        case App(f, a):
            return App(_shift_walk(f, cutoff, by), _shift_walk(a, cutoff, by))
        case Rec(body):
            return Rec(_shift_walk(body, cutoff, by))
        case Left(a):
            return Left(_shift_walk(a, cutoff, by))
        case Right(a):
            return Right(_shift_walk(a, cutoff, by))
        case Pair(a, b):
            return Pair(_shift_walk(a, cutoff, by), _shift_walk(b, cutoff, by))
        case Amb(a, b):
            return Amb(_shift_walk(a, cutoff, by), _shift_walk(b, cutoff, by))
        case Case():
            bodies = [_shift_walk(t.clause(n), cutoff + CLAUSE_ARITY[n], by) for n in CLAUSES]
            return Case(_shift_walk(t.scrut, cutoff, by), *bodies, t.hints)
    return t


def instantiate(body: Term, args: list[Term] | tuple[Term, ...]) -> Term:
    """Substitute ``args[i]`` for index ``i`` in ``body`` and drop the binders.

    ``body`` is the body of ``len(args)`` binders. Free indices of the
    arguments are shifted as they move under binders, so no variable of an
    argument is ever captured.
    """
    k = len(args)
    if k == 0:
        return body
    return _subst(body, 0, tuple(args), k)


def _subst(t: Term, depth: int, args: tuple[Term, ...], k: int) -> Term:
    if t._fb <= depth:
        return t
    match t:
        case Var(i):
            if i < depth:
                return t
            if i < depth + k:
                return shift(args[i - depth], depth)
            return Var(i - k)
        case Lam(body, hint):
            return Lam(_subst(body, depth + 1, args, k), hint)
        case App(f, a):
            return App(_subst(f, depth, args, k), _subst(a, depth, args, k))
        case Rec(body):
            return Rec(_subst(body, depth, args, k))
        case Left(a):
            return Left(_subst(a, depth, args, k))
        case Right(a):
            return Right(_subst(a, depth, args, k))
        case Pair(a, b):
            return Pair(_subst(a, depth, args, k), _subst(b, depth, args, k))
        case Amb(a, b):
            return Amb(_subst(a, depth, args, k), _subst(b, depth, args, k))
        case Case():
            bodies = [_subst(t.clause(n), depth + CLAUSE_ARITY[n], args, k) for n in CLAUSES]
            return Case(_subst(t.scrut, depth, args, k), *bodies, t.hints)
    return t


def subst(body: Term, arg: Term) -> Term:
    """Beta-substitution: replace index 0 of ``body`` by ``arg``."""
    return instantiate(body, (arg,))


# ---------------------------------------------------------------------------
# Names

def abstract(t: Term, names: tuple[str, ...] | list[str]) -> Term:
    """Bind the free names ``names`` (outermost first) as de Bruijn indices.

    The result is meant to sit under ``len(names)`` new binders; the last
    name becomes index 0. Existing dangling indices are shifted out of the way.
    """
    k = len(names)
    if k == 0:
        return t
    pos = {n: k - 1 - i for i, n in enumerate(names)}  # later binders win

    def on_var(v: Var, depth: int) -> Term:
        return Var(v.index + k) if v.index >= depth else v

    def on_free(f: Free, depth: int) -> Term:
        if f.name in pos:
            return Var(pos[f.name] + depth)
        return f

    if t._fb == 0 and not t._named:
        return t
    return _map(t, 0, on_var, on_free)


def replace_free(t: Term, env: dict[str, Term]) -> Term:
    """Replace free names by terms. Replacements should be closed."""
    if not t._named:
        return t

    def on_var(v: Var, depth: int) -> Term:
        return v

    def on_free(f: Free, depth: int) -> Term:
        if f.name in env:
            return shift(env[f.name], depth)
        return f

    return _map(t, 0, on_var, on_free)


def free_names(t: Term) -> set[str]:
    out: set[str] = set()
    for sub in subterms(t):
        if isinstance(sub, Free):
            out.add(sub.name)
    return out


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        match u:
            case Lam(body) | Rec(body) | Left(body) | Right(body):
                stack.append(body)
            case App(f, a):
                stack.extend((a, f))
            case Pair(a, b) | Amb(a, b):
                stack.extend((b, a))
            case Case():
                stack.extend(u.clause(n) for n in reversed(CLAUSES))
                stack.append(u.scrut)


def size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


# ---------------------------------------------------------------------------
# Named construction helpers

def lam(name: str, body: Term) -> Lam:
    return Lam(abstract(body, (name,)), name)


def lams(names: str, body: Term) -> Term:
    for name in reversed(names.split()):
        body = lam(name, body)
    return body


def v(name: str) -> Free:
    return Free(name)


def app(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def case(
    scrut: Term,
    *,
    nil: Term | None = None,
    left: tuple[str, Term] | None = None,
    right: tuple[str, Term] | None = None,
    pair: tuple[str, str, Term] | None = None,
    amb: tuple[str, str, Term] | None = None,
    fun: tuple[str, Term] | None = None,
) -> Case:
    """Build a case term from named clauses; missing clauses are bottom."""
    hints = list(DEFAULT_HINTS)
    bodies = []
    for i, (name, spec) in enumerate(
        (("nil", nil), ("left", left), ("right", right), ("pair", pair), ("amb", amb), ("fun", fun))
    ):
        if spec is None:
            bodies.append(BOT)
            continue
        if name == "nil":
            bodies.append(spec)  # type: ignore[arg-type]
            continue
        *binders, body = spec  # type: ignore[misc]
        hints[i - 1] = tuple(binders)
        bodies.append(abstract(body, binders))
    return Case(scrut, *bodies, tuple(hints))
