"""Type checking against a stated type.

The checker works bidirectionally: the expected type is pushed into
introduction forms, and types of eliminated terms (functions in
applications, scrutinees of case) are synthesized. Where synthesis needs
information that only arrives later (an unannotated abstraction used as a
function, a case on a variable whose type is still open) the checker uses
unification variables. Recursive types are compared up to unfolding, which
is how roll and unroll steps are placed.

A case whose scrutinee type is still unknown after everything else has been
checked is resolved by trying each shape suggested by its non-bottom
clauses, with backtracking.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ambcalc.terms import (
    Amb, App, Bot, Case, Free, Lam, Left, Nil, Pair, Rec, Right, Term, Var, shift,
)
from ambcalc.ty import (
    AmbTy, Arrow, Fix, Prod, Sum, TVar, Ty, Unit, UNIT, is_regular, show_type, unfold,
)

_MAX_UNFOLD = 64


class TypeCheckError(Exception):
    """A term does not have the type it is checked against."""

    def __init__(self, message: str, term: Term | None = None, expected: Ty | None = None, actual: Ty | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.term = term
        self.expected = expected
        self.actual = actual

    def __str__(self) -> str:
        parts = [self.message]
        if self.term is not None:
            text = str(self.term)
            parts.append(f"  in: {text if len(text) <= 200 else text[:197] + '...'}")
        if self.expected is not None:
            parts.append(f"  expected: {show_type(self.expected)}")
        if self.actual is not None:
            parts.append(f"  actual: {show_type(self.actual)}")
        return "\n".join(parts)


@dataclass(frozen=True, slots=True)
class Meta(Ty):
    """Unification variable; only ever appears inside the checker."""

    id: int


@dataclass
class _Pending:
    ctx: tuple
    term: Case
    scrut: Ty
    expected: Ty


_SHAPE_OF_CLAUSE = {"nil": "unit", "left": "sum", "right": "sum", "pair": "prod", "amb": "amb", "fun": "arrow"}


class _Checker:
    def __init__(self) -> None:
        self.sol: dict[int, Ty] = {}
        self.pending: list[_Pending] = []
        self.ids = itertools.count()

    # -- metavariables
    def fresh(self) -> Meta:
        return Meta(next(self.ids))

    def resolve(self, t: Ty) -> Ty:
        while isinstance(t, Meta) and t.id in self.sol:
            t = self.sol[t.id]
        return t

    def head(self, t: Ty) -> Ty:
        """Resolve metavariables and unfold fixed points until the head is
        a type former (or an unsolved metavariable)."""
        for _ in range(_MAX_UNFOLD):
            t = self.resolve(t)
            if not isinstance(t, Fix):
                return t
            t = unfold(t)
        raise TypeCheckError("type does not unfold to a head constructor", actual=t)

    def zonk(self, t: Ty) -> Ty:
        t = self.resolve(t)
        match t:
            case Prod(a, b):
                return Prod(self.zonk(a), self.zonk(b))
            case Sum(a, b):
                return Sum(self.zonk(a), self.zonk(b))
            case Arrow(a, b):
                return Arrow(self.zonk(a), self.zonk(b))
            case AmbTy(b):
                return AmbTy(self.zonk(b))
            case Fix(v, b):
                return Fix(v, self.zonk(b))
        return t

    def occurs(self, m: Meta, t: Ty) -> bool:
        t = self.resolve(t)
        match t:
            case Meta():
                return t == m
            case Prod(a, b) | Sum(a, b) | Arrow(a, b):
                return self.occurs(m, a) or self.occurs(m, b)
            case AmbTy(b) | Fix(_, b):
                return self.occurs(m, b)
        return False

    def bind(self, m: Meta, t: Ty) -> bool:
        if self.occurs(m, t):
            # m = T[m] has the recursive solution fix a. T[a].
            var = f"_r{m.id}"
            body = self.replace_meta(m, self.zonk(t), TVar(var))
            if isinstance(body, TVar):
                return False
            t = Fix(var, body)
        self.sol[m.id] = t
        return True

    def replace_meta(self, m: Meta, t: Ty, by: Ty) -> Ty:
        match t:
            case Meta():
                return by if t == m else t
            case Prod(a, b):
                return Prod(self.replace_meta(m, a, by), self.replace_meta(m, b, by))
            case Sum(a, b):
                return Sum(self.replace_meta(m, a, by), self.replace_meta(m, b, by))
            case Arrow(a, b):
                return Arrow(self.replace_meta(m, a, by), self.replace_meta(m, b, by))
            case AmbTy(b):
                return AmbTy(self.replace_meta(m, b, by))
            case Fix(v, b):
                return Fix(v, self.replace_meta(m, b, by))
        return t

    def unify(self, a: Ty, b: Ty) -> bool:
        assumed: set[tuple[Ty, Ty]] = set()
        todo = [(a, b)]
        steps = 0
        while todo:
            steps += 1
            if steps > 10_000:
                return False
            x, y = todo.pop()
            x, y = self.resolve(x), self.resolve(y)
            if x == y or (x, y) in assumed:
                continue
            if isinstance(x, Meta):
                if not self.bind(x, y):
                    return False
                continue
            if isinstance(y, Meta):
                if not self.bind(y, x):
                    return False
                continue
            if isinstance(x, Fix) or isinstance(y, Fix):
                assumed.add((x, y))
                todo.append((unfold(x) if isinstance(x, Fix) else x, unfold(y) if isinstance(y, Fix) else y))
                continue
            match x, y:
                case (Prod(a1, b1), Prod(a2, b2)) | (Sum(a1, b1), Sum(a2, b2)) | (Arrow(a1, b1), Arrow(a2, b2)):
                    todo += [(b1, b2), (a1, a2)]
                case AmbTy(a1), AmbTy(a2):
                    todo.append((a1, a2))
                case _:
                    return False
        return True

    def expect_shape(self, t: Ty, shape: str, term: Term, expected: Ty) -> Ty:
        """Head of ``t`` as the given former, instantiating a metavariable if needed."""
        h = self.head(t)
        if isinstance(h, Meta):
            new: Ty
            match shape:
                case "unit":
                    new = UNIT
                case "sum":
                    new = Sum(self.fresh(), self.fresh())
                case "prod":
                    new = Prod(self.fresh(), self.fresh())
                case "arrow":
                    new = Arrow(self.fresh(), self.fresh())
                case "amb":
                    new = AmbTy(self.fresh())
            self.bind(h, new)
            return new
        ok = {
            "unit": Unit, "sum": Sum, "prod": Prod, "arrow": Arrow, "amb": AmbTy,
        }[shape]
        if not isinstance(h, ok):
            raise TypeCheckError(f"expected a {shape} type", term, expected=self.zonk(expected), actual=self.zonk(h))
        return h

    # -- checking
    def lookup(self, ctx: tuple, t: Term) -> Ty:
        match t:
            case Var(i):
                if i >= len(ctx):
                    raise TypeCheckError(f"unbound variable #{i}", t)
                return ctx[len(ctx) - 1 - i][1]
            case Free(name):
                for n, ty in reversed(ctx):
                    if n == name:
                        return ty
                raise TypeCheckError(f"unbound name {name!r}", t)
        raise AssertionError(t)

    def infer(self, ctx: tuple, t: Term) -> Ty:
        if isinstance(t, (Var, Free)):
            return self.lookup(ctx, t)
        m = self.fresh()
        self.check(ctx, t, m)
        return m

    def check(self, ctx: tuple, t: Term, expected: Ty) -> None:
        match t:
            case Bot():
                return
            case Var() | Free():
                actual = self.lookup(ctx, t)
                if not self.unify(actual, expected):
                    raise TypeCheckError("variable has the wrong type", t, self.zonk(expected), self.zonk(actual))
            case Nil():
                self.expect_shape(expected, "unit", t, expected)
            case Left(a):
                s = self.expect_shape(expected, "sum", t, expected)
                self.check(ctx, a, s.left)
            case Right(a):
                s = self.expect_shape(expected, "sum", t, expected)
                self.check(ctx, a, s.right)
            case Pair(a, b):
                p = self.expect_shape(expected, "prod", t, expected)
                self.check(ctx, a, p.left)
                self.check(ctx, b, p.right)
            case Amb(a, b):
                m = self.expect_shape(expected, "amb", t, expected)
                self.check(ctx, a, m.body)
                self.check(ctx, b, m.body)
            case Lam(body, hint):
                f = self.expect_shape(expected, "arrow", t, expected)
                self.check(ctx + ((hint, f.dom),), body, f.cod)
            case Rec(body):
                # rec M : r  if  a : r |- M a : r  with a not free in M
                self.check(ctx + (("rec", expected),), App(shift(body, 1), Var(0)), expected)
            case App():
                self.check_app(ctx, t, expected)
            case Case():
                scrut = self.infer(ctx, t.scrut)
                self.check_case(ctx, t, scrut, expected)
            case _:
                raise TypeCheckError("not a term", t)

    def check_app(self, ctx: tuple, t: App, expected: Ty) -> None:
        spine: list[Term] = []
        head: Term = t
        while isinstance(head, App):
            spine.append(head.arg)
            head = head.fn
        spine.reverse()
        if isinstance(head, (Var, Free, Case, App)):
            # Synthesize the function type, then push domains into arguments.
            fty = self.infer(ctx, head)
            for arg in spine:
                f = self.expect_shape(fty, "arrow", head, fty)
                self.check(ctx, arg, f.dom)
                fty = f.cod
            if not self.unify(fty, expected):
                raise TypeCheckError("result type mismatch", t, self.zonk(expected), self.zonk(fty))
            return
        # Abstractions, rec and the like: learn the argument types first.
        arg_tys = [self.infer(ctx, a) for a in spine]
        fty = expected
        for aty in reversed(arg_tys):
            fty = Arrow(aty, fty)
        self.check(ctx, head, fty)

    def check_case(self, ctx: tuple, t: Case, scrut: Ty, expected: Ty) -> None:
        h = self.head(scrut)
        if isinstance(h, Meta):
            shapes = self.candidate_shapes(t)
            if not shapes:
                return
            if len(shapes) == 1:
                h = self.expect_shape(h, shapes[0], t.scrut, h)
            else:
                self.pending.append(_Pending(ctx, t, scrut, expected))
                return
        match h:
            case Unit():
                self.check(ctx, t.nil, expected)
            case Sum(l, r):
                self.check(ctx + ((t.clause_hints("left")[0], l),), t.left, expected)
                self.check(ctx + ((t.clause_hints("right")[0], r),), t.right, expected)
            case Prod(a, b):
                ha, hb = t.clause_hints("pair")
                self.check(ctx + ((ha, a), (hb, b)), t.pair, expected)
            case AmbTy(a):
                ha, hb = t.clause_hints("amb")
                self.check(ctx + ((ha, a), (hb, a)), t.amb, expected)
            case Arrow():
                self.check(ctx + ((t.clause_hints("fun")[0], h),), t.fun, expected)
            case TVar(name):
                raise TypeCheckError(f"cannot case on a value of abstract type {name}", t.scrut, actual=h)
            case _:
                raise TypeCheckError("bad scrutinee type", t.scrut, actual=h)

    @staticmethod
    def candidate_shapes(t: Case) -> list[str]:
        shapes: list[str] = []
        for name in ("left", "right", "pair", "amb", "fun", "nil"):
            if not isinstance(t.clause(name), Bot):
                s = _SHAPE_OF_CLAUSE[name]
                if s not in shapes:
                    shapes.append(s)
        return shapes

    # -- deferred cases
    def solve_pending(self) -> None:
        progress = True
        while progress and self.pending:
            progress = False
            waiting, self.pending = self.pending, []
            for p in waiting:
                if isinstance(self.head(p.scrut), Meta):
                    self.pending.append(p)
                else:
                    self.check_case(p.ctx, p.term, p.scrut, p.expected)
                    progress = True
        if not self.pending:
            return
        first, rest = self.pending[0], self.pending[1:]
        error: TypeCheckError | None = None
        for shape in self.candidate_shapes(first.term):
            saved = dict(self.sol)
            self.pending = list(rest)
            try:
                self.expect_shape(first.scrut, shape, first.term.scrut, first.scrut)
                self.check_case(first.ctx, first.term, first.scrut, first.expected)
                self.solve_pending()
                return
            except TypeCheckError as e:
                error = error or e
                self.sol = saved
        raise error or TypeCheckError("no consistent type for case scrutinee", first.term)


def type_check(ctx: list[tuple[str, Ty]] | tuple, t: Term, expected: Ty) -> bool:
    """Return True if ``t`` has type ``expected`` under ``ctx``; raise
    ``TypeCheckError`` otherwise.

    ``ctx`` lists ``(name, type)`` assumptions, innermost last; de Bruijn
    index 0 refers to the last entry, and free names are looked up by name.
    Free type variables are treated as abstract types.
    """
    ctx = tuple(ctx)
    for name, ty in ctx:
        if not is_regular(ty):
            raise TypeCheckError(f"type of {name} is not regular", expected=ty)
    if not is_regular(expected):
        raise TypeCheckError("expected type is not regular", t, expected=expected)
    c = _Checker()
    c.check(ctx, t, expected)
    c.solve_pending()
    return True


def has_type(t: Term, expected: Ty, ctx: list[tuple[str, Ty]] | tuple = ()) -> bool:
    """Boolean form of ``type_check``; also False for irregular types."""
    try:
        return type_check(ctx, t, expected)
    except TypeCheckError:
        return False
