"""Deterministic leftmost-outermost reduction to weak head normal form.

Rules (tags as used in traces)::

    s-i    case C(M..) of {..; C(y..) -> N; ..}  ~>  N[M../y..]   (C may be Amb)
    s-i'   case \\x.M of {..; fun(a) -> N}        ~>  N[\\x.M / a]
    s-ii   (\\x.M) N                              ~>  M[N/x]
    s-iii  rec M                                 ~>  M (rec M)
    s-iv   reduce the scrutinee of a case
    s-v    reduce the function of an application
    s-vi   bot                                   ~>  bot
    s-vii  C(M..) N                              ~>  bot
"""

from __future__ import annotations

from dataclasses import dataclass

from ambcalc.terms import (
    BOT, TAG_CLAUSE, App, Bot, Case, Lam, Rec, Term, instantiate, is_constructor, is_whnf,
)

RULES = ("s-i", "s-i'", "s-ii", "s-iii", "s-iv", "s-v", "s-vi", "s-vii")


class OutOfFuel(Exception):
    """No weak head normal form within the fuel budget. This means "not yet",
    never "diverges"."""

    def __init__(self, term: Term, fuel: int) -> None:
        super().__init__(f"no weak head normal form within {fuel} steps")
        self.term = term
        self.fuel = fuel


@dataclass(frozen=True, slots=True)
class DetStep:
    """One ``~>`` step.

    ``redex_rule`` is the rule contracting the redex; ``congruence`` lists
    the s-iv/s-v rules used to reach it, outermost first. ``rule`` is the
    last rule of the derivation, i.e. the outermost one.
    """

    next: Term
    redex_rule: str
    congruence: tuple[str, ...] = ()

    @property
    def rule(self) -> str:
        return self.congruence[0] if self.congruence else self.redex_rule


def contract(t: Term) -> tuple[Term, str] | None:
    """Contract ``t`` if it is itself a redex."""
    match t:
        case Bot():
            return BOT, "s-vi"
        case Rec(body):
            return App(body, t), "s-iii"
        case App(Lam(body), arg):
            return instantiate(body, (arg,)), "s-ii"
        case App(fn) if is_constructor(fn):
            return BOT, "s-vii"
        case Case(scrut) if is_constructor(scrut):
            body = t.clause(TAG_CLAUSE[scrut.tag])
            # Two-variable patterns bind their second variable innermost.
            return instantiate(body, tuple(reversed(scrut.args))), "s-i"
        case Case(Lam() as scrut):
            return instantiate(t.fun, (scrut,)), "s-i'"
    return None


def step_det(t: Term) -> DetStep | None:
    """The unique ``~>`` successor of ``t``, or ``None`` if ``t`` is a weak
    head normal form."""
    frames: list[Term] = []
    cur = t
    while True:
        if is_whnf(cur):
            if frames:
                raise AssertionError("congruence frame around a normal form")
            return None
        done = contract(cur)
        if done is not None:
            break
        frames.append(cur)
        cur = cur.scrut if isinstance(cur, Case) else cur.fn  # type: ignore[attr-defined]
    new, rule = done
    tags = []
    for frame in reversed(frames):
        if isinstance(frame, Case):
            new = frame.with_scrut(new)
            tags.append("s-iv")
        else:
            new = App(new, frame.arg)  # type: ignore[attr-defined]
            tags.append("s-v")
    return DetStep(new, rule, tuple(reversed(tags)))


def step(t: Term) -> Term | None:
    s = step_det(t)
    return None if s is None else s.next


def eval_whnf(t: Term, fuel: int) -> Term:
    """Iterate ``~>`` at most ``fuel`` times; return the first weak head
    normal form reached or raise ``OutOfFuel``."""
    return eval_steps(t, fuel)[0]


def eval_steps(t: Term, fuel: int) -> tuple[Term, int]:
    """Like ``eval_whnf`` but also returns the number of steps taken."""
    for n in range(fuel + 1):
        if is_whnf(t):
            return t, n
        if n == fuel:
            break
        t = step_det(t).next  # type: ignore[union-attr]
    raise OutOfFuel(t, fuel)
