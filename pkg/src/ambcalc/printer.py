"""Rendering terms back to the surface syntax.

The output always reparses to a structurally equal term: every binder gets
a name that is unique in its scope and distinct from the free names of the
term, and clauses that are bottom are left out (the parser fills them in).
"""

from __future__ import annotations

import re

from ambcalc.terms import (
    App, Amb, Bot, Case, CLAUSES, Free, Lam, Left, Nil, Pair, Rec, Right, Term, Var,
    free_names,
)

KEYWORDS = frozenset(
    {"rec", "bot", "case", "of", "fun", "let", "def", "type", "fix", "Nil", "Left", "Right", "Pair", "Amb", "A"}
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_TOP, _APP, _ATOM = 0, 1, 2

_PATTERN = {
    "nil": "Nil",
    "left": "Left({})",
    "right": "Right({})",
    "pair": "Pair({}, {})",
    "amb": "Amb({}, {})",
    "fun": "fun({})",
}


def print_term(t: Term) -> str:
    return _Printer(free_names(t)).show(t, [], _TOP)


class _Printer:
    def __init__(self, reserved: set[str]) -> None:
        self.reserved = set(reserved) | KEYWORDS

    def fresh(self, hint: str, scope: list[str]) -> str:
        base = hint if hint and _IDENT.fullmatch(hint) else "x"
        taken = self.reserved.union(scope)
        if base not in taken:
            return base
        root = base.rstrip("0123456789'") or "x"
        i = 1
        while f"{root}{i}" in taken:
            i += 1
        return f"{root}{i}"

    def show(self, t: Term, scope: list[str], level: int) -> str:
        match t:
            case Var(i):
                return scope[-1 - i] if i < len(scope) else f"#{i}"
            case Free(name):
                return name
            case Bot():
                return "bot"
            case Nil():
                return "Nil"
            case Left(a):
                return f"Left({self.show(a, scope, _TOP)})"
            case Right(a):
                return f"Right({self.show(a, scope, _TOP)})"
            case Pair(a, b):
                return f"Pair({self.show(a, scope, _TOP)}, {self.show(b, scope, _TOP)})"
            case Amb(a, b):
                return f"Amb({self.show(a, scope, _TOP)}, {self.show(b, scope, _TOP)})"
            case Lam(body, hint):
                name = self.fresh(hint, scope)
                s = f"\\{name}. {self.show(body, scope + [name], _TOP)}"
                return s if level == _TOP else f"({s})"
            case App(f, a):
                s = f"{self.show(f, scope, _APP)} {self.show(a, scope, _ATOM)}"
                return s if level <= _APP else f"({s})"
            case Rec(body):
                s = f"rec {self.show(body, scope, _ATOM)}"
                return s if level <= _APP else f"({s})"
            case Case():
                parts = []
                for name in CLAUSES:
                    body = t.clause(name)
                    if isinstance(body, Bot):
                        continue
                    binders = []
                    for hint in t.clause_hints(name):
                        binders.append(self.fresh(hint, scope + binders))
                    pat = _PATTERN[name].format(*binders)
                    parts.append(f"{pat} -> {self.show(body, scope + binders, _TOP)}")
                inner = "; ".join(parts)
                return f"case {self.show(t.scrut, scope, _TOP)} of {{{' ' + inner + ' ' if inner else ''}}}"
        raise TypeError(f"not a term: {t!r}")
