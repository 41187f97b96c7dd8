"""Gray code and signed digit streams for reals in [-1, 1], the conversion
program from Gray code to concurrent signed digit streams, and exact
rational validators.

Encodings::

    Gray digits     L = Left(Nil)   R = Right(Nil)   undefined = rec (\\x. x)
    signed digits   -1 = Left(Left(Nil))   1 = Left(Right(Nil))   0 = Right(Nil)
    streams         a : t = Pair(a, t)
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from ambcalc.realizers import AMB_LR, MAPAMB, NamedProgram
from ambcalc.terms import NIL, Left, Pair, Rec, Right, Term, app, case, lam, lams, v
from ambcalc.ty import Arrow, AmbTy, Prod, Ty, UNIT, amb_stream, stream, three, two
from ambcalc.values import NILV, BotV, LeftV, RightV, Value

GRAY_L = Left(NIL)
GRAY_R = Right(NIL)
GRAY_UNDEF = Rec(lam("x", v("x")))

SD_DIGIT = {-1: Left(Left(NIL)), 1: Left(Right(NIL)), 0: Right(NIL)}
SD_VALUE = {-1: LeftV(LeftV(NILV)), 1: LeftV(RightV(NILV)), 0: RightV(NILV)}
_SD_OF_VALUE = {val: d for d, val in SD_VALUE.items()}

GRAY_TERM = {"L": GRAY_L, "R": GRAY_R, "_": GRAY_UNDEF}
GRAY_VALUE = {LeftV(NILV): "L", RightV(NILV): "R"}


def gray_type() -> Ty:
    """``2^w = fix a. 2 * a``"""
    return stream(two())


def sd_type() -> Ty:
    return stream(three())


def sd2_type() -> Ty:
    """``fix a. A(3 * a)``"""
    return amb_stream(three())


# ---------------------------------------------------------------------------
# Stream terms

def stream_term(prefix: Sequence[Term], cycle: Sequence[Term]) -> Term:
    """``prefix`` followed by ``cycle`` repeated forever."""
    if not cycle:
        raise ValueError("an infinite stream needs a non-empty cycle")
    body: Term = v("s")
    for d in reversed(cycle):
        body = Pair(d, body)
    out: Term = Rec(lam("s", body))
    for d in reversed(prefix):
        out = Pair(d, out)
    return out


def gray_code(prefix: str, cycle: str) -> Term:
    """Gray code from digit letters ``L``, ``R`` and ``_`` (undefined)."""
    return stream_term([GRAY_TERM[c] for c in prefix], [GRAY_TERM[c] for c in cycle])


def sd_stream(prefix: Sequence[int], cycle: Sequence[int]) -> Term:
    return stream_term([SD_DIGIT[d] for d in prefix], [SD_DIGIT[d] for d in cycle])


def tent(x: Fraction) -> Fraction:
    """``t(x) = 1 - 2|x|``"""
    return 1 - 2 * abs(x)


def gray_digits(x: Fraction) -> tuple[str, str]:
    """The canonical Gray code of a rational as (prefix, cycle) letters; the
    orbit of ``x`` under the tent map is eventually periodic."""
    x = Fraction(x)
    if not -1 <= x <= 1:
        raise ValueError(f"{x} is outside [-1, 1]")
    seen: dict[Fraction, int] = {}
    letters: list[str] = []
    while x not in seen:
        seen[x] = len(letters)
        letters.append("L" if x < 0 else "R" if x > 0 else "_")
        x = tent(x)
    start = seen[x]
    return "".join(letters[:start]), "".join(letters[start:])


def gray_stream(x: Fraction) -> Term:
    """A closed term of type ``2^w`` for the Gray code of ``x``: ``L`` where
    the residual is negative, ``R`` where positive, undefined at zero."""
    prefix, cycle = gray_digits(Fraction(x))
    return gray_code(prefix, cycle)


# ---------------------------------------------------------------------------
# The conversion program

def _dn(t: Term, a: str, rest: str, body: Term) -> Term:
    # case t of { Pair(a, rest) -> body }
    return case(t, pair=(a, rest, body))


NOT = lams("a", case(v("a"), left=("_", GRAY_R), right=("_", GRAY_L)))

# restr: defined on R, undefined on L
RESTR = lams("a", case(v("a"), right=("b", v("b"))))

# f (a:t) = a
G_F = lams("x", _dn(v("x"), "a", "t", v("a")))

# g (a:b:t) = restr b
G_G = lams("x", _dn(v("x"), "a", "t1", _dn(v("t1"), "b", "t", app(RESTR, v("b")))))

GSCOMP = lams("a", app(AMB_LR, app(G_F, v("a")), app(G_G, v("a"))))

# nh (a:p) = (not a):p
NH = lams("x", _dn(v("x"), "a", "p", Pair(app(NOT, v("a")), v("p"))))

_A_B_T = Pair(v("a"), Pair(v("b"), v("t")))

# gsd (Pair(a:b:t, d)) = case d of {-1 -> b:t; 0 -> a:(nh t); 1 -> (not b):t}
GSD = lams(
    "x",
    _dn(v("x"), "s", "d", _dn(v("s"), "a", "t1", _dn(v("t1"), "b", "t",
        case(
            v("d"),
            left=("e", case(v("e"),
                left=("_", Pair(v("b"), v("t"))),
                right=("_", Pair(app(NOT, v("b")), v("t"))))),
            right=("_", Pair(v("a"), app(NH, v("t")))),
        )))),
)

ONEDIGIT = lams(
    "x c",
    _dn(v("x"), "a", "t1", _dn(v("t1"), "b", "t",
        case(
            v("c"),
            left=("d", case(v("d"),
                left=("e", Pair(SD_DIGIT[-1], Pair(v("b"), v("t")))),
                right=("e", Pair(SD_DIGIT[1], Pair(app(NOT, v("b")), v("t")))))),
            right=("d", Pair(SD_DIGIT[0], Pair(v("a"), app(NH, v("t"))))),
        ))),
)

# s (a:b:t) = mapamb (\c. onedigit (a:b:t) c) (ambLR a (case b of {Right(c) -> c}))
S = lams(
    "x",
    _dn(v("x"), "a", "t1", _dn(v("t1"), "b", "t",
        app(
            MAPAMB,
            lam("c", app(ONEDIGIT, _A_B_T, v("c"))),
            app(AMB_LR, v("a"), case(v("b"), right=("c", v("c")))),
        ))),
)

# mon' f (Pair(a, t)) = Pair(a, f t);  mon f p = mapamb (mon' f) p
MON1 = lams("f p", _dn(v("p"), "a", "t", Pair(v("a"), app(v("f"), v("t")))))
MON = lams("f p", app(MAPAMB, app(MON1, v("f")), v("p")))

# gtos = (mon gtos) . s, by recursion
GTOS = Rec(lams("g x", app(MON, v("g"), app(S, v("x")))))


def gray_programs() -> list[NamedProgram]:
    g, s3, b = gray_type(), three(), two()
    sd2 = sd2_type()

    def arrow(*tys: Ty) -> Ty:
        out = tys[-1]
        for t in reversed(tys[:-1]):
            out = Arrow(t, out)
        return out

    return [
        NamedProgram("not", NOT, arrow(b, b), "digit flip"),
        NamedProgram("restr", RESTR, arrow(b, UNIT), "defined exactly on R"),
        NamedProgram("f", G_F, arrow(g, b), "first digit"),
        NamedProgram("g", G_G, arrow(g, UNIT), "second digit restricted"),
        NamedProgram("gscomp", GSCOMP, arrow(g, AmbTy(s3)), "concurrent digit test"),
        NamedProgram("nh", NH, arrow(g, g), "flip the head digit"),
        NamedProgram("gsd", GSD, arrow(Prod(g, s3), g), "Gray code of 2x - d"),
        NamedProgram("onedigit", ONEDIGIT, arrow(g, s3, Prod(s3, g)), "one signed digit and the rest"),
        NamedProgram("s", S, arrow(g, AmbTy(Prod(s3, g))), "one concurrent step of the conversion"),
        NamedProgram("mon1", MON1, arrow(arrow(g, sd2), Prod(s3, g), Prod(s3, sd2)), "monotonicity, pair part"),
        NamedProgram("mon", MON, arrow(arrow(g, sd2), AmbTy(Prod(s3, g)), AmbTy(Prod(s3, sd2))), "monotonicity"),
        NamedProgram("gtos", GTOS, arrow(g, sd2), "Gray code to concurrent signed digits"),
    ]


def gtos_program() -> NamedProgram:
    return gray_programs()[-1]


def gtos_of(x: Fraction | Term) -> Term:
    """``gtos`` applied to the Gray code of ``x`` (or to a given code)."""
    code = x if isinstance(x, Term) else gray_stream(Fraction(x))
    return app(GTOS, code)


# ---------------------------------------------------------------------------
# Digits and validators

def sd_digit(val: Value) -> int:
    try:
        return _SD_OF_VALUE[val]
    except KeyError:
        raise ValueError(f"not a signed digit: {val}") from None


def gray_letter(val: Value) -> str:
    if isinstance(val, BotV):
        return "_"
    try:
        return GRAY_VALUE[val]
    except KeyError:
        raise ValueError(f"not a Gray digit: {val}") from None


def sd_check(p: Iterable[int], x: Fraction) -> bool:
    """Each digit ``d`` needs ``|2x - d| <= 1``; the residual becomes ``2x - d``."""
    x = Fraction(x)
    for d in p:
        if d not in (-1, 0, 1) or abs(2 * x - d) > 1:
            return False
        x = 2 * x - d
    return True


def gray_check(p: Iterable[str], x: Fraction) -> bool:
    """Each digit must match the sign of the residual (any digit, including
    undefined ``_``, at zero); the residual becomes ``1 - 2|x|``."""
    x = Fraction(x)
    for a in p:
        if not -1 <= x <= 1:
            return False
        if x < 0 and a != "L" or x > 0 and a != "R":
            return False
        if a not in ("L", "R", "_"):
            return False
        x = tent(x)
    return True


def gray_prefix_wellformed(p: Sequence[str]) -> bool:
    """At most one undefined digit, followed by ``R`` and then ``L``s."""
    holes = [i for i, a in enumerate(p) if a == "_"]
    if len(holes) > 1:
        return False
    if holes:
        tail = p[holes[0] + 1:]
        return all(a == ("R" if i == 0 else "L") for i, a in enumerate(tail))
    return True


def sd_interval(p: Sequence[int]) -> tuple[Fraction, Fraction]:
    """Reals consistent with the digit prefix: ``c -/+ 2^-n`` with
    ``c = sum d_i 2^-(i+1)``."""
    c = sum((Fraction(d, 2 ** (i + 1)) for i, d in enumerate(p)), Fraction(0))
    r = Fraction(1, 2 ** len(p))
    return c - r, c + r


def render_sd(p: Iterable[int]) -> str:
    return " ".join(str(d) for d in p)


def render_gray(p: Iterable[str]) -> str:
    return " ".join(p)
