from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ambcalc.engine import (
    Budget, RandomFair, RoundRobin, drive_stream, explore_stream, force, head_outcomes, resolve_head,
)
from ambcalc.gray import (
    GRAY_L, GRAY_R, GRAY_UNDEF, GSD, GTOS, NH, ONEDIGIT, SD_DIGIT, SD_VALUE, gray_check, gray_code, gray_digits,
    gray_letter, gray_prefix_wellformed, gray_programs, gray_stream, gray_type, gtos_of, gtos_program,
    render_gray, render_sd, sd2_type, sd_check, sd_digit, sd_interval, sd_stream, tent,
)
from ambcalc.reduce import OutOfFuel, eval_whnf
from ambcalc.terms import Amb, Pair, Rec, app
from ambcalc.ty import Arrow
from ambcalc.typecheck import type_check

FUEL = 100_000


def unrolled(prefix: str, cycle: str, n: int) -> str:
    out = prefix
    while len(out) < n:
        out += cycle
    return out[:n]


def gray_prefix(t, n: int) -> list[str]:
    return [gray_letter(d) for d in drive_stream(t, n, 200, RoundRobin(), undefined_ok=True)]


def sd_prefix(t, n: int, sched=None) -> list[int]:
    return [sd_digit(d) for d in drive_stream(t, n, FUEL, sched or RoundRobin())]


rationals = st.fractions(min_value=-1, max_value=1, max_denominator=40)


# ---------------------------------------------------------------------------
# Gray codes

def test_gray_stream_examples():
    third = gray_stream(Fraction(1, 3))
    assert third == Rec(third.body) and gray_prefix(third, 5) == list("RRRRR")
    assert gray_digits(Fraction(0)) == ("_R", "L")
    assert gray_prefix(gray_stream(Fraction(0)), 4) == list("_RLL")
    assert gray_prefix(gray_stream(Fraction(-1, 2)), 1) == ["L"]
    with pytest.raises(ValueError):
        gray_stream(Fraction(3, 2))


@settings(max_examples=200, deadline=None)
@given(rationals)
def test_gray_digits_are_valid(x):
    prefix, cycle = gray_digits(x)
    letters = unrolled(prefix, cycle, 30)
    assert gray_check(letters, x)
    assert gray_prefix_wellformed(letters)
    assert gray_prefix(gray_stream(x), 8) == list(letters[:8])


def test_gray_check_examples():
    assert gray_check(list("RRR"), Fraction(1, 3))
    assert gray_check(list("_RL"), Fraction(0))
    assert not gray_check(["L"], Fraction(1, 2))
    assert gray_check(list("LRL"), Fraction(0))
    assert not gray_check(list("_L"), Fraction(0))


def test_gray_prefix_wellformed():
    assert gray_prefix_wellformed(list("RL_RLL"))
    assert not gray_prefix_wellformed(list("_R_"))
    assert not gray_prefix_wellformed(list("_L"))


def test_tent():
    assert tent(Fraction(1, 3)) == Fraction(1, 3)
    assert tent(Fraction(-1, 2)) == 0


# ---------------------------------------------------------------------------
# Signed digits

def test_sd_check_examples():
    assert sd_check([1, 0, -1, 0, -1, 0], Fraction(1, 3))
    assert sd_check([0, 1, 0, 1, 0, 1], Fraction(1, 3))
    assert not sd_check([1, 1], Fraction(0))
    assert sd_check([], Fraction(1, 2))
    assert not sd_check([2], Fraction(0))


def test_sd_interval_examples():
    assert sd_interval([]) == (-1, 1)
    assert sd_interval([0]) == (Fraction(-1, 2), Fraction(1, 2))
    assert sd_interval([1, -1]) == (Fraction(0), Fraction(1, 2))


@settings(max_examples=300, deadline=None)
@given(rationals, st.lists(st.sampled_from([-1, 0, 1]), max_size=8))
def test_sd_interval_contains_checked_values(x, p):
    if sd_check(p, x):
        lo, hi = sd_interval(p)
        assert lo <= x <= hi


def test_render():
    assert render_sd([-1, 0, 1]) == "-1 0 1"
    assert render_gray(["L", "R", "_"]) == "L R _"
    assert all(sd_digit(v) == d for d, v in SD_VALUE.items())


# ---------------------------------------------------------------------------
# The programs

@pytest.mark.parametrize("prog", gray_programs(), ids=lambda p: p.name)
def test_programs_check(prog):
    assert type_check((), prog.term, prog.ty)


def test_gtos_type():
    p = gtos_program()
    assert p.term == GTOS
    assert p.ty == Arrow(gray_type(), sd2_type())


def test_gsd_examples():
    a, b = GRAY_L, GRAY_R
    tail = gray_code("", "L")
    code = Pair(a, Pair(b, tail))
    assert gray_prefix(app(GSD, Pair(code, SD_DIGIT[-1])), 5) == gray_prefix(Pair(b, tail), 5)
    assert gray_prefix(app(GSD, Pair(code, SD_DIGIT[1])), 5) == ["L"] + gray_prefix(tail, 4)
    assert gray_prefix(app(GSD, Pair(code, SD_DIGIT[0])), 5) == ["L", "R"] + gray_prefix(tail, 3)


def test_onedigit_zero():
    code = Pair(GRAY_R, Pair(GRAY_L, gray_code("R", "L")))
    out = eval_whnf(app(ONEDIGIT, code, SD_DIGIT[0]), 100)
    assert isinstance(out, Pair)
    assert sd_digit(force(out.fst, RoundRobin(), Budget(100))) == 0
    assert gray_prefix(out.snd, 4) == gray_prefix(Pair(GRAY_R, app(NH, gray_code("R", "L"))), 4)


@settings(max_examples=60, deadline=None)
@given(rationals, st.sampled_from([-1, 0, 1]))
def test_gsd_doubles_and_shifts(x, d):
    """gsd maps a Gray code of x to one of 2x - d whenever |2x - d| <= 1 and
    x lies in the digit's range."""
    y = 2 * x - d
    if abs(y) > 1 or (d == -1 and x > 0) or (d == 1 and x < 0) or (d == 0 and abs(x) > Fraction(1, 2)):
        return
    if x == 0 and d != 0:
        return
    out = gray_prefix(app(GSD, Pair(gray_stream(x), SD_DIGIT[d])), 10)
    assert gray_check(out, y)


def test_gtos_exposes_both_branches():
    """The first choice of gtos on R^w offers 1 followed by the conversion of
    L:R^w, and 0 followed by the conversion of R:L:R^w."""
    w = eval_whnf(gtos_of(Fraction(1, 3)), 1000)
    assert isinstance(w, Amb)
    expected = {1: gray_code("L", "R"), 0: gray_code("RL", "R")}
    for side in (w.left, w.right):
        cell = resolve_head(side, RoundRobin(), Budget(1000))
        assert isinstance(cell, Pair)
        d = sd_digit(force(cell.fst, RoundRobin(), Budget(1000)))
        assert explore_stream(cell.snd, 3, 2000) == explore_stream(app(GTOS, expected[d]), 3, 2000)


def test_gtos_one_third_prefix():
    p = sd_prefix(gtos_of(Fraction(1, 3)), 8)
    assert sd_check(p, Fraction(1, 3))


def test_gtos_zero_with_undefined_digit():
    assert sd_prefix(gtos_of(Fraction(0)), 4) == [0, 0, 0, 0]
    assert len(head_outcomes(gtos_of(Fraction(0)), 500)) == 1


@settings(max_examples=40, deadline=None)
@given(rationals, st.integers(0, 1000))
def test_gtos_is_correct_for_every_schedule(x, seed):
    for sched in (RoundRobin(), RandomFair(seed)):
        assert sd_check(sd_prefix(gtos_of(x), 10, sched), x)


def test_gtos_on_the_other_codes_of_zero():
    for code in (gray_code("LR", "L"), gray_code("RR", "L")):
        for sched in (RoundRobin(), RandomFair(4)):
            assert sd_check(sd_prefix(app(GTOS, code), 10, sched), Fraction(0))


def test_sd_stream_term():
    assert sd_prefix(sd_stream([1], [0, -1]), 5) == [1, 0, -1, 0, -1]


def test_undefined_digit_diverges():
    with pytest.raises(OutOfFuel):
        eval_whnf(GRAY_UNDEF, 1000)
