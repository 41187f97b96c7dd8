from __future__ import annotations

import pytest

from corpus import OMEGA, ONE, TWO, ZERO, corpus
from ambcalc.engine import (
    HEAD, PICK_LEFT, PICK_RIGHT, Budgets, NotAStream, RandomFair, Recorded, Recorder, RoundRobin,
    ScheduleExhausted, Stuck, drive_stream, explore, explore_graph, force_outcomes, head_outcomes,
    legal_decisions, make_scheduler, par_successors, parse_decision, run_fair, step_choice, step_par,
)
from ambcalc.gray import sd_digit, sd_stream
from ambcalc.realizers import F_PARTIAL, MAPAMB, numeral_value
from ambcalc.reduce import OutOfFuel, step_det
from ambcalc.terms import BOT, NIL, Amb, App, Left, Pair, Right, app, lam, v
from ambcalc.values import BOTV, NILV, PairV, data_set, denote_finitary, leq, lub_all


def test_decision_tokens():
    for d in (HEAD, PICK_LEFT, PICK_RIGHT, Budgets(1, 0), Budgets(2, 3)):
        assert parse_decision(d.token()) == d
    with pytest.raises(ValueError):
        Budgets(0, 0)
    with pytest.raises(ValueError):
        parse_decision("X")


def test_step_choice_examples():
    assert step_choice(Amb(NIL, BOT), PICK_LEFT) == NIL
    assert step_choice(Amb(OMEGA, NIL), PICK_RIGHT) == NIL
    m1, m2 = App(lam("x", v("x")), NIL), OMEGA
    assert step_choice(Amb(m1, m2), Budgets(1, 1)) == Amb(step_det(m1).next, step_det(m2).next)
    assert step_choice(Amb(m1, m2), Budgets(0, 2)) == Amb(m1, step_det(step_det(m2).next).next)
    assert step_choice(App(lam("x", v("x")), NIL), HEAD) == NIL


def test_step_choice_stuck():
    with pytest.raises(Stuck):
        step_choice(Amb(OMEGA, NIL), PICK_LEFT)
    with pytest.raises(Stuck):
        step_choice(Amb(NIL, OMEGA), Budgets(1, 1))
    with pytest.raises(Stuck):
        step_choice(NIL, HEAD)
    with pytest.raises(Stuck):
        step_choice(NIL, Budgets(1, 0))


def test_legal_decisions():
    assert legal_decisions(Amb(NIL, Left(NIL))) == [PICK_LEFT, PICK_RIGHT]
    assert legal_decisions(Amb(NIL, OMEGA)) == [Budgets(0, 1), PICK_LEFT]
    assert legal_decisions(Amb(BOT, OMEGA)) == [Budgets(1, 0), Budgets(0, 1), Budgets(1, 1)]
    assert legal_decisions(OMEGA) == [HEAD]
    assert legal_decisions(NIL) == []


def test_step_par_examples():
    assert step_par(NIL, RoundRobin()) == NIL
    f = lam("x", BOT)
    assert step_par(f, RoundRobin()) == f
    t = Pair(OMEGA, NIL)
    assert step_par(t, RoundRobin()) == Pair(step_det(OMEGA).next, NIL)


def test_step_par_reduces_all_data_positions():
    t = Pair(App(lam("x", v("x")), NIL), Left(Amb(BOT, Right(NIL))))
    actions = []
    out = step_par(t, RoundRobin(), 0, actions)
    assert out == Pair(NIL, Left(Right(NIL)))
    assert {a.rule for a in actions} == {"c-i", "c-iii'"}


def test_run_fair_examples():
    trace = run_fair(Amb(BOT, BOT), 20, RoundRobin())
    assert all(s == BOTV for s in trace.snapshots)
    assert run_fair(Amb(NIL, OMEGA), 10, RoundRobin()).last == NILV
    t = app(MAPAMB, F_PARTIAL, Amb(ZERO, ONE))
    assert run_fair(t, 200, RoundRobin()).last == numeral_value(0)


def test_round_robin_prefers_left():
    assert run_fair(Amb(ZERO, ONE), 3, RoundRobin()).last == numeral_value(0)


def test_categories():
    assert run_fair(OMEGA, 10, RoundRobin()).category() == ("a", None)
    assert run_fair(App(lam("x", v("x")), NIL), 5, RoundRobin()).category() == ("b", 1)
    assert run_fair(App(lam("x", v("x")), lam("y", v("y"))), 5, RoundRobin()).category() == ("c", 1)


def test_category_trichotomy_on_corpus():
    for e in corpus():
        trace = run_fair(e.term, e.fuel, RandomFair(3))
        cat, start = trace.category()
        rules = [s.rule for s in trace.steps]
        if cat == "a":
            assert set(rules) <= {"p-i"}
        else:
            assert all(r == "p-i" for r in rules[:start])
            assert set(rules[start:]) == {"p-ii" if cat == "b" else "p-iii"}


def test_round_robin_never_starves():
    trace = run_fair(Pair(Amb(OMEGA, BOT), Amb(BOT, OMEGA)), 50, RoundRobin())
    assert set(trace.starvation().values()) == {(0, 0)}


@pytest.mark.parametrize("seed", range(5))
def test_random_scheduler_is_fair(seed):
    sched = RandomFair(seed, patience=4)
    trace = run_fair(Pair(Amb(OMEGA, BOT), Amb(BOT, OMEGA)), 200, sched)
    for left, right in trace.starvation().values():
        assert left <= 4 and right <= 4


@pytest.mark.parametrize("seed", range(5))
def test_random_scheduler_eventually_picks(seed):
    trace = run_fair(Amb(OMEGA, NIL), 50, RandomFair(seed))
    assert trace.last == NILV


def test_recorded_replay():
    rec = Recorder(RandomFair(11))
    t = Pair(Amb(ZERO, ONE), Amb(OMEGA, TWO))
    first = run_fair(t, 20, rec)
    again = run_fair(t, 20, Recorded(rec.tokens()))
    assert first.export() == again.export()
    with pytest.raises(ScheduleExhausted):
        run_fair(t, 20, Recorded(rec.tokens()[:1]))


def test_make_scheduler(tmp_path):
    assert isinstance(make_scheduler("rr"), RoundRobin)
    assert make_scheduler("random:5").seed == 5
    p = tmp_path / "sched.txt"
    p.write_text("B1,1 L\nR\n")
    assert make_scheduler(f"recorded:{p}").decisions == [Budgets(1, 1), PICK_LEFT, PICK_RIGHT]
    with pytest.raises(ValueError):
        make_scheduler("fifo")


def test_trace_export_records():
    trace = run_fair(Amb(OMEGA, NIL), 3, RoundRobin())
    assert trace.lines() == [
        '{"actions": ["/ c-iii\' R"], "decisions": ["R"], "rule": "p-i", "snapshot": "Nil", "step": 0}',
        '{"actions": [], "decisions": [], "rule": "p-ii", "snapshot": "Nil", "step": 1}',
        '{"actions": [], "decisions": [], "rule": "p-ii", "snapshot": "Nil", "step": 2}',
    ]


def test_monotone_snapshots_on_corpus():
    for e in corpus():
        for sched in (RoundRobin(), RandomFair(1), RandomFair(2)):
            trace = run_fair(e.term, e.fuel, sched)
            assert trace.is_monotone(), e.name
            assert lub_all(trace.snapshots) == trace.last


# ---------------------------------------------------------------------------
# Streams

def test_drive_stream_zeros():
    assert [sd_digit(d) for d in drive_stream(sd_stream([], [0]), 2, 100, RoundRobin())] == [0, 0]


def test_drive_stream_not_a_stream():
    with pytest.raises(NotAStream):
        drive_stream(NIL, 1, 10, RoundRobin())
    with pytest.raises(OutOfFuel):
        drive_stream(OMEGA, 1, 10, RoundRobin())


def test_drive_stream_undefined_elements():
    t = Pair(OMEGA, Pair(NIL, NIL))
    assert drive_stream(t, 2, 20, RoundRobin(), undefined_ok=True) == [BOTV, NILV]
    with pytest.raises(OutOfFuel):
        drive_stream(t, 2, 20, RoundRobin())


# ---------------------------------------------------------------------------
# Exploration

def test_explore_examples():
    assert explore(Amb(ZERO, ONE), 10) >= {numeral_value(0), numeral_value(1)}
    maximal = explore(Amb(app(F_PARTIAL, ZERO), app(F_PARTIAL, ONE)), 50)
    assert {m for m in maximal if m != BOTV} == {numeral_value(0)}
    assert explore(NIL, 1) == {NILV}


def test_explore_width_truncates_deterministically():
    t = Pair(Amb(ZERO, ONE), Pair(Amb(ZERO, ONE), Amb(ZERO, ONE)))
    a = explore_graph(t, 10, width=2)
    b = explore_graph(t, 10, width=2)
    assert a == b and a.truncated
    assert explore_graph(t, 10).truncated is False


def test_par_successors_cover_every_schedule():
    t = Pair(Amb(NIL, OMEGA), Amb(BOT, NIL))
    succ = par_successors(t)
    for seed in range(10):
        assert step_par(t, RandomFair(seed, max_budget=1)) in succ


def test_head_outcomes_and_force_outcomes():
    t = Amb(Amb(ZERO, OMEGA), Amb(BOT, TWO))
    assert set(head_outcomes(t, 50)) == {ZERO, TWO}
    assert set(force_outcomes(Pair(Amb(NIL, ZERO), NIL), 50)) == {PairV(NILV, NILV), PairV(numeral_value(0), NILV)}


def test_adequacy_on_corpus():
    for e in corpus():
        assert explore(e.term, e.fuel) == data_set(denote_finitary(e.term, e.fuel)), e.name


def test_trace_limits_lie_in_data_set():
    for e in corpus():
        ds = data_set(denote_finitary(e.term, e.fuel))
        for seed in range(3):
            last = run_fair(e.term, e.fuel, RandomFair(seed)).last
            assert any(leq(last, d) for d in ds), e.name
