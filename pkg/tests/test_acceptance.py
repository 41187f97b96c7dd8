"""Acceptance suite. Each test is one criterion; the terminal summary lists
one PASS/FAIL line per criterion."""

from __future__ import annotations

import random
import shutil
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from corpus import ONE, ZERO, closed_terms, corpus, typed_corpus
from test_reduce import all_successors
from ambcalc.engine import RandomFair, Recorded, Recorder, RoundRobin, drive_stream, explore, explore_stream, run_fair
from ambcalc.gray import GTOS, gray_code, gray_stream, gray_type, gtos_of, sd2_type, sd_check, sd_digit, sd_interval
from ambcalc.printer import print_term
from ambcalc.realizers import F_PARTIAL, MAPAMB, MIN, numeral_value, predicate_term, value_numeral, check_conc_contract
from ambcalc.reduce import step_det
from ambcalc.terms import Amb, app, is_whnf
from ambcalc.ty import AmbTy, Arrow, Fix, Prod, TVar, amb_stream, is_regular, nat, three, two
from ambcalc.typecheck import has_type, type_check
from ambcalc.values import BOTV, AmbV, LeftV, NILV, data_set, denote_finitary, lub_all

criterion = pytest.mark.criterion


def _amb_cmd() -> list[str]:
    exe = shutil.which("amb")
    return [exe] if exe else [sys.executable, "-m", "ambcalc.cli"]


# ---------------------------------------------------------------------------
# Prefix-set oracles for the conversion of 1/3 and of 0.

def third_prefixes(depth: int) -> tuple[set[tuple[int, ...]], set[tuple[int, ...]]]:
    """Depth-``depth`` prefixes of the sets A (outputs on R^w) and B (outputs
    on L:R^w), generated from the mutual equations

        A = {1:b | b in B} u {0:1:a | a in A}
        B = {-1:a | a in A} u {0:-1:b | b in B}

    truncated to ``depth``."""
    memo: dict[int, tuple[set, set]] = {0: ({()}, {()})}

    def sets(k: int) -> tuple[set, set]:
        if k <= 0:
            return {()}, {()}
        if k not in memo:
            a1, b1 = sets(k - 1)
            a2, b2 = sets(k - 2)
            a = {(1,) + b for b in b1} | {((0, 1) + x)[:k] for x in a2}
            b = {(-1,) + x for x in a1} | {((0, -1) + y)[:k] for y in b2}
            memo[k] = (a, b)
        return memo[k]

    return sets(depth)


def zero_prefixes(depth: int) -> tuple[set, set, set]:
    """Depth-``depth`` prefixes of A = {0^w}, B = {0^k:-1:1^w} and
    C = {0^k:1:-1^w}."""
    a = {(0,) * depth}
    b = {((0,) * k + (-1,) + (1,) * depth)[:depth] for k in range(depth + 1)}
    c = {((0,) * k + (1,) + (-1,) * depth)[:depth] for k in range(depth + 1)}
    return a, b, c


def test_prefix_oracles_frozen():
    a, b = third_prefixes(3)
    assert a == {(1, -1, 1), (1, -1, 0), (1, 0, -1), (0, 1, 1), (0, 1, 0)}
    assert b == {(-1, 1, -1), (-1, 1, 0), (-1, 0, 1), (0, -1, -1), (0, -1, 0)}
    za, zb, _ = zero_prefixes(3)
    assert za | zb == {(0, 0, 0), (-1, 1, 1), (0, -1, 1), (0, 0, -1)}
    # Every prefix in A denotes 1/3, every prefix in B denotes -1/3.
    for depth in range(1, 7):
        a, b = third_prefixes(depth)
        assert all(sd_check(p, Fraction(1, 3)) for p in a)
        assert all(sd_check(p, Fraction(-1, 3)) for p in b)


# ---------------------------------------------------------------------------

@criterion(1, "one-third conversion via `amb stream`: 10 digits < 5 s, sd_check, interval width 2^-10 containing 1/3")
def test_criterion_01_one_third(tmp_path):
    src = tmp_path / "third.amb"
    src.write_text(f"let main = {print_term(gtos_of(Fraction(1, 3)))};\n", encoding="utf-8")
    start = time.perf_counter()
    out = subprocess.run(
        _amb_cmd() + ["stream", str(src), "--main", "main", "--digits", "10", "--fuel", "100000", "--sched", "rr"],
        capture_output=True, text=True, check=True,
    )
    elapsed = time.perf_counter() - start
    digits = [int(tok) for tok in out.stdout.split()]
    assert len(digits) == 10
    assert elapsed < 5
    assert sd_check(digits, Fraction(1, 3))
    lo, hi = sd_interval(digits)
    assert lo <= Fraction(1, 3) <= hi
    assert hi - lo == Fraction(1, 2 ** 10), f"interval width is {hi - lo}, criterion requires 1/1024"


@criterion(2, "explore gtos(R^w) to depth 3 equals the depth-3 prefixes of A, < 60 s")
def test_criterion_02_third_prefix_sets():
    start = time.perf_counter()
    got = explore_stream(gtos_of(Fraction(1, 3)), 3, 5000)
    elapsed = time.perf_counter() - start
    a, _ = third_prefixes(3)
    assert {tuple(sd_digit(d) for d in p) for p in got} == a
    assert elapsed < 60


@criterion(3, "gtos on the undefined code of 0 emits 0 0 0 0 under rr and 5 seeds; explore on L:R:L^w stays in A u B")
def test_criterion_03_zero_codes():
    bot_code = gtos_of(Fraction(0))
    for sched in [RoundRobin()] + [RandomFair(seed) for seed in range(5)]:
        assert [sd_digit(d) for d in drive_stream(bot_code, 4, 100_000, sched)] == [0, 0, 0, 0]
    za, zb, _ = zero_prefixes(3)
    got = {tuple(sd_digit(d) for d in p) for p in explore_stream(app(GTOS, gray_code("LR", "L")), 3, 5000)}
    assert got and got <= za | zb


@criterion(4, "mapamb f Amb(0,1) denotes Amb(0, bot) and its data set is {0}")
def test_criterion_04_mapamb_remark():
    val = denote_finitary(app(MAPAMB, F_PARTIAL, Amb(ZERO, ONE)), 500)
    assert val == AmbV(numeral_value(0), BOTV)
    assert data_set(val) == {numeral_value(0)}


_CANDIDATE_TYPES = [two(), nat(), Prod(two(), two()), AmbTy(two()), Arrow(two(), two()), Arrow(nat(), nat())]


@criterion(5, "reducer is deterministic and normal forms are whnfs on 500 terms; types are preserved per step")
def test_criterion_05_reducer_laws():
    terms = closed_terms(500, seed=2024, depth=5)
    for t in terms:
        succ = all_successors(t)
        s = step_det(t)
        assert len(succ) <= 1
        assert (s is None) == (not succ) == is_whnf(t)
        if s is not None:
            assert s.next == succ[0]
    typed = [(t, ty) for t in terms for ty in _CANDIDATE_TYPES if has_type(t, ty)]
    typed += typed_corpus(100, seed=2024)
    assert len(typed) >= 100
    for t, ty in typed:
        for _ in range(25):
            s = step_det(t)
            if s is None:
                break
            t = s.next
            assert type_check((), t, ty)


@criterion(6, "adequacy: maximal explore snapshots equal data_set(denote_finitary) on >= 50 terms, < 120 s")
def test_criterion_06_adequacy():
    entries = corpus()
    assert len(entries) >= 50
    start = time.perf_counter()
    for e in entries:
        assert explore(e.term, e.fuel) == data_set(denote_finitary(e.term, e.fuel)), e.name
    assert time.perf_counter() - start < 120


@criterion(7, "snapshots increase and their lub is the last one, on the corpus and 100 random gtos runs")
def test_criterion_07_monotonicity():
    runs = [(e.term, e.fuel, sched) for e in corpus() for sched in (RoundRobin(), RandomFair(7))]
    rng = random.Random(77)
    for _ in range(100):
        x = Fraction(rng.randint(-30, 30), rng.randint(1, 30))
        x = max(Fraction(-1), min(Fraction(1), x))
        runs.append((gtos_of(x), 40, RandomFair(rng.randrange(10_000))))
    for t, fuel, sched in runs:
        trace = run_fair(t, fuel, sched)
        assert trace.is_monotone()
        assert lub_all(trace.snapshots) == trace.last


@criterion(8, "gtos checks at 2^w -> fix a. A(3 * a); fix a. A(a) is not regular; nat and fix a. A(3 * a) are")
def test_criterion_08_types():
    assert type_check((), GTOS, Arrow(gray_type(), sd2_type()))
    assert not is_regular(Fix("a", AmbTy(TVar("a"))))
    assert is_regular(nat())
    assert is_regular(amb_stream(three()))


@criterion(9, "conc contract rejects Amb(bot,bot) and good/bad pairs; min finds least witnesses on 20 predicates")
def test_criterion_09_realizers():
    ok = lambda v: v == numeral_value(0)  # noqa: E731
    assert not check_conc_contract(AmbV(BOTV, BOTV), ok)
    assert not check_conc_contract(AmbV(numeral_value(0), LeftV(LeftV(NILV))), ok)
    assert check_conc_contract(AmbV(numeral_value(0), BOTV), ok)
    rng = random.Random(99)
    for _ in range(20):
        table = [rng.random() < 0.3 for _ in range(rng.randint(0, 6))]
        witness = next((k for k, b in enumerate(table) if b), len(table))
        got = value_numeral(denote_finitary(app(MIN, predicate_term(table, True)), 20_000))
        assert got == witness


@criterion(10, "a random-scheduler run replayed from its recorded decisions gives byte-identical traces")
def test_criterion_10_replay(tmp_path):
    subjects = [e.term for e in corpus()[::7]] + [gtos_of(Fraction(1, 3)), gtos_of(Fraction(0))]
    for seed, t in enumerate(subjects):
        rec = Recorder(RandomFair(seed))
        first = run_fair(t, 30, rec).export()
        assert run_fair(t, 30, Recorded(rec.tokens())).export() == first
    src = tmp_path / "p.amb"
    src.write_text("let main = gtos gray_minus_third;\n", encoding="utf-8")
    sched = tmp_path / "sched.txt"
    base = _amb_cmd() + ["run", str(src), "--main", "main", "--fuel", "25"]
    first = subprocess.run(base + ["--sched", "random:5", "--record", str(sched)], capture_output=True, check=True).stdout
    again = subprocess.run(base + ["--sched", f"recorded:{sched}"], capture_output=True, check=True).stdout
    assert first == again and first


# ---------------------------------------------------------------------------
# Exact prefix sets for the three codes of 0, beyond what criterion 3 needs.

@pytest.mark.parametrize(
    "code, parts",
    [(gray_code("_R", "L"), "a"), (gray_code("LR", "L"), "ab"), (gray_code("RR", "L"), "ac")],
)
def test_zero_code_prefix_sets(code, parts):
    a, b, c = zero_prefixes(3)
    want = set().union(*({"a": a, "b": b, "c": c}[p] for p in parts))
    got = {tuple(sd_digit(d) for d in p) for p in explore_stream(app(GTOS, code), 3, 5000)}
    assert got == want


def test_minus_third_prefix_set():
    _, b = third_prefixes(4)
    got = explore_stream(gtos_of(Fraction(-1, 3)), 4, 5000)
    assert {tuple(sd_digit(d) for d in p) for p in got} == b


def test_gray_stream_of_zero_is_the_undefined_code():
    assert gray_stream(Fraction(0)) == gray_code("_R", "L")
