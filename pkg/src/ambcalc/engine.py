"""Choice and parallel reduction, schedulers, traces, stream driving and
bounded exhaustive exploration.

Choice steps (``~>c``) on a closed term ``t``::

    c-i     t ~> t'                    head step, when t is not a whnf
    c-ii    Amb(M1, M2) ~>c Amb(M1', M2')   M1 takes exactly l ~>-steps, M2 exactly r; l + r > 0
    c-iii   Amb(M1, M2) ~>c M1         M1 a whnf
    c-iii'  Amb(M1, M2) ~>c M2         M2 a whnf

Parallel steps (``~>p``)::

    p-i     a choice step at the root
    p-ii    C(M1..Mk) ~>p C(M1'..Mk')  every argument takes a ~>p step (C a data constructor)
    p-iii   \\x.M ~>p \\x.M

Amb nodes are addressed by paths: the tuple of argument positions leading
from the root through data constructors to the node.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Protocol

from ambcalc.reduce import OutOfFuel, step_det
from ambcalc.terms import Amb, Lam, Nil, Pair, Term, is_data_constructor, is_whnf, rebuild
from ambcalc.values import BOTV, Value, data_value, leq, lub_all, maximal, project, render

Path = tuple[int, ...]


# ---------------------------------------------------------------------------
# Decisions

@dataclass(frozen=True, slots=True)
class HeadStep:
    def token(self) -> str:
        return "H"


@dataclass(frozen=True, slots=True)
class Budgets:
    l: int
    r: int

    def __post_init__(self) -> None:
        if self.l < 0 or self.r < 0 or self.l + self.r == 0:
            raise ValueError(f"budgets must be non-negative with a positive sum, got ({self.l}, {self.r})")

    def token(self) -> str:
        return f"B{self.l},{self.r}"


@dataclass(frozen=True, slots=True)
class PickLeft:
    def token(self) -> str:
        return "L"


@dataclass(frozen=True, slots=True)
class PickRight:
    def token(self) -> str:
        return "R"


Decision = HeadStep | Budgets | PickLeft | PickRight

HEAD, PICK_LEFT, PICK_RIGHT = HeadStep(), PickLeft(), PickRight()
UNIT_BUDGETS = ((1, 0), (0, 1), (1, 1))


def parse_decision(token: str) -> Decision:
    match token:
        case "H":
            return HEAD
        case "L":
            return PICK_LEFT
        case "R":
            return PICK_RIGHT
    if token.startswith("B"):
        try:
            l, r = (int(x) for x in token[1:].split(","))
        except ValueError:
            pass
        else:
            return Budgets(l, r)
    raise ValueError(f"not a decision token: {token!r}")


class Stuck(Exception):
    """A decision whose side conditions do not hold for the term."""


def _run(t: Term, n: int) -> Term:
    # Exactly n ~>-steps; a whnf cannot take a step.
    for _ in range(n):
        s = step_det(t)
        if s is None:
            raise Stuck(f"cannot take {n} steps: reached a normal form")
        t = s.next
    return t


def step_choice(t: Term, d: Decision) -> Term:
    """One ``~>c`` step selected by ``d``."""
    match d:
        case HeadStep():
            s = step_det(t)
            if s is None:
                raise Stuck("head step on a weak head normal form")
            return s.next
        case Budgets(l, r):
            if not isinstance(t, Amb):
                raise Stuck("budgets need an Amb term")
            return Amb(_run(t.left, l), _run(t.right, r))
        case PickLeft():
            if not isinstance(t, Amb) or not is_whnf(t.left):
                raise Stuck("pick-left needs Amb with a left whnf")
            return t.left
        case PickRight():
            if not isinstance(t, Amb) or not is_whnf(t.right):
                raise Stuck("pick-right needs Amb with a right whnf")
            return t.right
    raise TypeError(f"not a decision: {d!r}")


def legal_decisions(t: Term, budgets: Iterable[tuple[int, int]] = UNIT_BUDGETS) -> list[Decision]:
    """Choice decisions applicable to ``t``, with budgets drawn from ``budgets``."""
    if isinstance(t, Amb):
        out: list[Decision] = []
        for l, r in budgets:
            try:
                _run(t.left, l)
                _run(t.right, r)
            except Stuck:
                continue
            out.append(Budgets(l, r))
        if is_whnf(t.left):
            out.append(PICK_LEFT)
        if is_whnf(t.right):
            out.append(PICK_RIGHT)
        return out
    if not is_whnf(t):
        return [HEAD]
    return []


# ---------------------------------------------------------------------------
# Schedulers

class Scheduler(Protocol):
    def decide(self, t: Amb, path: Path, step: int) -> Decision: ...


class RoundRobin:
    """Pick a side as soon as it is a whnf (left first), else advance both."""

    def decide(self, t: Amb, path: Path, step: int) -> Decision:
        if is_whnf(t.left):
            return PICK_LEFT
        if is_whnf(t.right):
            return PICK_RIGHT
        return Budgets(1, 1)


def _available(t: Term, limit: int) -> int:
    # How many ~>-steps t can take, capped at limit.
    for n in range(limit):
        s = step_det(t)
        if s is None:
            return n
        t = s.next
    return limit


class RandomFair:
    """Seeded random budgets and picks.

    A side that has gone ``patience`` consecutive decisions without being
    served (no steps while it could step, or not picked while it is a whnf)
    is served next, so no side is starved.
    """

    def __init__(self, seed: int, patience: int = 4, max_budget: int = 3) -> None:
        self.seed = seed
        self.rng = random.Random(seed)
        self.patience = patience
        self.max_budget = max_budget
        self.waiting: dict[Path, list[int]] = {}

    def decide(self, t: Amb, path: Path, step: int) -> Decision:
        wait = self.waiting.setdefault(path, [0, 0])
        lw, rw = is_whnf(t.left), is_whnf(t.right)
        if lw and rw:
            del self.waiting[path]
            return PICK_LEFT if self.rng.random() < 0.5 else PICK_RIGHT
        if lw or rw:
            ready, other = (0, 1) if lw else (1, 0)
            if wait[ready] >= self.patience or self.rng.random() < 0.5:
                del self.waiting[path]
                return PICK_LEFT if lw else PICK_RIGHT
            wait[ready] += 1
            wait[other] = 0
            n = self.rng.randint(1, _available(t.right if lw else t.left, self.max_budget))
            return Budgets(0, n) if lw else Budgets(n, 0)
        l = self.rng.randint(0, _available(t.left, self.max_budget))
        r = self.rng.randint(0, _available(t.right, self.max_budget))
        if wait[0] >= self.patience:
            l = max(l, 1)
        if wait[1] >= self.patience:
            r = max(r, 1)
        if l + r == 0:
            l, r = (1, 0) if self.rng.random() < 0.5 else (0, 1)
        wait[0] = 0 if l else wait[0] + 1
        wait[1] = 0 if r else wait[1] + 1
        return Budgets(l, r)


class ScheduleExhausted(Exception):
    """A recorded schedule ran out of decisions."""


class Recorded:
    """Replays an explicit list of decisions, one per Amb consultation."""

    def __init__(self, decisions: Iterable[Decision | str]) -> None:
        self.decisions = [parse_decision(d) if isinstance(d, str) else d for d in decisions]
        self.pos = 0

    def decide(self, t: Amb, path: Path, step: int) -> Decision:
        if self.pos >= len(self.decisions):
            raise ScheduleExhausted(f"recorded schedule has only {len(self.decisions)} decisions")
        d = self.decisions[self.pos]
        self.pos += 1
        return d


class Recorder:
    """Wraps a scheduler and keeps every decision it makes."""

    def __init__(self, inner: Scheduler) -> None:
        self.inner = inner
        self.log: list[Decision] = []

    def decide(self, t: Amb, path: Path, step: int) -> Decision:
        d = self.inner.decide(t, path, step)
        self.log.append(d)
        return d

    def tokens(self) -> list[str]:
        return [d.token() for d in self.log]


def make_scheduler(spec: str) -> Scheduler:
    """``rr``, ``random:SEED`` or ``recorded:PATH`` (whitespace-separated tokens)."""
    if spec == "rr":
        return RoundRobin()
    kind, _, arg = spec.partition(":")
    if kind == "random" and arg:
        return RandomFair(int(arg))
    if kind == "recorded" and arg:
        with open(arg, encoding="utf-8") as fh:
            return Recorded(fh.read().split())
    raise ValueError(f"bad scheduler spec {spec!r}; expected rr, random:SEED or recorded:PATH")


# ---------------------------------------------------------------------------
# Parallel steps and traces

@dataclass(frozen=True)
class Action:
    """What happened at one position during a ``~>p`` step."""

    path: Path
    rule: str
    decision: Decision | None = None
    det_rule: str | None = None

    def render(self) -> str:
        where = "/" + "/".join(map(str, self.path))
        tag = self.rule
        if self.decision is not None:
            tag += " " + self.decision.token()
        if self.det_rule is not None:
            tag += " " + self.det_rule
        return f"{where} {tag}"


def step_par(t: Term, sched: Scheduler, step: int = 0, actions: list[Action] | None = None) -> Term:
    """One ``~>p`` step. Amb nodes in choice position consult ``sched``."""
    log = actions if actions is not None else []
    return _par(t, (), sched, step, log)


def _par(t: Term, path: Path, sched: Scheduler, step: int, log: list[Action]) -> Term:
    if is_data_constructor(t):
        if isinstance(t, Nil):
            log.append(Action(path, "p-ii"))
            return t
        args = tuple(_par(a, path + (i,), sched, step, log) for i, a in enumerate(t.args))  # type: ignore[attr-defined]
        return rebuild(t, args)
    if isinstance(t, Lam):
        log.append(Action(path, "p-iii"))
        return t
    if isinstance(t, Amb):
        d = sched.decide(t, path, step)
        new = step_choice(t, d)
        rule = {Budgets: "c-ii", PickLeft: "c-iii", PickRight: "c-iii'"}[type(d)]
        log.append(Action(path, rule, d))
        return new
    s = step_det(t)
    assert s is not None
    log.append(Action(path, "c-i", None, s.redex_rule))
    return s.next


def _top_rule(t: Term) -> str:
    if is_data_constructor(t):
        return "p-ii"
    if isinstance(t, Lam):
        return "p-iii"
    return "p-i"


@dataclass
class TraceStep:
    index: int
    rule: str
    actions: tuple[Action, ...]
    snapshot: Value
    term: Term | None = None

    @property
    def decisions(self) -> list[Decision]:
        return [a.decision for a in self.actions if a.decision is not None]

    def record(self) -> dict:
        return {
            "step": self.index,
            "rule": self.rule,
            "actions": [a.render() for a in self.actions if a.rule not in ("p-ii", "p-iii")],
            "decisions": [a.decision.token() for a in self.actions if a.decision is not None],
            "snapshot": render(self.snapshot),
        }


@dataclass
class Trace:
    start: Term
    initial: Value
    steps: list[TraceStep] = field(default_factory=list)
    final: Term | None = None

    @property
    def snapshots(self) -> list[Value]:
        return [self.initial] + [s.snapshot for s in self.steps]

    @property
    def last(self) -> Value:
        return self.steps[-1].snapshot if self.steps else self.initial

    def decisions(self) -> list[Decision]:
        return [d for s in self.steps for d in s.decisions]

    def decision_tokens(self) -> list[str]:
        return [d.token() for d in self.decisions()]

    def is_monotone(self) -> bool:
        snaps = self.snapshots
        return all(leq(a, b) for a, b in zip(snaps, snaps[1:]))

    def limit(self) -> Value:
        return lub_all(self.snapshots)

    def category(self) -> tuple[str, int | None]:
        """(a) all steps by p-i; (b) from a least n on, all by p-ii;
        (c) from a least n on, all by p-iii. Once a step is not p-i the term
        is a data constructor or an abstraction forever, so the finite trace
        already fixes the category of every extension."""
        for s in self.steps:
            if s.rule == "p-ii":
                return ("b", s.index)
            if s.rule == "p-iii":
                return ("c", s.index)
        return ("a", None)

    def starvation(self) -> dict[Path, tuple[int, int]]:
        """Longest run, per Amb path, of consecutive decisions that gave the
        left (resp. right) side no steps without picking it."""
        runs: dict[Path, list[int]] = {}
        worst: dict[Path, list[int]] = {}
        for s in self.steps:
            for a in s.actions:
                if a.decision is None:
                    continue
                cur = runs.setdefault(a.path, [0, 0])
                top = worst.setdefault(a.path, [0, 0])
                match a.decision:
                    case Budgets(l, r):
                        cur[0] = 0 if l else cur[0] + 1
                        cur[1] = 0 if r else cur[1] + 1
                    case _:
                        cur[0] = cur[1] = 0
                top[0] = max(top[0], cur[0])
                top[1] = max(top[1], cur[1])
        return {p: (w[0], w[1]) for p, w in worst.items()}

    def lines(self) -> list[str]:
        return [json.dumps(s.record(), sort_keys=True) for s in self.steps]

    def export(self) -> str:
        return "".join(line + "\n" for line in self.lines())


def run_fair(t: Term, fuel: int, sched: Scheduler, keep_terms: bool = False) -> Trace:
    """``fuel`` parallel steps from ``t`` under ``sched``, with a snapshot of
    the committed value after every step."""
    trace = Trace(t, project(t))
    cur = t
    for i in range(fuel):
        actions: list[Action] = []
        rule = _top_rule(cur)
        cur = step_par(cur, sched, i, actions)
        trace.steps.append(TraceStep(i, rule, tuple(actions), project(cur), cur if keep_terms else None))
    trace.final = cur
    return trace


# ---------------------------------------------------------------------------
# Streams

class NotAStream(ValueError):
    """The head of a stream did not evaluate to a pair."""


class Budget:
    def __init__(self, fuel: int) -> None:
        self.fuel = fuel
        self.left = fuel

    def spend(self, t: Term) -> None:
        if self.left <= 0:
            raise OutOfFuel(t, self.fuel)
        self.left -= 1


def resolve_head(t: Term, sched: Scheduler, budget: Budget, path: Path = ()) -> Term:
    """Choice steps at the root until a non-Amb whnf is reached."""
    step = 0
    while True:
        if isinstance(t, Amb):
            budget.spend(t)
            t = step_choice(t, sched.decide(t, path, step))
        elif not is_whnf(t):
            budget.spend(t)
            t = step_det(t).next  # type: ignore[union-attr]
        else:
            return t
        step += 1


def force(t: Term, sched: Scheduler, budget: Budget, path: Path = ()) -> Value:
    """Evaluate a finite data term completely, resolving Amb nodes by ``sched``."""
    w = resolve_head(t, sched, budget, path)
    if is_data_constructor(w):
        parts = tuple(force(a, sched, budget, path + (i,)) for i, a in enumerate(w.args))  # type: ignore[attr-defined]
        return data_value(w, parts)
    return project(w)


def drive_stream(
    t: Term, n: int, fuel: int, sched: Scheduler, undefined_ok: bool = False
) -> list[Value]:
    """The first ``n`` elements of a stream (``fix a. s * a`` or
    ``fix a. A(s * a)``). Each element gets ``fuel`` steps to appear and be
    fully evaluated. With ``undefined_ok`` an element that does not finish
    within its fuel is reported as bottom instead of raising."""
    out: list[Value] = []
    for k in range(n):
        budget = Budget(fuel)
        cell = resolve_head(t, sched, budget, (k,))
        if not isinstance(cell, Pair):
            raise NotAStream(f"stream element {k} is not a pair: {cell}")
        try:
            out.append(force(cell.fst, sched, budget, (k, 0)))
        except OutOfFuel:
            if not undefined_ok:
                raise
            out.append(BOTV)
        t = cell.snd
    return out


# ---------------------------------------------------------------------------
# Exploration

def par_successors(t: Term, budgets: Iterable[tuple[int, int]] = UNIT_BUDGETS) -> list[Term]:
    """Every ``~>p`` successor of ``t`` over all legal decisions."""
    budgets = tuple(budgets)
    if is_data_constructor(t):
        if isinstance(t, Nil):
            return [t]
        options = [par_successors(a, budgets) for a in t.args]  # type: ignore[attr-defined]
        combos: list[tuple[Term, ...]] = [()]
        for opts in options:
            combos = [c + (o,) for c in combos for o in opts]
        out = [rebuild(t, c) for c in combos]
        return list(dict.fromkeys(out))
    if isinstance(t, Lam):
        return [t]
    if isinstance(t, Amb):
        return list(dict.fromkeys(step_choice(t, d) for d in legal_decisions(t, budgets)))
    return [step_det(t).next]  # type: ignore[union-attr]


@dataclass
class Exploration:
    snapshots: frozenset[Value]
    maximal: frozenset[Value]
    states: int
    levels: int
    truncated: bool


def explore_graph(t: Term, fuel: int, width: int | None = None) -> Exploration:
    """Breadth-first search over ``~>p`` successors for ``fuel`` levels.

    Identical terms are visited once. If ``width`` is given, each level keeps
    only the first ``width`` new terms in discovery order, which is
    deterministic.
    """
    seen = {t: None}
    snaps = {project(t)}
    frontier = [t]
    truncated = False
    levels = 0
    for _ in range(fuel):
        if not frontier:
            break
        levels += 1
        nxt: dict[Term, None] = {}
        for u in frontier:
            for s in par_successors(u):
                if s not in seen:
                    seen[s] = None
                    nxt[s] = None
        frontier = list(nxt)
        if width is not None and len(frontier) > width:
            frontier = frontier[:width]
            truncated = True
        snaps.update(project(u) for u in frontier)
    return Exploration(frozenset(snaps), maximal(snaps), len(seen), levels, truncated)


def explore(t: Term, fuel: int, width: int | None = None) -> frozenset[Value]:
    """Maximal committed values reachable within ``fuel`` parallel steps."""
    return explore_graph(t, fuel, width).maximal


def head_outcomes(t: Term, fuel: int) -> list[Term]:
    """Every non-Amb whnf that some schedule of choice steps reaches from ``t``.

    Because ``~>`` is deterministic, what a schedule can do with
    ``Amb(M1, M2)`` is pick the whnf of ``M1`` or the whnf of ``M2``, when
    they exist; how the steps were interleaved before the pick does not
    matter. Sides without a whnf within ``fuel`` steps cannot be picked.
    """
    out: dict[Term, None] = {}
    stack = [t]
    seen: set[Term] = set()
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        try:
            w = _whnf(u, fuel)
        except OutOfFuel:
            continue
        if isinstance(w, Amb):
            stack += [w.right, w.left]
        else:
            out[w] = None
    return list(out)


def _whnf(t: Term, fuel: int) -> Term:
    for _ in range(fuel):
        if is_whnf(t):
            return t
        t = step_det(t).next  # type: ignore[union-attr]
    if is_whnf(t):
        return t
    raise OutOfFuel(t, fuel)


def force_outcomes(t: Term, fuel: int) -> list[Value]:
    """Every complete value some schedule can evaluate ``t`` to."""
    results: list[Value] = []
    for w in head_outcomes(t, fuel):
        if is_data_constructor(w):
            combos: list[tuple[Value, ...]] = [()]
            for a in w.args:  # type: ignore[attr-defined]
                opts = force_outcomes(a, fuel)
                combos = [c + (o,) for c in combos for o in opts]
            results += [data_value(w, c) for c in combos]
        else:
            results.append(project(w))
    return list(dict.fromkeys(results))


def explore_stream(t: Term, depth: int, fuel: int) -> frozenset[tuple[Value, ...]]:
    """All length-``depth`` element prefixes that fair schedules can emit
    from the stream ``t``, with ``fuel`` steps per head resolution."""
    states: dict[tuple[tuple[Value, ...], Term], None] = {((), t): None}
    for _ in range(depth):
        nxt: dict[tuple[tuple[Value, ...], Term], None] = {}
        for prefix, u in states:
            for cell in head_outcomes(u, fuel):
                if not isinstance(cell, Pair):
                    continue
                for d in force_outcomes(cell.fst, fuel):
                    nxt[(prefix + (d,), cell.snd)] = None
        states = nxt
    return frozenset(p for p, _ in states)

