"""Command-line front end: ``amb check|stream|explore|data|run``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from ambcalc.engine import NotAStream, Recorder, drive_stream, explore_graph, make_scheduler, run_fair
from ambcalc.gray import GRAY_VALUE, SD_VALUE, gray_letter, sd_digit
from ambcalc.parser import ParseError, Program, parse_program, parse_term
from ambcalc.prelude import load_prelude
from ambcalc.printer import print_term
from ambcalc.reduce import OutOfFuel
from ambcalc.terms import Term
from ambcalc.typecheck import TypeCheckError, type_check
from ambcalc.values import BOTV, Inconsistent, Value, data_set, render, render_set, to_json, value_of_literal

EXIT_OK, EXIT_PARSE, EXIT_TYPE, EXIT_FUEL, EXIT_INTERNAL = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


def _positive(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive count, got {n}")
    return n


def _load(path: str) -> Program:
    try:
        src = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(f"{path}: {e.strerror}", EXIT_PARSE) from None
    try:
        return parse_program(src)
    except ParseError as e:
        raise CliError(f"{path}:{e}", EXIT_PARSE) from None


def _main_term(prog: Program, name: str) -> Term:
    if name not in prog.defs:
        raise CliError(f"no definition named {name!r}", EXIT_PARSE)
    return prog.term(name)


def _scheduler(spec: str):
    try:
        return make_scheduler(spec)
    except (ValueError, OSError) as e:
        raise CliError(str(e), EXIT_PARSE) from None


def _digit_token(val: Value, style: str) -> str:
    if style == "auto":
        style = "sd" if val in SD_VALUE.values() else "gray" if val in GRAY_VALUE or val == BOTV else "raw"
    if style == "sd":
        return str(sd_digit(val))
    if style == "gray":
        return gray_letter(val)
    return render(val)


def cmd_check(args: argparse.Namespace) -> int:
    prog = _load(args.file)
    base = load_prelude()
    count = 0
    for name, d in prog.defs.items():
        if d.ty is None or base.defs.get(name) is d:
            continue
        try:
            type_check((), d.term, d.ty)
        except TypeCheckError as e:
            raise CliError(f"{args.file}:{d.line}: {name}: {e}", EXIT_TYPE) from None
        count += 1
    print(f"ok: {count} definition(s) checked")
    return EXIT_OK


def cmd_stream(args: argparse.Namespace) -> int:
    t = _main_term(_load(args.file), args.main)
    sched = Recorder(_scheduler(args.sched))
    try:
        digits = drive_stream(t, args.digits, args.fuel, sched, undefined_ok=args.style == "gray")
    except NotAStream as e:
        raise CliError(str(e), EXIT_TYPE) from None
    finally:
        if args.record:
            Path(args.record).write_text(" ".join(sched.tokens()) + "\n", encoding="utf-8")
    try:
        tokens = [_digit_token(d, args.style) for d in digits]
    except ValueError as e:
        raise CliError(str(e), EXIT_TYPE) from None
    if args.json:
        print(json.dumps({"main": args.main, "sched": args.sched, "digits": tokens}))
    else:
        print(" ".join(tokens))
    return EXIT_OK


def cmd_explore(args: argparse.Namespace) -> int:
    t = _main_term(_load(args.file), args.main)
    ex = explore_graph(t, args.fuel, args.width)
    if args.json:
        print(json.dumps({
            "main": args.main,
            "maximal": sorted((to_json(v) for v in ex.maximal), key=json.dumps),
            "states": ex.states,
            "truncated": ex.truncated,
        }))
    else:
        print(render_set(ex.maximal))
    return EXIT_OK


def cmd_data(args: argparse.Namespace) -> int:
    try:
        t = parse_term(args.literal)
        val = value_of_literal(t)
    except ParseError as e:
        raise CliError(f"literal:{e}", EXIT_PARSE) from None
    except ValueError as e:
        raise CliError(str(e), EXIT_PARSE) from None
    print(render_set(data_set(val)))
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    t = _main_term(_load(args.file), args.main)
    sched = Recorder(_scheduler(args.sched))
    try:
        trace = run_fair(t, args.fuel, sched)
    finally:
        if args.record:
            Path(args.record).write_text(" ".join(sched.tokens()) + "\n", encoding="utf-8")
    sys.stdout.write(trace.export())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="amb", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="type-check every annotated definition")
    p.add_argument("file")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("stream", help="print the first digits of a stream")
    p.add_argument("file")
    p.add_argument("--main", required=True)
    p.add_argument("--digits", type=_positive, default=10)
    p.add_argument("--fuel", type=_positive, default=100_000, help="steps per digit")
    p.add_argument("--sched", default="rr", help="rr, random:SEED or recorded:PATH")
    p.add_argument("--style", choices=("auto", "sd", "gray", "raw"), default="auto")
    p.add_argument("--json", action="store_true")
    p.add_argument("--record", help="write the scheduler decisions to this file")
    p.set_defaults(fn=cmd_stream)

    p = sub.add_parser("explore", help="maximal values over all schedules")
    p.add_argument("file")
    p.add_argument("--main", required=True)
    p.add_argument("--fuel", type=_positive, default=50, help="parallel steps")
    p.add_argument("--width", type=_positive, default=None, help="states kept per level")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_explore)

    p = sub.add_parser("data", help="data set of a value literal")
    p.add_argument("literal")
    p.set_defaults(fn=cmd_data)

    p = sub.add_parser("run", help="export a trace of parallel steps as JSON lines")
    p.add_argument("file")
    p.add_argument("--main", required=True)
    p.add_argument("--fuel", type=_positive, default=50, help="parallel steps")
    p.add_argument("--sched", default="rr", help="rr, random:SEED or recorded:PATH")
    p.add_argument("--record", help="write the scheduler decisions to this file")
    p.set_defaults(fn=cmd_run)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except OutOfFuel as e:
        print(f"error: out of fuel after {e.fuel} steps; stalled at: {print_term(e.term)}", file=sys.stderr)
        return EXIT_FUEL
    except (Inconsistent, AssertionError, RecursionError) as e:
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
