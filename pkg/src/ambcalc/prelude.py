"""Loader for the shipped prelude of definitions."""

from __future__ import annotations

import functools
from importlib import resources

from ambcalc.parser import Program, parse_program


def prelude_source() -> str:
    return resources.files("ambcalc").joinpath("prelude.amb").read_text(encoding="utf-8")


@functools.lru_cache(maxsize=1)
def load_prelude() -> Program:
    return parse_program(prelude_source(), prelude=False)
