"""Interpreter, type checker and semantic test bench for a lambda calculus
with the Amb constructor."""

import sys

# Terms are trees of nested dataclasses; deep streams need a larger limit.
if sys.getrecursionlimit() < 10000:
    sys.setrecursionlimit(10000)
