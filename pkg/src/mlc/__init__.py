"""Compilation as multi-language semantics.

A Scheme-like source language and an ANF target share one reduction system
joined by the boundaries ``AS`` (target outside, source inside) and ``SA``
(source outside, target inside).  Ahead-of-time compilation is normalization
of the translation redexes; JIT execution is any interleaving of translation
with evaluation.
"""

import sys

from .machine import EMPTY, Configuration, Heap, Outcome, Status
from .rewrite import RuleName, enumerate_redexes, ml_step
from .sexpr import parse, parse_program
from .source import src_eval
from .strategies import (AOT_THEN_RUN, EAGER, INTERP_ONLY, TRANSLATE_ON_APPLY,
                         Policy, compile_aot, random_interleave, run)
from .target import anf_check, tgt_eval
from .terms import alpha_eq, show

# terms are nested dataclasses walked recursively
if sys.getrecursionlimit() < 10_000:
    sys.setrecursionlimit(10_000)

__all__ = [
    "EMPTY", "Configuration", "Heap", "Outcome", "Status", "RuleName",
    "enumerate_redexes", "ml_step", "parse", "parse_program", "src_eval",
    "AOT_THEN_RUN", "EAGER", "INTERP_ONLY", "TRANSLATE_ON_APPLY", "Policy",
    "compile_aot", "random_interleave", "run", "anf_check", "tgt_eval",
    "alpha_eq", "show",
]
