"""Weighted range-labelled patterns compiled to subsequential transducers.

Typical flow::

    from lexfst import compile_source, Evaluator, Policy

    machine = compile_source("(('a':'04') 2 ('b':'3') 3 | ('a':'3') 3 'b' 2):'0'",
                             Policy.MIN)
    Evaluator(machine).evaluate("ab")   # -> '30'

``lexfst.analysis`` holds the functionality certificate and the
interleaved-alphabet checks, ``lexfst.artifact`` the on-disk format and
``lexfst.cli`` the command line front end.
"""

from . import analysis, artifact, oracle, rangeindex
from .core import (
    EQUAL,
    GREATER,
    IDENTITY,
    LESS,
    Effect,
    Policy,
    RangeLabel,
    Transducer,
    Transition,
    effect_mul,
    lex_compare,
    range_intersect,
)
from .evaluate import (
    DEFAULT_BACKEND,
    AmbiguousOutputError,
    Cell,
    DpTable,
    EvalStats,
    Evaluator,
    evaluate,
    evaluate_dense,
    trace,
)
from .glushkov import (
    AmbiguousPatternError,
    Localized,
    assemble,
    begins,
    compile_ast,
    compile_source,
    empty_effect,
    ends,
    links,
    localize,
)
from .parser import PatternSyntaxError, parse
from .syntax import desugar, to_source

__version__ = "0.1.0"

__all__ = [
    "AmbiguousOutputError",
    "AmbiguousPatternError",
    "Cell",
    "DEFAULT_BACKEND",
    "DpTable",
    "EQUAL",
    "Effect",
    "EvalStats",
    "Evaluator",
    "GREATER",
    "IDENTITY",
    "LESS",
    "Localized",
    "PatternSyntaxError",
    "Policy",
    "RangeLabel",
    "Transducer",
    "Transition",
    "analysis",
    "artifact",
    "assemble",
    "begins",
    "compile_ast",
    "compile_source",
    "desugar",
    "effect_mul",
    "empty_effect",
    "ends",
    "evaluate",
    "evaluate_dense",
    "lex_compare",
    "links",
    "localize",
    "oracle",
    "parse",
    "range_intersect",
    "rangeindex",
    "to_source",
    "trace",
]
