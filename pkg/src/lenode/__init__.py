"""Exact interpreter for linear length-ODE function algebras over dyadic numbers."""

from .dyadic import Dyadic, parse_dyadic
from .sgpoly import build_if, build_selector, decompose_linear, degree, eval_expr, sgbar
from .llode import LLODESystem, solve_explicit, solve_iterative, solve_rounded
from .algebra import Sort, typecheck, eval_exact, eval_approx
from .machine import TMSpec, parse_tm, load_fixture, compile_next, compile_exec
from .codec import encode, decode, word_of, direct_pipeline
from .dsl import parse_program

__version__ = "0.1.0"

__all__ = [
    "Dyadic",
    "parse_dyadic",
    "build_if",
    "build_selector",
    "decompose_linear",
    "degree",
    "eval_expr",
    "sgbar",
    "LLODESystem",
    "solve_explicit",
    "solve_iterative",
    "solve_rounded",
    "Sort",
    "typecheck",
    "eval_exact",
    "eval_approx",
    "TMSpec",
    "parse_tm",
    "load_fixture",
    "compile_next",
    "compile_exec",
    "encode",
    "decode",
    "word_of",
    "direct_pipeline",
    "parse_program",
]
