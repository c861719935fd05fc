"""Command-line front end.

Exit codes: 0 success, 1 a checked property failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import algebra as alg
from .dsl import DSLError, FnDecl, LimitDecl, LLODEDecl, Param, format_program, parse_program
from .dyadic import Dyadic, parse_dyadic
from .machine import (
    STATE_VARS,
    BadSymbol,
    NotInImage,
    TMParseError,
    compile_exec,
    compile_next,
    format_tm,
    gamma_config,
    gamma_word,
    parse_tm,
    run_compiled,
    tm_run_direct,
)
from .selftest import run_suites
from .sgpoly import NotEssentiallyLinear, decompose_linear, degree, to_source

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def format_value(d: Dyadic) -> str:
    """``8`` for integers, otherwise ``m/2^n`` followed by the exact decimal."""
    if d.is_integer():
        return str(d)
    return f"{d} {d.decimal()}"


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _program(path: str):
    try:
        return parse_program(_read(path))
    except DSLError as exc:
        raise UsageError(f"{path}: {exc}") from None


# analyze -------------------------------------------------------------------------------


def _degree_rows(exprs, names) -> list[str]:
    rows = []
    for v in names:
        d = max((degree(e, v) for e in exprs), default=0)
        tag = " (essentially constant)" if d == 0 else " (essentially linear)" if d == 1 else ""
        rows.append(f"{v}:{d}{tag}")
    return rows


def analyze_decl(prog, name: str) -> tuple[list[str], bool]:
    d = prog.decl(name)
    if isinstance(d, LimitDecl):
        lines, ok = analyze_decl(prog, d.target)
        return [f"{name} = {d.kind}({d.target})", *lines], ok
    try:
        if isinstance(d, FnDecl):
            return [f"fn {name}", *_degree_rows([d.body], [p.name for p in d.params])], True
        lines = [f"llode {name}", *_degree_rows(d.rhs, d.vars)]
        try:
            dec = decompose_linear(d.rhs, d.vars)
        except NotEssentiallyLinear as exc:
            return [*lines, f"NotEssentiallyLinear at component {exc.component}"], False
    except TypeError:
        raise UsageError(f"{name}: analysis needs a body without calls") from None
    lines.append("essentially linear")
    for i, row in enumerate(dec.A):
        for j, a in enumerate(row):
            lines.append(f"A[{i}][{j}] = {to_source(a)}")
    for i, b in enumerate(dec.B):
        lines.append(f"B[{i}] = {to_source(b)}")
    return lines, True


def cmd_analyze(args) -> int:
    prog = _program(args.file)
    try:
        lines, ok = analyze_decl(prog, args.name)
    except DSLError as exc:
        raise UsageError(str(exc)) from None
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


# eval ------------------------------------------------------------------------------------


def cmd_eval(args) -> int:
    prog = _program(args.file)
    try:
        term = prog.term(args.name)
        vals = [parse_dyadic(a) for a in args.args]
    except (DSLError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    try:
        if args.prec is None:
            out = alg.eval_exact(term, vals)
        else:
            out = alg.eval_approx(term, vals, args.prec)
    except alg.SortMismatch as exc:
        raise UsageError(f"{args.name}: {exc}") from None
    except alg.LimitNodePresent:
        raise UsageError(f"{args.name} contains a limit node; pass --prec N") from None
    for v in out:
        print(format_value(v))
    return EXIT_OK


# machines --------------------------------------------------------------------------------


def _machine(path: str):
    try:
        return parse_tm(_read(path), Path(path).stem)
    except TMParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def compile_tm_program(spec) -> str:
    nxt = compile_next(spec)
    exe = compile_exec(spec, nxt)
    R = alg.R
    params = tuple(Param(n, R) for n in STATE_VARS)
    decls = [FnDecl(f"next_{n}", params, R, e) for n, e in zip(STATE_VARS, nxt)]
    decls.append(
        LLODEDecl(
            "exec",
            (Param("x", alg.N), *(Param(p, R) for p in exe.params)),
            R,
            exe.fvars,
            exe.init,
            "x",
            exe.rhs,
        )
    )
    header = "# compiled machine\n" + "".join(f"#   {line}\n" for line in format_tm(spec).splitlines())
    return format_program(decls, header)


def cmd_compile_tm(args) -> int:
    text = compile_tm_program(_machine(args.file))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_run_tm(args) -> int:
    spec = _machine(args.file)
    word = "" if args.word in ("", "-", "<empty>") else args.word
    try:
        gamma_word(word)
    except BadSymbol as exc:
        raise UsageError(f"BadSymbol: {exc}") from None
    try:
        enc, out = run_compiled(spec, word, args.steps)
    except NotInImage as exc:
        print(f"NotInImage: {exc}")
        return EXIT_FAIL
    shown = out or "<empty>"
    if not args.check:
        print(shown)
        return EXIT_OK
    direct = tm_run_direct(spec, word, args.steps)
    try:
        same = gamma_config(direct) == enc
    except NotInImage:
        same = False
    print(f"{shown} {'MATCH' if same else 'MISMATCH'}")
    return EXIT_OK if same else EXIT_FAIL


def cmd_selftest(args) -> int:
    results = run_suites(args.seed, corrupt=args.corrupt_fixture)
    print(f"selftest seed={args.seed}")
    for r in results:
        print(r.line())
    failed = sum(not r.ok for r in results)
    print(f"{len(results) - failed}/{len(results)} suites passed")
    return EXIT_OK if not failed else EXIT_FAIL


# entry point -------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lenode", description="Analyse and evaluate length-ODE programs and compiled Turing machines.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="degrees and linearity audit of a declaration")
    a.add_argument("file")
    a.add_argument("name")
    a.set_defaults(func=cmd_analyze)

    for name, required in (("eval", False), ("limit-eval", True)):
        e = sub.add_parser(name, help="evaluate a declaration" + (" to a precision" if required else ""))
        e.add_argument("file")
        e.add_argument("name")
        e.add_argument("args", nargs="*", help="arguments: integers, m/2^n or exact decimals")
        e.add_argument("--prec", type=int, required=required, help="output within 2^-PREC")
        e.set_defaults(func=cmd_eval)

    c = sub.add_parser("compile-tm", help="emit the compiled step and Exec as a program")
    c.add_argument("file")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compile_tm)

    r = sub.add_parser("run-tm", help="run a machine through its compiled Exec")
    r.add_argument("file")
    r.add_argument("word", help="input over {1,3}; '-' for the empty word")
    r.add_argument("--steps", type=int, default=1000, help="step budget (default 1000)")
    r.add_argument("--check", action="store_true", help="compare with the direct simulator")
    r.set_defaults(func=cmd_run_tm)

    s = sub.add_parser("selftest", help="run the property suites")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--corrupt-fixture", action="store_true", help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "prec", None) is not None and args.prec < 0:
        print("lenode: error: --prec must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "steps", 0) < 0:
        print("lenode: error: --steps must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lenode: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
