"""A small declaration language for function terms.

    fn P(x:R, y:R, z:R) -> R = x * sgb((x*x - z) * y) + y*y*y
    fn third = elim(S)
    fn zero_lim = elimstar(G; p = [1, 1])
    llode S(x:N) -> R^2 {
        vars: s, w;
        init: 0, 1;
        wrt len(x): half(half(w)), half(half(w)) - w
    }

An ``llode`` takes its clock first; ``h: G1, G2`` names call-free helper
functions of the same inputs whose values appear in the right-hand side as
``h0, h1, ...``.  Function bodies may call earlier or later declarations,
``name(args)`` or ``name[i](args)`` for one output of a vector function.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import algebra as alg
from .algebra import Sort
from .dyadic import Dyadic
from .llode import LLODESystem
from .sgpoly import (
    Add,
    Div2,
    Expr,
    IntConst,
    Mul,
    SgnBar,
    Sub,
    Var,
    build_if,
    const,
    to_source,
)

__all__ = [
    "DSLError",
    "Call",
    "Param",
    "FnDecl",
    "LimitDecl",
    "LLODEDecl",
    "Program",
    "parse_program",
    "parse_expr",
    "format_decl",
    "format_program",
]


class DSLError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True, eq=True)
class Call(Expr):
    name: str
    args: tuple
    index: int | None = None

    def to_source(self) -> str:
        idx = "" if self.index is None else f"[{self.index}]"
        return f"{self.name}{idx}({', '.join(to_source(a) for a in self.args)})"


# declarations ------------------------------------------------------------------------


@dataclass(frozen=True)
class Param:
    name: str
    sort: Sort


@dataclass
class FnDecl:
    name: str
    params: tuple[Param, ...]
    out: Sort
    body: Expr
    line: int = 0


@dataclass
class LimitDecl:
    name: str
    kind: str  # "elim" or "elimstar"
    target: str
    coeffs: tuple[int, ...] = ()
    line: int = 0


@dataclass
class LLODEDecl:
    name: str
    params: tuple[Param, ...]
    out: Sort
    vars: tuple[str, ...]
    init: tuple[Expr, ...]
    clock: str
    rhs: tuple[Expr, ...]
    h: tuple[str, ...] = ()
    line: int = 0


Decl = FnDecl | LimitDecl | LLODEDecl


# lexer ---------------------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<num>\d+\.\d+|\d+)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>->|[-+*/^(),;:=\[\]{}])"
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int


def _lex(text: str) -> list[_Tok]:
    toks = []
    line = 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise DSLError(f"unexpected character {text[pos]!r}", line)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line))
        pos = m.end()
    # report a premature end on the line of the last real token
    toks.append(_Tok("eof", "", toks[-1].line if toks else line))
    return toks


# parser --------------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str):
        raise DSLError(msg, self.tok.line)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        if self.tok.kind != "id":
            self.error(f"expected a name, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t.text

    def integer(self) -> int:
        neg = self.accept("-")
        if self.tok.kind != "num" or "." in self.tok.text:
            self.error(f"expected an integer, found {self.tok.text!r}")
        v = int(self.tok.text)
        self.i += 1
        return -v if neg else v

    # declarations

    def program(self) -> list:
        decls = []
        while self.tok.kind != "eof":
            if self.at("fn"):
                decls.append(self.fn_decl())
            elif self.at("llode"):
                decls.append(self.llode_decl())
            else:
                self.error(f"expected 'fn' or 'llode', found {self.tok.text!r}")
        return decls

    def sort(self) -> Sort:
        name = self.ident()
        try:
            return Sort[name]
        except KeyError:
            self.error(f"unknown sort {name!r}")

    def out_sort(self) -> tuple[Sort, int]:
        s = self.sort()
        k = 1
        if self.accept("^"):
            k = self.integer()
        return s, k

    def params(self) -> tuple[Param, ...]:
        self.expect("(")
        out = []
        if not self.at(")"):
            while True:
                name = self.ident()
                self.expect(":")
                out.append(Param(name, self.sort()))
                if not self.accept(","):
                    break
        self.expect(")")
        return tuple(out)

    def fn_decl(self):
        line = self.expect("fn").line
        name = self.ident()
        if self.accept("="):
            kind = self.ident()
            if kind not in ("elim", "elimstar"):
                self.error(f"expected elim or elimstar, found {kind!r}")
            self.expect("(")
            target = self.ident()
            coeffs: tuple[int, ...] = ()
            if kind == "elimstar":
                self.expect(";")
                if self.ident() != "p":
                    self.error("expected 'p = [...]'")
                self.expect("=")
                self.expect("[")
                cs = [self.integer()]
                while self.accept(","):
                    cs.append(self.integer())
                self.expect("]")
                coeffs = tuple(cs)
            self.expect(")")
            return LimitDecl(name, kind, target, coeffs, line)
        params = self.params()
        self.expect("->")
        out, k = self.out_sort()
        if k != 1:
            self.error("functions defined by an expression have one output")
        self.expect("=")
        return FnDecl(name, params, out, self.expr(), line)

    def llode_decl(self):
        line = self.expect("llode").line
        name = self.ident()
        params = self.params()
        self.expect("->")
        out, k = self.out_sort()
        self.expect("{")
        self.expect("vars")
        self.expect(":")
        fvars = [self.ident()]
        while self.accept(","):
            fvars.append(self.ident())
        self.expect(";")
        self.expect("init")
        self.expect(":")
        init = self.expr_list()
        self.expect(";")
        self.expect("wrt")
        self.expect("len")
        self.expect("(")
        clock = self.ident()
        self.expect(")")
        self.expect(":")
        rhs = self.expr_list()
        h: list[str] = []
        if self.accept(";") and self.accept("h"):
            self.expect(":")
            h.append(self.ident())
            while self.accept(","):
                h.append(self.ident())
            self.accept(";")
        self.expect("}")
        if k != len(fvars):
            raise DSLError(f"{name}: declared {k} outputs but {len(fvars)} variables", line)
        return LLODEDecl(name, params, out, tuple(fvars), tuple(init), clock, tuple(rhs), tuple(h), line)

    def expr_list(self) -> list[Expr]:
        out = [self.expr()]
        while self.accept(","):
            out.append(self.expr())
        return out

    # expressions

    def expr(self) -> Expr:
        e = self.term()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.accept("*"):
            e = Mul(e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.accept("-"):
            e = self.unary()
            if isinstance(e, IntConst):
                return IntConst(-e.value)
            return Sub(IntConst(0), e)
        return self.atom()

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            if "." in t.text:
                try:
                    return const(Dyadic.from_fraction(Fraction(t.text)))
                except ValueError:
                    raise DSLError(f"{t.text} is not an exact dyadic literal", t.line) from None
            v = int(t.text)
            if self.at("/"):
                self.i += 1
                base = self.integer()
                if base != 2:
                    self.error("literal denominators are written 2^n")
                self.expect("^")
                return const(Dyadic(v, self.integer()))
            return IntConst(v)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if t.kind != "id":
            self.error(f"unexpected {t.text or 'end of input'!r}")
        name = self.ident()
        if name in ("sgb", "half"):
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return SgnBar(arg) if name == "sgb" else Div2(arg)
        if name == "if":
            self.expect("(")
            b = self.expr()
            self.expect(";")
            a = self.expr()
            self.expect(";")
            c = self.expr()
            self.expect(")")
            return build_if(b, a, c)
        index = None
        if self.accept("["):
            index = self.integer()
            self.expect("]")
            if not self.at("("):
                self.error("an indexed name must be called")
        if self.accept("("):
            args = [] if self.at(")") else self.expr_list()
            self.expect(")")
            return Call(name, tuple(args), index)
        return Var(name)


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r} after expression")
    return e


def parse_program(text: str) -> "Program":
    return Program(_Parser(text).program())


# resolution ----------------------------------------------------------------------------


def _has_call(e: Expr) -> bool:
    if isinstance(e, Call):
        return True
    if isinstance(e, (Add, Sub, Mul)):
        return _has_call(e.left) or _has_call(e.right)
    if isinstance(e, (SgnBar, Div2)):
        return _has_call(e.arg)
    return False


@dataclass
class Program:
    """Ordered declarations; terms are built on first use."""

    decls: list
    _terms: dict = field(default_factory=dict, repr=False)
    _busy: set = field(default_factory=set, repr=False)

    def __post_init__(self):
        seen: dict[str, int] = {}
        for d in self.decls:
            if d.name in seen:
                raise DSLError(f"{d.name} is already declared on line {seen[d.name]}", d.line)
            seen[d.name] = d.line
        self.by_name = {d.name: d for d in self.decls}

    def names(self) -> list[str]:
        return [d.name for d in self.decls]

    def decl(self, name: str):
        try:
            return self.by_name[name]
        except KeyError:
            raise DSLError(f"unknown name {name!r}") from None

    def term(self, name: str) -> alg.FunctionTerm:
        if name in self._terms:
            return self._terms[name]
        d = self.decl(name)
        if name in self._busy:
            raise DSLError(f"{name} refers to itself", d.line)
        self._busy.add(name)
        try:
            t = self._build(d)
            alg.typecheck(t)
        except alg.SortMismatch as exc:
            raise DSLError(f"{name}: {exc}", d.line) from None
        finally:
            self._busy.discard(name)
        self._terms[name] = t
        return t

    def check(self) -> None:
        for n in self.names():
            self.term(n)

    def _build(self, d) -> alg.FunctionTerm:
        if isinstance(d, LimitDecl):
            inner = self.term(d.target)
            return alg.ELim(inner) if d.kind == "elim" else alg.ELimStar(inner, d.coeffs)
        if isinstance(d, FnDecl):
            return self._fn_term(d)
        return self._llode_term(d)

    def _fn_term(self, d: FnDecl) -> alg.FunctionTerm:
        names = [p.name for p in d.params]
        sorts = [p.sort for p in d.params]
        if len(set(names)) != len(names):
            raise DSLError(f"{d.name}: repeated parameter", d.line)

        def call(node, go):
            if not isinstance(node, Call):
                raise DSLError(f"{d.name}: cannot compile {node!r}", d.line)
            target = self.term(node.name)
            sig = alg.typecheck(target)
            if len(node.args) != len(sig.ins):
                raise DSLError(f"{node.name} takes {len(sig.ins)} arguments, got {len(node.args)}", d.line)
            inner: alg.FunctionTerm = alg.Compose(target, tuple(go(a) for a in node.args))
            if node.index is not None:
                if not 0 <= node.index < len(sig.outs):
                    raise DSLError(f"{node.name} has no output {node.index}", d.line)
                inner = alg.Compose(alg.proj(node.index + 1, sig.outs), (inner,))
            elif len(sig.outs) != 1:
                raise DSLError(f"{node.name} has {len(sig.outs)} outputs; pick one with {node.name}[i]", d.line)
            return inner

        try:
            t = alg.from_expr(d.body, names, sorts, extra=call)
        except KeyError as exc:
            raise DSLError(f"{d.name}: {exc.args[0]}", d.line) from None
        got = alg.typecheck(t).outs[0]
        if got > d.out:
            raise DSLError(f"{d.name}: body has sort {got.name}, declared {d.out.name}", d.line)
        return t

    def llode_system(self, d: LLODEDecl) -> tuple[LLODESystem, tuple]:
        if not d.params or d.params[0].name != d.clock:
            raise DSLError(f"{d.name}: the first input must be the clock {d.clock}", d.line)
        if d.params[0].sort != Sort.N:
            raise DSLError(f"{d.name}: the clock must have sort N", d.line)
        for e in (*d.init, *d.rhs):
            if _has_call(e):
                raise DSLError(f"{d.name}: calls are not allowed in an llode; pass values through h", d.line)
        if len(d.init) != len(d.vars) or len(d.rhs) != len(d.vars):
            raise DSLError(f"{d.name}: need one init and one rhs per variable", d.line)
        hterms = tuple(self.term(n) for n in d.h)
        hvars: list[str] = []
        calls = []
        for n, ht in zip(d.h, hterms):
            sig = alg.typecheck(ht)
            if len(sig.ins) != len(d.params):
                raise DSLError(f"{d.name}: helper {n} must take the llode inputs", d.line)
            calls.append(alg.as_callable(ht))
            hvars.extend(f"h{len(hvars) + k}" for k in range(len(sig.outs)))

        def h(x, y):
            return [v for c in calls for v in c(x, y)]

        try:
            sys = LLODESystem(
                fvars=d.vars,
                params=tuple(p.name for p in d.params[1:]),
                init=d.init,
                rhs=d.rhs,
                xvar=d.clock,
                h=h if calls else None,
                hvars=tuple(hvars),
            )
        except ValueError as exc:
            raise DSLError(f"{d.name}: {exc}", d.line) from None
        return sys, hterms

    def _llode_term(self, d: LLODEDecl) -> alg.FunctionTerm:
        sys, hterms = self.llode_system(d)
        h_term = None if not hterms else (hterms[0] if len(hterms) == 1 else hterms)
        return alg.LLODETerm(sys, tuple(p.sort for p in d.params), d.out, h_term)


# printing -------------------------------------------------------------------------------


def _params_src(params: Sequence[Param]) -> str:
    return ", ".join(f"{p.name}:{p.sort.name}" for p in params)


def format_decl(d) -> str:
    if isinstance(d, LimitDecl):
        if d.kind == "elim":
            return f"fn {d.name} = elim({d.target})"
        return f"fn {d.name} = elimstar({d.target}; p = [{', '.join(map(str, d.coeffs))}])"
    if isinstance(d, FnDecl):
        return f"fn {d.name}({_params_src(d.params)}) -> {d.out.name} = {to_source(d.body)}"
    out = d.out.name + (f"^{len(d.vars)}" if len(d.vars) != 1 else "")
    lines = [
        f"llode {d.name}({_params_src(d.params)}) -> {out} {{",
        f"    vars: {', '.join(d.vars)};",
        f"    init: {', '.join(to_source(e) for e in d.init)};",
        f"    wrt len({d.clock}):",
    ]
    body = [f"        {to_source(e)}" for e in d.rhs]
    lines.append(",\n".join(body) + (";" if d.h else ""))
    if d.h:
        lines.append(f"    h: {', '.join(d.h)}")
    lines.append("}")
    return "\n".join(lines)


def format_program(decls: Sequence, header: str = "") -> str:
    parts = [header.rstrip("\n")] if header else []
    parts += [format_decl(d) for d in decls]
    return "\n\n".join(parts) + "\n"
