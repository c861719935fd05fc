"""Sorted function terms: base functions, composition, LLODE nodes and effective limits."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .dyadic import Dyadic, as_dyadic, bit_length, dy_round
from .llode import LLODESystem, solve_iterative
from .sgpoly import Add, Div2, Expr, IntConst, Mul, SgnBar, Sub, Var, sgbar

__all__ = [
    "Sort",
    "N",
    "Z",
    "Q",
    "R",
    "SortMismatch",
    "LimitNodePresent",
    "FunctionTerm",
    "Base",
    "Primitive",
    "Compose",
    "LLODETerm",
    "ELim",
    "ELimStar",
    "Signature",
    "CauchyReport",
    "proj",
    "typecheck",
    "eval_exact",
    "eval_approx",
    "eval_elimstar",
    "cauchy_check",
    "is_normal_form",
    "as_callable",
    "from_expr",
    "builtin_div2_mod2",
    "builtin_div",
    "builtin_B_iterate",
    "B_function",
]


class Sort(enum.IntEnum):
    N = 0
    Z = 1
    Q = 2
    R = 3

    def __str__(self) -> str:
        return self.name


N, Z, Q, R = Sort.N, Sort.Z, Sort.Q, Sort.R


class SortMismatch(TypeError):
    def __init__(self, message: str, position=None):
        self.position = position
        super().__init__(message if position is None else f"{message} (at {position})")


class LimitNodePresent(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    ins: tuple[Sort, ...]
    outs: tuple[Sort, ...]

    def __str__(self) -> str:
        def fmt(ss):
            return "()" if not ss else " x ".join(s.name for s in ss)

        return f"{fmt(self.ins)} -> {fmt(self.outs)}"


class FunctionTerm:
    """Base of all term nodes.  Nodes compare by identity."""

    __slots__ = ()


BASE_NAMES = ("zero", "one", "proj", "length", "add", "sub", "mul", "sgnbar", "half")


@dataclass(frozen=True, eq=False)
class Base(FunctionTerm):
    name: str
    sorts: tuple[Sort, ...] = ()
    index: int | None = None  # 1-based, projections only

    def __post_init__(self):
        if self.name not in BASE_NAMES:
            raise ValueError(f"unknown base function {self.name!r}")
        object.__setattr__(self, "sorts", tuple(Sort(s) for s in self.sorts))


def proj(i: int, sorts: Sequence[Sort]) -> Base:
    return Base("proj", tuple(sorts), i)


@dataclass(frozen=True, eq=False)
class Primitive(FunctionTerm):
    """A trusted function given by its semantics rather than a derivation."""

    name: str
    fn: Callable[..., Sequence[Dyadic]]
    ins: tuple[Sort, ...]
    outs: tuple[Sort, ...]


@dataclass(frozen=True, eq=False)
class Compose(FunctionTerm):
    outer: FunctionTerm
    inners: tuple[FunctionTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "inners", tuple(self.inners))


@dataclass(frozen=True, eq=False)
class LLODETerm(FunctionTerm):
    """``(x, y...) -> f(x, y)`` for a linear length-ODE.  The clock ``x`` comes first."""

    system: LLODESystem
    ins: tuple[Sort, ...]
    out: Sort = R
    h_term: FunctionTerm | tuple | None = None  # one term, or a tuple whose outputs concatenate

    def __post_init__(self):
        object.__setattr__(self, "ins", tuple(Sort(s) for s in self.ins))


@dataclass(frozen=True, eq=False)
class ELim(FunctionTerm):
    inner: FunctionTerm


@dataclass(frozen=True, eq=False)
class ELimStar(FunctionTerm):
    inner: FunctionTerm
    modulus: tuple[int, ...]  # coefficients of the witness polynomial, constant first

    def witness(self, n: int) -> int:
        return sum(c * n**k for k, c in enumerate(self.modulus))


_LIMITS = (ELim, ELimStar)


# typing ------------------------------------------------------------------------

_sig_cache: dict[int, tuple[FunctionTerm, Signature]] = {}


def _join(a: Sort, b: Sort) -> Sort:
    return max(a, b)


def typecheck(term: FunctionTerm, _path: str = "root") -> Signature:
    """Infer the signature of ``term`` or raise :class:`SortMismatch`."""
    hit = _sig_cache.get(id(term))
    if hit is not None and hit[0] is term:
        return hit[1]
    sig = _infer(term, _path)
    _sig_cache[id(term)] = (term, sig)
    return sig


def _infer(term: FunctionTerm, path: str) -> Signature:
    if isinstance(term, Base):
        s = term.sorts
        name = term.name
        if name in ("zero", "one"):
            return Signature(s, (N,))
        if name == "proj":
            if term.index is None or not 1 <= term.index <= len(s):
                raise SortMismatch(f"projection index {term.index} out of range for arity {len(s)}", path)
            return Signature(s, (s[term.index - 1],))
        if name == "length":
            if s != (N,):
                raise SortMismatch(f"length accepts N only, got {[x.name for x in s]}", path)
            return Signature(s, (N,))
        if name in ("add", "mul", "sub"):
            if len(s) != 2:
                raise SortMismatch(f"{name} is binary", path)
            out = _join(*s)
            if name == "sub":
                out = _join(out, Z)
            return Signature(s, (out,))
        if len(s) != 1:
            raise SortMismatch(f"{name} is unary", path)
        return Signature(s, (R,))
    if isinstance(term, Primitive):
        return Signature(tuple(term.ins), tuple(term.outs))
    if isinstance(term, Compose):
        outer = typecheck(term.outer, f"{path}.outer")
        if not term.inners:
            raise SortMismatch("composition needs at least one inner function", path)
        sigs = [typecheck(f, f"{path}.inners[{k}]") for k, f in enumerate(term.inners)]
        ins = sigs[0].ins
        for k, sg in enumerate(sigs):
            if sg.ins != ins:
                raise SortMismatch(
                    f"inner functions disagree on inputs: {sigs[0]} vs {sg}", f"{path}.inners[{k}]"
                )
        fed = [(k, o) for k, sg in enumerate(sigs) for o in sg.outs]
        if len(fed) != len(outer.ins):
            raise SortMismatch(f"outer function takes {len(outer.ins)} inputs, inner functions give {len(fed)}", path)
        for pos, ((k, got), want) in enumerate(zip(fed, outer.ins)):
            if got > want:
                raise SortMismatch(
                    f"inner output of sort {got.name} cannot feed outer input {pos} of sort {want.name}",
                    f"{path}.inners[{k}]",
                )
        return Signature(ins, outer.outs)
    if isinstance(term, LLODETerm):
        sys = term.system
        if len(term.ins) != 1 + len(sys.params):
            raise SortMismatch(f"LLODE takes a clock and {len(sys.params)} parameters", path)
        if term.ins[0] != N:
            raise SortMismatch("the LLODE clock must be of sort N", path)
        if term.h_term is not None:
            hterms = term.h_term if isinstance(term.h_term, tuple) else (term.h_term,)
            n_out = 0
            for k, ht in enumerate(hterms):
                hs = typecheck(ht, f"{path}.h[{k}]")
                n_out += len(hs.outs)
                if len(hs.ins) != len(term.ins) or any(a > b for a, b in zip(term.ins, hs.ins)):
                    raise SortMismatch("h must accept the LLODE inputs", f"{path}.h[{k}]")
            if n_out != len(sys.hvars):
                raise SortMismatch(f"h gives {n_out} outputs, system expects {len(sys.hvars)}", f"{path}.h")
        return Signature(term.ins, (term.out,) * sys.dim)
    if isinstance(term, _LIMITS):
        inner = typecheck(term.inner, f"{path}.inner")
        if not inner.ins or any(s != N for s in inner.ins):
            raise SortMismatch(f"limit operand must have signature N^(d+1) -> R^k, got {inner}", path)
        return Signature(inner.ins[:-1], (R,) * len(inner.outs))
    raise TypeError(f"not a function term: {term!r}")


def _check_args(sig: Signature, args: Sequence) -> list[Dyadic]:
    if len(args) != len(sig.ins):
        raise SortMismatch(f"expected {len(sig.ins)} arguments, got {len(args)}")
    out = []
    for k, (a, s) in enumerate(zip(args, sig.ins)):
        d = as_dyadic(a)
        if s <= Z and not d.is_integer():
            raise SortMismatch(f"argument {k} must be an integer (sort {s.name}), got {d}")
        if s == N and d < 0:
            raise SortMismatch(f"argument {k} must be a natural number, got {d}")
        out.append(d)
    return out


# exact evaluation --------------------------------------------------------------


def _contains_limit(term: FunctionTerm) -> bool:
    if isinstance(term, _LIMITS):
        return True
    if isinstance(term, Compose):
        return _contains_limit(term.outer) or any(_contains_limit(f) for f in term.inners)
    if isinstance(term, LLODETerm) and term.h_term is not None:
        hterms = term.h_term if isinstance(term.h_term, tuple) else (term.h_term,)
        return any(_contains_limit(t) for t in hterms)
    return False


def eval_exact(term: FunctionTerm, args: Sequence) -> list[Dyadic]:
    sig = typecheck(term)
    if _contains_limit(term):
        raise LimitNodePresent("term contains a limit node; use eval_approx")
    return _eval(term, _check_args(sig, args))


def _eval(term: FunctionTerm, args: list[Dyadic]) -> list[Dyadic]:
    if isinstance(term, Base):
        name = term.name
        if name == "zero":
            return [Dyadic(0)]
        if name == "one":
            return [Dyadic(1)]
        if name == "proj":
            return [args[term.index - 1]]
        if name == "length":
            return [Dyadic(bit_length(int(args[0])))]
        if name == "add":
            return [args[0] + args[1]]
        if name == "sub":
            return [args[0] - args[1]]
        if name == "mul":
            return [args[0] * args[1]]
        if name == "sgnbar":
            return [sgbar(args[0])]
        return [args[0].half()]
    if isinstance(term, Primitive):
        return [as_dyadic(v) for v in term.fn(*args)]
    if isinstance(term, Compose):
        fed = [v for f in term.inners for v in _eval(f, args)]
        return _eval(term.outer, fed)
    if isinstance(term, LLODETerm):
        return solve_iterative(term.system, int(args[0]), args[1:])
    raise LimitNodePresent(f"cannot evaluate {type(term).__name__} exactly")


def as_callable(term: FunctionTerm) -> Callable[[int, Sequence[Dyadic]], list[Dyadic]]:
    """Adapt a term with inputs ``(x, y...)`` to the ``h(x, y)`` calling convention."""
    typecheck(term)

    def h(x, y):
        return _eval(term, [Dyadic(x), *map(as_dyadic, y)])

    h.term = term  # type: ignore[attr-defined]
    return h


# limits ------------------------------------------------------------------------


def _inner_value(inner: FunctionTerm, args: list[Dyadic], point: int, n: int) -> list[Dyadic]:
    # value of the operand at (args, point), to within 2^-(n+1) when approximated
    full = [*args, Dyadic(point)]
    if _contains_limit(inner):
        return eval_approx(inner, full, n + 1)
    return _eval(inner, full)


def eval_approx(term: FunctionTerm, args: Sequence, n: int) -> list[Dyadic]:
    """Dyadics within ``2^-n`` of the value of ``term`` at ``args``.

    For ``ELim(f)`` the operand is evaluated at precision argument
    ``2^(n+1)`` and rounded to ``n + 1`` bits; the limit premise bounds the
    remaining distance by ``2^-(n+1)``.  Limit nodes are only supported at
    the root (normal form) or nested directly inside each other.
    """
    if n < 0:
        raise ValueError("precision must be non-negative")
    sig = typecheck(term)
    vals = _check_args(sig, args)
    if isinstance(term, ELim):
        inner = _inner_value(term.inner, vals, 1 << (n + 1), n)
        return [dy_round(v, n + 1) for v in inner]
    if isinstance(term, ELimStar):
        return eval_elimstar(term, vals, n)
    if _contains_limit(term):
        raise LimitNodePresent("limit nodes must be outermost; rewrite the term in normal form")
    return [dy_round(v, n) for v in _eval(term, vals)]


def eval_elimstar(term: ELimStar, args: Sequence, n: int) -> list[Dyadic]:
    """Evaluate the operand at ``2^p(n+1)`` and round to ``n + 1`` bits."""
    sig = typecheck(term)
    vals = _check_args(sig, args)
    point = 1 << term.witness(n + 1)
    inner = _inner_value(term.inner, vals, point, n)
    return [dy_round(v, n + 1) for v in inner]


@dataclass
class CauchyReport:
    checked: int
    violations: list[tuple[int, Dyadic]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def cauchy_check(term: FunctionTerm, args: Sequence, n_max: int) -> CauchyReport:
    """Check ``|f(m, 2^(k+1)) - f(m, 2^k)| <= 2^-k + 2^-(k+1)`` for ``k < n_max``.

    A necessary condition for the limit premise only.  For ``ELimStar`` the
    precision points are ``2^p(k)``.
    """
    if not isinstance(term, _LIMITS):
        raise TypeError("cauchy_check expects an ELim or ELimStar node")
    sig = typecheck(term)
    vals = _check_args(sig, args)
    if isinstance(term, ELimStar):
        point = lambda k: 1 << term.witness(k)  # noqa: E731
    else:
        point = lambda k: 1 << k  # noqa: E731
    report = CauchyReport(checked=n_max)
    prev = _eval_operand(term.inner, vals, point(0))
    for k in range(n_max):
        cur = _eval_operand(term.inner, vals, point(k + 1))
        gap = max(abs(a - b) for a, b in zip(cur, prev)) if cur else Dyadic(0)
        if gap > Dyadic(3, k + 1):
            report.violations.append((k, gap))
        prev = cur
    return report


def _eval_operand(inner, vals, point):
    if _contains_limit(inner):
        raise LimitNodePresent("cauchy_check needs a limit-free operand")
    return _eval(inner, [*vals, Dyadic(point)])


def is_normal_form(term: FunctionTerm) -> bool:
    """At most one limit node, and if present it is the root."""
    if isinstance(term, _LIMITS):
        return not _contains_limit(term.inner)
    return not _contains_limit(term)


# compiling expressions ---------------------------------------------------------


def _const_term(c: int, sorts: tuple[Sort, ...]) -> FunctionTerm:
    if c < 0:
        return Compose(Base("sub", (N, N)), (Base("zero", sorts), _const_term(-c, sorts)))
    if c == 0:
        return Base("zero", sorts)
    one = Base("one", sorts)
    t: FunctionTerm = one
    for bit in bin(c)[3:]:
        t = Compose(Base("add", (N, N)), (t, t))
        if bit == "1":
            t = Compose(Base("add", (N, N)), (t, one))
    return t


def from_expr(
    e: Expr,
    params: Sequence[str],
    sorts: Sequence[Sort],
    extra: Callable[[Expr, Callable[[Expr], FunctionTerm]], FunctionTerm] | None = None,
) -> FunctionTerm:
    """Compile an expression over ``params`` into compositions of base functions.

    Binary base functions are instantiated at the sorts of their operands so
    that the result typechecks with the tightest output sort.  ``extra``
    compiles node types unknown here (the DSL uses it for calls).
    """
    params = tuple(params)
    sorts = tuple(Sort(s) for s in sorts)
    index = {p: i for i, p in enumerate(params)}

    def out_sort(t):
        return typecheck(t).outs[0]

    def go(node: Expr) -> FunctionTerm:
        if isinstance(node, Var):
            if node.name not in index:
                raise KeyError(f"unknown variable {node.name!r}")
            return proj(index[node.name] + 1, sorts)
        if isinstance(node, IntConst):
            return _const_term(node.value, sorts)
        if isinstance(node, (Add, Sub, Mul)):
            a, b = go(node.left), go(node.right)
            name = {Add: "add", Sub: "sub", Mul: "mul"}[type(node)]
            return Compose(Base(name, (out_sort(a), out_sort(b))), (a, b))
        if isinstance(node, SgnBar):
            a = go(node.arg)
            return Compose(Base("sgnbar", (out_sort(a),)), (a,))
        if isinstance(node, Div2):
            a = go(node.arg)
            return Compose(Base("half", (out_sort(a),)), (a,))
        if extra is not None:
            return extra(node, go)
        raise TypeError(f"cannot compile {node!r}")

    return go(e)


# trusted primitives and clocks -------------------------------------------------


def builtin_div2_mod2() -> tuple[Primitive, Primitive]:
    """``n // 2`` and ``n % 2`` on naturals."""
    div2 = Primitive("div2", lambda n: [Dyadic(int(n) // 2)], (N,), (N,))
    mod2 = Primitive("mod2", lambda n: [Dyadic(int(n) % 2)], (N,), (N,))
    return div2, mod2


def builtin_div() -> Primitive:
    """Floor division ``n // m`` on naturals, ``m >= 1``."""

    def div(n, m):
        if int(m) < 1:
            raise ZeroDivisionError("div needs a positive divisor")
        return [Dyadic(int(n) // int(m))]

    return Primitive("div", div, (N, N), (N,))


def B_function() -> LLODETerm:
    """``B(x) = 2^(l(x)^2)`` as a linear length-ODE.

    With ``F(t) = 2^(t^2)`` one has ``F(t+1) = 2 * 4^t * F(t)``, and at the
    jump points ``x = 2^t - 1`` so ``4^t = (x+1)^2``.
    """
    xp1 = Add(Var("x"), IntConst(1))
    rhs = Mul(Sub(Mul(IntConst(2), Mul(xp1, xp1)), IntConst(1)), Var("B"))
    sys = LLODESystem(fvars=("B",), params=(), init=(IntConst(1),), rhs=(rhs,))
    return LLODETerm(sys, (N,), N)


def builtin_B_iterate(c: int) -> FunctionTerm:
    """``c``-fold composition ``B(B(...B(x)))``."""
    if c < 1:
        raise ValueError("c must be at least 1")
    B = B_function()
    t: FunctionTerm = B
    for _ in range(c - 1):
        t = Compose(B, (t,))
    return t
