"""sg-polynomial expressions: AST, degree calculus, linear collection, evaluation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from .dyadic import Dyadic, as_dyadic

__all__ = [
    "Expr",
    "Var",
    "IntConst",
    "Add",
    "Sub",
    "Mul",
    "SgnBar",
    "Div2",
    "LinearDecomposition",
    "NotEssentiallyLinear",
    "UnboundVariable",
    "RangesOverlap",
    "sgbar",
    "degree",
    "is_essentially_constant",
    "decompose_linear",
    "eval_expr",
    "build_if",
    "build_selector",
    "const",
    "free_vars",
    "to_source",
]

QUARTER = Dyadic(1, 2)
THREE_QUARTERS = Dyadic(3, 2)


class NotEssentiallyLinear(ValueError):
    def __init__(self, component: int, detail: str = ""):
        self.component = component
        msg = f"NotEssentiallyLinear at component {component}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class UnboundVariable(KeyError):
    pass


class RangesOverlap(ValueError):
    pass


class Expr:
    """Base class; use the operator overloads to build trees tersely."""

    __slots__ = ()

    def __add__(self, other):
        return Add(self, _lift(other))

    def __radd__(self, other):
        return Add(_lift(other), self)

    def __sub__(self, other):
        return Sub(self, _lift(other))

    def __rsub__(self, other):
        return Sub(_lift(other), self)

    def __mul__(self, other):
        return Mul(self, _lift(other))

    def __rmul__(self, other):
        return Mul(_lift(other), self)

    def __neg__(self):
        return Sub(IntConst(0), self)


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, eq=True)
class IntConst(Expr):
    value: int


@dataclass(frozen=True, eq=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class SgnBar(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True)
class Div2(Expr):
    arg: Expr


def _lift(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return const(x)


def const(value) -> Expr:
    """Expression for a dyadic constant: an integer under ``exponent`` halvings."""
    d = as_dyadic(value)
    e: Expr = IntConst(d.mantissa)
    for _ in range(d.exponent):
        e = Div2(e)
    return e


def sgbar(x: Dyadic) -> Dyadic:
    # 0 below 1/4, 1 above 3/4, affine ramp 2(x - 1/4) in between
    if x <= QUARTER:
        return Dyadic(0)
    if x >= THREE_QUARTERS:
        return Dyadic(1)
    return (x - QUARTER) * 2


# degree calculus ---------------------------------------------------------------


def degree(e: Expr, x: str) -> int:
    if isinstance(e, Var):
        return 1 if e.name == x else 0
    if isinstance(e, IntConst):
        return 0
    if isinstance(e, (Add, Sub)):
        return max(degree(e.left, x), degree(e.right, x))
    if isinstance(e, Mul):
        return degree(e.left, x) + degree(e.right, x)
    if isinstance(e, SgnBar):
        return 0
    if isinstance(e, Div2):
        return degree(e.arg, x)
    raise TypeError(f"not an sg-polynomial expression: {e!r}")


def is_essentially_constant(e: Expr, vars: Sequence[str]) -> bool:
    return all(degree(e, v) == 0 for v in vars)


def free_vars(e: Expr) -> set[str]:
    out: set[str] = set()
    stack = [e]
    seen: set[int] = set()
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Var):
            out.add(node.name)
        elif isinstance(node, (Add, Sub, Mul)):
            stack.extend((node.left, node.right))
        elif isinstance(node, (SgnBar, Div2)):
            stack.append(node.arg)
        elif not isinstance(node, IntConst):
            raise TypeError(f"not an sg-polynomial expression: {node!r}")
    return out


# linear collection -------------------------------------------------------------


@dataclass(frozen=True)
class LinearDecomposition:
    """``source[i] == sum_j A[i][j] * target_vars[j] + B[i]`` pointwise."""

    A: tuple[tuple[Expr, ...], ...]
    B: tuple[Expr, ...]
    target_vars: tuple[str, ...]


_ZERO = IntConst(0)
_ONE = IntConst(1)


def _is_zero(e: Expr) -> bool:
    return isinstance(e, IntConst) and e.value == 0


def _add(a: Expr, b: Expr) -> Expr:
    if _is_zero(a):
        return b
    if _is_zero(b):
        return a
    return Add(a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is_zero(b):
        return a
    return Sub(a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is_zero(a) or _is_zero(b):
        return _ZERO
    if a == _ONE:
        return b
    if b == _ONE:
        return a
    return Mul(a, b)


# linear form: (coefficient per target, constant part)
_Form = tuple[dict, Expr]


def _collect(e: Expr, targets: frozenset, comp: int) -> _Form:
    if isinstance(e, Var):
        if e.name in targets:
            return {e.name: _ONE}, _ZERO
        return {}, e
    if isinstance(e, IntConst):
        return {}, e
    if isinstance(e, SgnBar):
        return {}, e
    if isinstance(e, Div2):
        coeffs, c = _collect(e.arg, targets, comp)
        return {k: Div2(v) for k, v in coeffs.items()}, (c if _is_zero(c) else Div2(c))
    if isinstance(e, (Add, Sub)):
        lc, lk = _collect(e.left, targets, comp)
        rc, rk = _collect(e.right, targets, comp)
        comb = _add if isinstance(e, Add) else _sub
        coeffs = dict(lc)
        for k, v in rc.items():
            coeffs[k] = comb(coeffs.get(k, _ZERO), v)
        return coeffs, comb(lk, rk)
    if isinstance(e, Mul):
        lc, lk = _collect(e.left, targets, comp)
        rc, rk = _collect(e.right, targets, comp)
        if lc and rc:
            raise NotEssentiallyLinear(comp, "product of two terms depending on the targets")
        if lc:
            # right factor is essentially constant: it is its own constant part
            return {k: _mul(v, rk) for k, v in lc.items()}, _mul(lk, rk)
        if rc:
            return {k: _mul(lk, v) for k, v in rc.items()}, _mul(lk, rk)
        return {}, e
    raise TypeError(f"not an sg-polynomial expression: {e!r}")


def decompose_linear(exprs: Sequence[Expr], target_vars: Sequence[str]) -> LinearDecomposition:
    """Collect each component into ``A . f + B`` with ``A``, ``B`` free of ``f``.

    Collection is syntactic: products are distributed left to right and any
    product of two target-dependent factors is rejected, even when it would
    cancel semantically.
    """
    targets = tuple(target_vars)
    tset = frozenset(targets)
    rows, consts = [], []
    for i, e in enumerate(exprs):
        coeffs, c = _collect(e, tset, i)
        rows.append(tuple(coeffs.get(v, _ZERO) for v in targets))
        consts.append(c)
    return LinearDecomposition(tuple(rows), tuple(consts), targets)


# evaluation --------------------------------------------------------------------


def eval_expr(e: Expr, env: Mapping[str, Dyadic], _cache: dict | None = None) -> Dyadic:
    """Exact value of ``e`` under ``env``.

    Shared subtrees are evaluated once per call.
    """
    cache = {} if _cache is None else _cache
    return _eval(e, env, cache)


def _eval(e: Expr, env, cache) -> Dyadic:
    key = id(e)
    hit = cache.get(key)
    if hit is not None:
        return hit
    t = type(e)
    if t is Var:
        try:
            v = as_dyadic(env[e.name])
        except KeyError:
            raise UnboundVariable(e.name) from None
    elif t is IntConst:
        v = Dyadic(e.value)
    elif t is Add:
        v = _eval(e.left, env, cache) + _eval(e.right, env, cache)
    elif t is Sub:
        v = _eval(e.left, env, cache) - _eval(e.right, env, cache)
    elif t is Mul:
        v = _eval(e.left, env, cache) * _eval(e.right, env, cache)
    elif t is SgnBar:
        v = sgbar(_eval(e.arg, env, cache))
    elif t is Div2:
        v = _eval(e.arg, env, cache).half()
    else:
        raise TypeError(f"not an sg-polynomial expression: {e!r}")
    cache[key] = v
    return v


# macros ------------------------------------------------------------------------


def build_if(b: Expr, t: Expr, e: Expr) -> Expr:
    """``sgb(b) * t + (1 - sgb(b)) * e``."""
    s = SgnBar(b)
    return Add(Mul(s, t), Mul(Sub(_ONE, s), e))


def build_selector(
    sentinels: Sequence[int],
    widths: Sequence[Dyadic] | Dyadic | int = 1,
    arg: Expr | None = None,
) -> Expr:
    """Piecewise-constant selector built from shifted sg-bars.

    The result equals ``s`` exactly on every closed range ``[s, s + w]``.  A
    sentinel 0 with width 0 is prepended when missing so that the selector
    vanishes at 0.  Each jump ``sgb(x - c)`` is placed at ``c = s - 1`` when
    that clears the previous range, otherwise at the lowest admissible point.
    """
    x = Var("x") if arg is None else arg
    if isinstance(widths, (int, Dyadic)):
        widths = [widths] * len(sentinels)
    pairs = [(int(s), as_dyadic(w)) for s, w in zip(sentinels, widths, strict=True)]
    if not any(s == 0 for s, _ in pairs):
        pairs.append((0, Dyadic(0)))
    pairs.sort()
    if pairs[0][0] < 0:
        raise RangesOverlap("sentinels must be non-negative")
    out: Expr = IntConst(pairs[0][0]) if pairs[0][0] else _ZERO
    for (s0, w0), (s1, _) in zip(pairs, pairs[1:]):
        lo = s0 + w0 - QUARTER  # sgb(x - c) == 0 for x <= s0 + w0
        hi = Dyadic(s1) - THREE_QUARTERS  # sgb(x - c) == 1 for x >= s1
        if lo > hi:
            raise RangesOverlap(f"ranges of {s0} and {s1} are too close")
        c = Dyadic(s1 - 1)
        if c < lo:
            c = lo
        out = _add(out, _mul(IntConst(s1 - s0), SgnBar(_sub(x, const(c)))))
    return out


# printing ----------------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2}


def to_source(e: Expr) -> str:
    """Render in the DSL surface syntax; parsing the text gives back ``e``."""
    if isinstance(e, Var):
        return e.name
    if isinstance(e, IntConst):
        return f"(-{-e.value})" if e.value < 0 else str(e.value)
    if isinstance(e, SgnBar):
        return f"sgb({to_source(e.arg)})"
    if isinstance(e, Div2):
        return f"half({to_source(e.arg)})"
    if isinstance(e, (Add, Sub, Mul)):
        op = {Add: "+", Sub: "-", Mul: "*"}[type(e)]
        p = _PREC[type(e)]
        left = to_source(e.left)
        if type(e.left) in _PREC and _PREC[type(e.left)] < p:
            left = f"({left})"
        right = to_source(e.right)
        # operators associate to the left, so equal precedence on the right needs parens
        if type(e.right) in _PREC and _PREC[type(e.right)] <= p:
            right = f"({right})"
        return f"{left} {op} {right}"
    to_src = getattr(e, "to_source", None)
    if to_src is not None:
        return to_src()
    raise TypeError(f"cannot render {e!r}")


ExprLike = Union[Expr, int, Dyadic]
