"""Bridges between integers, {1,3}-words and dyadic values.

``word_of`` writes a dyadic as symbol pairs: integer bits as ``11``/``13``
(bit 0/1) then fraction bits as ``31``/``33``.  ``encode`` reads such a word
back with a linear length-ODE; ``decode`` turns a natural number into a
word of ``1``/``3`` digits, one per bit, most significant first.
"""

from __future__ import annotations

from typing import Sequence

from .algebra import (
    N,
    Base,
    Compose,
    LLODETerm,
    as_callable,
    builtin_B_iterate,
    builtin_div,
    builtin_div2_mod2,
    eval_exact,
    proj,
)
from .dyadic import Dyadic, as_dyadic, bit_length
from .llode import LLODESystem, solve_iterative
from .machine import (
    NotInImage,
    TMSpec,
    compile_exec,
    compile_next,
    eval_next,
    EncodedConfig,
    exec_compiled,
    gamma_word_inv,
)
from .sgpoly import Div2, IntConst, SgnBar, Var, build_selector

__all__ = [
    "OddLengthWord",
    "BudgetExceeded",
    "NotInImage",
    "word_of",
    "encode_system",
    "encode",
    "decode_system",
    "decode",
    "decode_term",
    "decode_pair",
    "decode_pair_system",
    "direct_pipeline",
]


class OddLengthWord(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


def word_of(d) -> str:
    """Pair encoding of a non-negative dyadic; ``0`` gives the empty word."""
    d = as_dyadic(d)
    if d < 0:
        raise ValueError("only non-negative dyadics have a pair encoding")
    ip = d.floor()
    frac = d - ip
    out = ["13" if b == "1" else "11" for b in (bin(ip)[2:] if ip else "")]
    if frac:
        bits = bin(frac.mantissa)[2:].rjust(frac.exponent, "0")
        out += ["33" if b == "1" else "31" for b in bits]
    return "".join(out)


# encode ----------------------------------------------------------------------------


def encode_system() -> LLODESystem:
    """Pair-consuming transition over ``(r, a, w, fr)``.

    ``r`` is the unread part of the word; ``a`` accumulates integer bits;
    ``fr`` accumulates fraction bits with positional weight ``w``.  Each
    stage reads the leading pair through a selector on ``16 r``.
    """
    r, a, w, fr = (Var(n) for n in ("r", "a", "w", "fr"))
    v = build_selector([5, 7, 13, 15], 1, IntConst(16) * r)
    g4, g6, g12, g14 = (SgnBar(v - IntConst(c)) for c in (4, 6, 12, 14))
    ind5, ind7, ind13, ind15 = g4 - g6, g6 - g12, g12 - g14, g14
    hw = Div2(w)
    rhs = (
        IntConst(15) * r - v,
        (ind5 + ind7) * a + ind7,
        IntConst(0) - (ind13 + ind15) * hw,
        ind15 * hw,
    )
    init = (Var("dbar"), IntConst(0), IntConst(1), IntConst(0))
    return LLODESystem(fvars=("r", "a", "w", "fr"), params=("dbar",), init=init, rhs=rhs)


_ENCODE = None


def _encode_sys() -> LLODESystem:
    global _ENCODE
    if _ENCODE is None:
        _ENCODE = encode_system()
    return _ENCODE


def encode(x_clock: int, dbar) -> Dyadic:
    """The dyadic written by the pair word ``dbar`` encodes, reading ``l(x_clock)`` pairs."""
    dbar = as_dyadic(dbar)
    word = gamma_word_inv(dbar)
    if len(word) % 2:
        raise OddLengthWord(f"pair encodings have even length, got {len(word)}")
    r, a, _w, fr = solve_iterative(_encode_sys(), x_clock, [dbar])
    if r:
        raise ValueError(f"clock {x_clock} reads {bit_length(x_clock)} pairs, the word has {len(word) // 2}")
    return a + fr


# decode ----------------------------------------------------------------------------


def _bit_term(k: int, arity: int):
    # (x, y1..yk) -> mod2(y_k div (x + 1)); at x = 2^t - 1 this is bit t of y_k
    _div2, mod2 = builtin_div2_mod2()
    div = builtin_div()
    sorts = (N,) * arity
    xp1 = Compose(Base("add", (N, N)), (proj(1, sorts), Base("one", sorts)))
    return Compose(mod2, (Compose(div, (proj(k + 1, sorts), xp1)),))


def _bits_h(count: int):
    terms = [_bit_term(k, count + 1) for k in range(1, count + 1)]
    calls = [as_callable(t) for t in terms]

    def h(x, y):
        return [c(x, y)[0] for c in calls]

    return h, terms


def decode_system() -> LLODESystem:
    l = Var("l")
    h0 = Var("h0")
    h, _ = _bits_h(1)
    digit = IntConst(2) * h0 + IntConst(1)
    rhs = (Div2(Div2(l + digit)) - l,)
    return LLODESystem(("l",), ("n",), (IntConst(0),), rhs, h=h, hvars=("h0",))


def decode_term() -> LLODETerm:
    """``decode`` as a function term of signature ``N x N -> R``: clock, then ``n``."""
    _, terms = _bits_h(1)
    return LLODETerm(decode_system(), (N, N), h_term=terms[0])


def decode(n: int) -> Dyadic:
    if n < 0:
        raise ValueError("decode is defined on naturals")
    return solve_iterative(decode_system(), n, [n])[0]


def decode_pair_system() -> LLODESystem:
    l = Var("l")
    h, _ = _bits_h(2)
    first = IntConst(2) * Var("h0") + IntConst(1)
    second = IntConst(2) * Var("h1") + IntConst(1)
    pushed = IntConst(4) * first + second + l
    rhs = (Div2(Div2(Div2(Div2(pushed)))) - l,)
    return LLODESystem(("l",), ("n", "m"), (IntConst(0),), rhs, h=h, hvars=("h0", "h1"))


def decode_pair(n: int, m: int) -> Dyadic:
    """Interleaved word: for each bit position, the bit of ``n`` then the bit of ``m``."""
    if n < 0 or m < 0:
        raise ValueError("decode_pair is defined on naturals")
    return solve_iterative(decode_pair_system(), max(n, m), [n, m])[0]


# pipeline --------------------------------------------------------------------------


def direct_pipeline(machine: TMSpec, c: int, m, n: int, exec_system: LLODESystem | None = None) -> Dyadic:
    """``Encode(Exec(B^(c)(max(m, n)), Decode(n, m)))`` for a one-argument machine.

    The machine starts on the interleaved word of ``(n, m)`` and must leave a
    pair encoding under its head.  Raises :class:`BudgetExceeded` when the
    configuration reached at the clock is not halted.
    """
    if isinstance(m, Sequence):
        if len(m) != 1:
            raise ValueError("only one integer argument is supported")
        (m,) = m
    m, n = int(m), int(n)
    clock = int(eval_exact(builtin_B_iterate(c), [max(m, n)])[0])
    nxt = compile_next(machine)
    system = compile_exec(machine, nxt) if exec_system is None else exec_system
    start = EncodedConfig(Dyadic(machine.initial), Dyadic(0), decode_pair(n, m))
    final = exec_compiled(system, clock, start)
    if eval_next(nxt, final) != final:
        raise BudgetExceeded(f"machine still running after {bit_length(clock) - 1} steps")
    return encode(clock, final.rbar)

