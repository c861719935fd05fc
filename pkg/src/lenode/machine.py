"""Three-symbol Turing machines and their compilation to essentially linear dynamics.

Tapes hold the symbols 0 (blank), 1 and 3.  A word ``w0 w1 ...`` is encoded
as the base-4 fraction ``0.w0 w1 ...``; a configuration ``(q, l, r)`` with the
head on ``r0`` and ``l0`` the cell just left of it becomes the triple
``(q, gamma(l), gamma(r))``.  Moves are ``L``, ``R`` and ``S`` (stay); halting
is modelled as a stay-in-place self-loop, so a halted run is a fixed point.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple

from .dyadic import Dyadic, as_dyadic
from .llode import LLODESystem, solve_iterative
from .sgpoly import (
    Div2,
    Expr,
    IntConst,
    SgnBar,
    Var,
    build_if,
    build_selector,
    eval_expr,
)

__all__ = [
    "SYMBOLS",
    "MOVES",
    "BadSymbol",
    "NotInImage",
    "TMParseError",
    "TMSpec",
    "Configuration",
    "EncodedConfig",
    "parse_tm",
    "format_tm",
    "load_fixture",
    "FIXTURES",
    "gamma_word",
    "gamma_word_inv",
    "gamma_config",
    "is_encodable",
    "tm_step_direct",
    "tm_run_direct",
    "compile_next",
    "eval_next",
    "compile_exec",
    "exec_compiled",
    "run_compiled",
    "enumerate_configs",
    "sweep_next",
    "STATE_VARS",
]

SYMBOLS = (0, 1, 3)
MOVES = ("L", "R", "S")
STATE_VARS = ("q", "lbar", "rbar")


class BadSymbol(ValueError):
    pass


class NotInImage(ValueError):
    pass


class TMParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class TMSpec:
    n_states: int
    initial: int = 0
    delta: Mapping[tuple[int, int], tuple[int, int, str]] = field(default_factory=dict)
    accepting: frozenset = frozenset()
    name: str = ""

    def __post_init__(self):
        if self.n_states < 1:
            raise ValueError("a machine needs at least one state")
        if not 0 <= self.initial < self.n_states:
            raise ValueError(f"initial state {self.initial} out of range")
        for (q, s), (q2, x, m) in self.delta.items():
            if not (0 <= q < self.n_states and 0 <= q2 < self.n_states):
                raise ValueError(f"state out of range in transition {(q, s)} -> {(q2, x, m)}")
            if s not in SYMBOLS or x not in SYMBOLS:
                raise BadSymbol(f"symbols must be in {SYMBOLS}: {(q, s)} -> {(q2, x, m)}")
            if m not in MOVES:
                raise ValueError(f"bad move {m!r}")
        object.__setattr__(self, "delta", dict(self.delta))
        object.__setattr__(self, "accepting", frozenset(self.accepting))

    def transition(self, q: int, s: int) -> tuple[int, int, str]:
        # missing entries halt: rewrite the symbol and stay
        return self.delta.get((q, s), (q, s, "S"))

    @property
    def states(self) -> range:
        return range(self.n_states)


class Configuration(NamedTuple):
    state: int
    left: str = ""
    right: str = ""

    @classmethod
    def make(cls, state: int, left: str = "", right: str = "") -> "Configuration":
        return cls(state, left.rstrip("0"), right.rstrip("0"))

    def __str__(self) -> str:
        return f"(q{self.state}, {self.left or '<empty>'}, {self.right or '<empty>'})"


class EncodedConfig(NamedTuple):
    q: Dyadic
    lbar: Dyadic
    rbar: Dyadic


# encodings ---------------------------------------------------------------------


def _symbols(w) -> list[int]:
    out = []
    for ch in str(w) if not isinstance(w, (list, tuple)) else w:
        try:
            s = int(ch)
        except ValueError:
            raise BadSymbol(f"not a tape symbol: {ch!r}") from None
        out.append(s)
    return out


def gamma_word(w) -> Dyadic:
    """``w0/4 + w1/16 + ...`` for a word over {1, 3}."""
    acc = Dyadic(0)
    for s in reversed(_symbols(w)):
        if s not in (1, 3):
            raise BadSymbol(f"words are over {{1, 3}}, got {s}")
        acc = (acc + s).scale2(-2)
    return acc


def gamma_word_inv(d) -> str:
    """The {1, 3}-word encoded by ``d``; raises :class:`NotInImage` otherwise."""
    d = as_dyadic(d)
    if d < 0 or d >= 1:
        raise NotInImage(f"{d} is outside [0, 1)")
    digits = []
    while d:
        d = d * 4
        k = d.floor()
        if k not in (1, 3):
            raise NotInImage(f"base-4 digit {k} at position {len(digits)}")
        digits.append(str(k))
        d = d - k
    return "".join(digits)


def is_encodable(c: Configuration) -> bool:
    return all(ch in "13" for ch in c.left + c.right)


def gamma_config(c: Configuration) -> EncodedConfig:
    if not is_encodable(c):
        raise NotInImage(f"configuration {c} has a blank inside a tape word")
    return EncodedConfig(Dyadic(c.state), gamma_word(c.left), gamma_word(c.right))


# direct simulation ---------------------------------------------------------------


def tm_step_direct(spec: TMSpec, c: Configuration) -> Configuration:
    q, left, right = c
    v = int(right[0]) if right else 0
    q2, x, m = spec.transition(q, v)
    rest = right[1:]
    if m == "R":
        return Configuration.make(q2, str(x) + left, rest)
    if m == "L":
        l0 = left[0] if left else "0"
        return Configuration.make(q2, left[1:], l0 + str(x) + rest)
    return Configuration.make(q2, left, str(x) + rest)


def tm_run_direct(spec: TMSpec, w="", T: int = 0) -> Configuration:
    """``T`` steps from ``(initial, empty, w)``."""
    if T < 0:
        raise ValueError("T must be non-negative")
    _symbols(w)
    c = Configuration.make(spec.initial, "", str(w))
    for _ in range(T):
        nxt = tm_step_direct(spec, c)
        if nxt == c:
            break
        c = nxt
    return c


# compilation ---------------------------------------------------------------------


def _read_selector(arg: Expr) -> Expr:
    # the symbol under a cursor: 4*gamma(w) lies in [s, s+1] for leading symbol s
    return build_selector([0, 1, 3], [0, 1, 1], arg)


def compile_next(spec: TMSpec) -> tuple[Expr, Expr, Expr]:
    """One machine step as three sg-polynomials over ``(q, lbar, rbar)``.

    The read symbol and the symbol left of the head are recovered with
    exact selectors on ``4 rbar`` and ``4 lbar``; each (state, symbol) case
    is an affine update, and the cases are merged with nested ``If``.
    """
    q, l, r = (Var(n) for n in STATE_VARS)
    four_r = IntConst(4) * r
    four_l = IntConst(4) * l
    v_sel = _read_selector(four_r)
    u_sel = _read_selector(four_l)

    def quarter(e: Expr) -> Expr:
        return Div2(Div2(e))

    def case(state: int, v: int) -> tuple[Expr, Expr, Expr]:
        q2, x, m = spec.transition(state, v)
        rest = four_r - IntConst(v)  # gamma of the right word after its head symbol
        if m == "R":
            nl = quarter(l + IntConst(x))
            nr = rest
        elif m == "L":
            nl = four_l - u_sel
            nr = quarter(u_sel + quarter(IntConst(x) + rest))
        else:
            nl = l
            nr = r + quarter(IntConst(x - v))
        return IntConst(q2), nl, nr

    def by_symbol(state: int) -> tuple[Expr, ...]:
        w0, w1, w3 = (case(state, v) for v in SYMBOLS)
        return tuple(
            build_if(v_sel - IntConst(2), a3, build_if(v_sel, a1, a0)) for a0, a1, a3 in zip(w0, w1, w3)
        )

    out = by_symbol(0)
    for k in range(1, spec.n_states):
        vk = by_symbol(k)
        out = tuple(build_if(q - IntConst(k - 1), a, b) for a, b in zip(vk, out))
    return out  # type: ignore[return-value]


def eval_next(exprs, enc: EncodedConfig) -> EncodedConfig:
    env = dict(zip(STATE_VARS, enc))
    cache: dict = {}
    return EncodedConfig(*(eval_expr(e, env, cache) for e in exprs))


def compile_exec(spec: TMSpec, next_exprs=None) -> LLODESystem:
    """Exec as a linear length-ODE over ``(q, lbar, rbar, started)``.

    The length clock makes its first jump at ``x = 1``; the flag ``started``
    turns that jump into a no-op so that ``Exec(2^t, C) = Next^t(C)`` and
    ``Exec(0, C) = C``.  The right-hand side does not mention the clock.
    """
    nxt = compile_next(spec) if next_exprs is None else next_exprs
    s = Var("started")
    gate = SgnBar(s)
    rhs = [gate * (e - Var(n)) for e, n in zip(nxt, STATE_VARS)]
    rhs.append(IntConst(1) - s)
    params = tuple(f"{n}0" for n in STATE_VARS)
    init = [Var(p) for p in params] + [IntConst(0)]
    return LLODESystem(fvars=(*STATE_VARS, "started"), params=params, init=tuple(init), rhs=tuple(rhs))


def exec_compiled(system: LLODESystem, x: int, enc: EncodedConfig) -> EncodedConfig:
    return EncodedConfig(*solve_iterative(system, x, list(enc))[:3])


def run_compiled(spec: TMSpec, w="", T: int = 0, system: LLODESystem | None = None):
    """Run ``T`` steps through the compiled Exec; return the encoding and the right word.

    The word is recovered from ``rbar`` and raises :class:`NotInImage` when
    the machine left a blank inside it.
    """
    if T < 0:
        raise ValueError("T must be non-negative")
    sys = compile_exec(spec) if system is None else system
    start = EncodedConfig(Dyadic(spec.initial), Dyadic(0), gamma_word(w))
    enc = exec_compiled(sys, 1 << T, start)
    return enc, gamma_word_inv(enc.rbar)


# sweeps ------------------------------------------------------------------------------


def _words(max_len: int) -> Iterator[str]:
    for n in range(max_len + 1):
        for t in itertools.product("13", repeat=n):
            yield "".join(t)


def enumerate_configs(spec: TMSpec, max_len: int = 4) -> Iterator[Configuration]:
    words = list(_words(max_len))
    for q in spec.states:
        for left in words:
            for right in words:
                yield Configuration(q, left, right)


@dataclass
class SweepReport:
    checked: int = 0
    skipped: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def sweep_next(spec: TMSpec, max_len: int = 4, exprs=None) -> SweepReport:
    """Compare compiled and direct steps on every encodable configuration.

    Successors that put a blank inside a tape word have no encoding; they
    are counted in ``skipped``.
    """
    exprs = compile_next(spec) if exprs is None else exprs
    rep = SweepReport()
    for c in enumerate_configs(spec, max_len):
        nxt = tm_step_direct(spec, c)
        if not is_encodable(nxt):
            rep.skipped += 1
            continue
        rep.checked += 1
        got = eval_next(exprs, gamma_config(c))
        if got != gamma_config(nxt):
            rep.mismatches.append((c, nxt, got))
    return rep


# text format ---------------------------------------------------------------------

_LINE = re.compile(r"^(\d+)\s+(\d)\s*->\s*(\d+)\s+(\d)\s+([LRS])$")


def parse_tm(text: str, name: str = "") -> TMSpec:
    """Parse ``states k`` / ``initial q`` / ``accept ...`` / ``q s -> q' s' M`` lines."""
    n_states = None
    initial = 0
    accepting: set[int] = set()
    delta: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "states":
                if len(rest) != 1:
                    raise ValueError("expected 'states <count>'")
                n_states = int(rest[0])
                continue
            if head == "initial":
                if len(rest) != 1:
                    raise ValueError("expected 'initial <state>'")
                initial = int(rest[0])
                continue
            if head == "accept":
                accepting.update(int(t) for t in rest)
                continue
        except ValueError as exc:
            raise TMParseError(str(exc), lineno) from None
        m = _LINE.match(line)
        if not m:
            raise TMParseError(f"malformed transition {line!r}", lineno)
        q, s, q2, x = (int(g) for g in m.groups()[:4])
        if s not in SYMBOLS or x not in SYMBOLS:
            raise TMParseError(f"symbols must be 0, 1 or 3 in {line!r}", lineno)
        if (q, s) in delta:
            raise TMParseError(f"duplicate transition for state {q} symbol {s}", lineno)
        if n_states is not None and max(q, q2) >= n_states:
            raise TMParseError(f"state out of range in {line!r}", lineno)
        delta[(q, s)] = (q2, x, m.group(5))
    if n_states is None:
        raise TMParseError("missing 'states' header")
    try:
        return TMSpec(n_states, initial, delta, frozenset(accepting), name)
    except ValueError as exc:
        raise TMParseError(str(exc)) from None


def format_tm(spec: TMSpec) -> str:
    lines = [f"states {spec.n_states}", f"initial {spec.initial}"]
    if spec.accepting:
        lines.append("accept " + " ".join(map(str, sorted(spec.accepting))))
    for (q, s), (q2, x, m) in sorted(spec.delta.items()):
        lines.append(f"{q} {s} -> {q2} {x} {m}")
    return "\n".join(lines) + "\n"


# fixtures ----------------------------------------------------------------------------

FIXTURES: dict[str, str] = {
    "identity": """\
# halts at once, leaving the input in place
states 1
initial 0
accept 0
""",
    "successor": """\
# binary successor, least significant bit first, 1 codes bit 0 and 3 codes bit 1
states 5
initial 0
accept 4
0 1 -> 3 3 R   # low bit 0: set it
0 0 -> 3 3 R   # empty input is 0
0 3 -> 1 3 R   # low bit 1: keep 3 as a marker and carry
1 3 -> 1 1 R
1 1 -> 2 3 L
1 0 -> 2 3 L
2 1 -> 2 1 L   # walk back to the marker
2 3 -> 3 1 R
3 0 -> 4 0 L   # step back onto the first cell
3 1 -> 4 1 L
3 3 -> 4 3 L
""",
    "scanner": """\
# scans right toggling symbols in state 1, halts left of the first blank
states 3
initial 0
accept 2
0 1 -> 1 1 R
0 3 -> 0 3 R
0 0 -> 2 0 L
1 1 -> 0 3 R
1 3 -> 1 1 R
1 0 -> 2 0 L
""",
    "half": """\
# erases its input and writes the pair encoding of 1/2
states 3
initial 0
accept 2
0 1 -> 0 0 R
0 3 -> 0 0 R
0 0 -> 1 3 R
1 0 -> 2 3 L
""",
    "pair_identity": """\
# input: pairs (bit of n, bit of m); output: integer pairs for m
states 7
initial 0
accept 6
0 0 -> 6 0 S
0 1 -> 1 3 R   # mark the first cell
0 3 -> 1 3 R
1 1 -> 2 1 R
1 3 -> 2 3 R
2 1 -> 1 1 R   # first symbol of a pair becomes 1
2 3 -> 1 1 R
2 0 -> 3 0 L
3 1 -> 4 1 L   # walk back two cells at a time
3 3 -> 4 3 L
4 1 -> 3 1 L
4 3 -> 5 1 R   # the marker: clear it
5 1 -> 6 1 L
5 3 -> 6 3 L
""",
    "halving": """\
# like pair_identity, but the last pair becomes a fraction pair: m/2
states 9
initial 0
accept 8
0 0 -> 8 0 S
0 1 -> 1 3 R
0 3 -> 1 3 R
1 1 -> 2 1 R
1 3 -> 2 3 R
2 1 -> 1 1 R
2 3 -> 1 1 R
2 0 -> 3 0 L
3 1 -> 4 1 L   # last pair
3 3 -> 4 3 L
4 1 -> 5 3 L   # mark it as a fraction pair
4 3 -> 7 3 R   # a single pair: the marker itself is the fraction pair
5 1 -> 6 1 L
5 3 -> 6 3 L
6 1 -> 5 1 L
6 3 -> 7 1 R
7 1 -> 8 1 L
7 3 -> 8 3 L
""",
}


def load_fixture(name: str) -> TMSpec:
    try:
        return parse_tm(FIXTURES[name], name)
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; have {sorted(FIXTURES)}") from None


def _all_fixtures() -> Iterable[TMSpec]:
    return (load_fixture(n) for n in FIXTURES)
