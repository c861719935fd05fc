"""Linear length-ODEs: ``f(0, y) = g(y)`` and ``df/dl(x) = u(f, h(x, y), x, y)``.

The derivative along the length ``l(x)`` means
``f(x+1) = f(x) + (l(x+1) - l(x)) * u(f(x), h(x, y), x, y)``.  The length
only jumps when ``x + 1`` is a power of two, so with ``t = l(x)`` the solution
is ``F(t)`` where ``F(0) = g(y)`` and ``F(t+1) = F(t) + u(F(t), h(2^t - 1, y),
2^t - 1, y)``.  Every solver below walks ``t``, never ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .calculus import closed_form_solution
from .dyadic import Dyadic, as_dyadic, bit_length, dy_round
from .sgpoly import (
    Expr,
    LinearDecomposition,
    decompose_linear,
    eval_expr,
    free_vars,
)

__all__ = [
    "LLODESystem",
    "PrecisionSchedule",
    "ScheduleTooShort",
    "solve_iterative",
    "solve_explicit",
    "plan_precision",
    "solve_rounded",
    "growth_report",
    "component_trace",
    "format_trace",
    "sup_int_norm",
]

HFunc = Callable[[int, Sequence[Dyadic]], Sequence[Dyadic]]


class ScheduleTooShort(ValueError):
    pass


@dataclass(frozen=True)
class LLODESystem:
    """A linear length-ODE over named variables.

    ``init`` is written over ``params``; ``rhs`` over ``fvars``, ``params``,
    the clock ``xvar`` and the outputs ``hvars`` of ``h``.  ``h`` is called as
    ``h(x, y)`` and must return ``len(hvars)`` values.
    """

    fvars: tuple[str, ...]
    params: tuple[str, ...]
    init: tuple[Expr, ...]
    rhs: tuple[Expr, ...]
    xvar: str = "x"
    h: HFunc | None = None
    hvars: tuple[str, ...] = ()
    decomposition: LinearDecomposition = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("fvars", "params", "init", "rhs", "hvars"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if len(self.init) != len(self.fvars) or len(self.rhs) != len(self.fvars):
            raise ValueError("init and rhs must have one entry per component")
        names = (*self.fvars, *self.params, self.xvar, *self.hvars)
        if len(set(names)) != len(names):
            raise ValueError(f"variable names must be distinct: {names}")
        if self.hvars and self.h is None:
            raise ValueError("h outputs are referenced but no h is given")
        for i, e in enumerate(self.init):
            extra = free_vars(e) - set(self.params)
            if extra:
                raise ValueError(f"init[{i}] uses unknown variables {sorted(extra)}")
        allowed = set(names)
        for i, e in enumerate(self.rhs):
            extra = free_vars(e) - allowed
            if extra:
                raise ValueError(f"rhs[{i}] uses unknown variables {sorted(extra)}")
        # raises NotEssentiallyLinear when the schema does not apply
        object.__setattr__(self, "decomposition", decompose_linear(self.rhs, self.fvars))

    @property
    def dim(self) -> int:
        return len(self.fvars)

    @property
    def autonomous(self) -> bool:
        """True when the right-hand side ignores the clock and ``h``."""
        used = set().union(*(free_vars(e) for e in self.rhs)) if self.rhs else set()
        return self.xvar not in used and not (used & set(self.hvars))

    # helpers shared by the solvers -------------------------------------------

    def initial(self, y: Sequence) -> list[Dyadic]:
        env = self._param_env(y)
        return [eval_expr(e, env) for e in self.init]

    def _param_env(self, y: Sequence) -> dict:
        if len(y) != len(self.params):
            raise ValueError(f"expected {len(self.params)} parameters, got {len(y)}")
        return {p: as_dyadic(v) for p, v in zip(self.params, y)}

    def _env(self, F: Sequence[Dyadic], t: int, y: Sequence, penv: dict) -> dict:
        x = (1 << t) - 1
        env = dict(penv)
        env[self.xvar] = Dyadic(x)
        if self.h is not None:
            hv = list(self.h(x, [penv[p] for p in self.params]))
            if len(hv) != len(self.hvars):
                raise ValueError(f"h returned {len(hv)} values, expected {len(self.hvars)}")
            env.update({n: as_dyadic(v) for n, v in zip(self.hvars, hv)})
        env.update(zip(self.fvars, F))
        return env

    def step(self, F: Sequence[Dyadic], t: int, y: Sequence, penv: dict | None = None) -> list[Dyadic]:
        """``F(t+1)`` from ``F(t)``."""
        penv = self._param_env(y) if penv is None else penv
        env = self._env(F, t, y, penv)
        cache: dict = {}
        return [f + eval_expr(u, env, cache) for f, u in zip(F, self.rhs)]


def _stages(x: int) -> int:
    if x < 0:
        raise ValueError("x must be a natural number")
    return bit_length(x)


def solve_iterative(sys: LLODESystem, x: int, y: Sequence = ()) -> list[Dyadic]:
    """Exact ``f(x, y)``, taking one update per length jump (``l(x)`` updates).

    For autonomous systems the walk stops at the first fixed point, which
    cannot change the result.
    """
    stages = _stages(x)
    penv = sys._param_env(y)
    F = sys.initial(y)
    auto = sys.autonomous
    for t in range(stages):
        nxt = sys.step(F, t, y, penv)
        if auto and nxt == F:
            break
        F = nxt
    return F


def _coefficients(sys: LLODESystem, F, t, y, penv):
    env = sys._env(F, t, y, penv)
    cache: dict = {}
    dec = sys.decomposition
    A = np.empty((sys.dim, sys.dim), dtype=object)
    for i, row in enumerate(dec.A):
        for j, a in enumerate(row):
            A[i, j] = eval_expr(a, env, cache)
    B = np.array([eval_expr(b, env, cache) for b in dec.B], dtype=object)
    return A, B


def solve_explicit(sys: LLODESystem, x: int, y: Sequence = ()) -> list[Dyadic]:
    """``f(x, y)`` from the sum-of-ordered-products solution formula.

    The coefficients ``A``, ``B`` may depend on the trajectory (through
    sg-bar), so ``F(t)`` is obtained for each ``t`` from the closed form over
    coefficients evaluated on the earlier closed-form values.
    """
    stages = _stages(x)
    penv = sys._param_env(y)
    G = np.array(sys.initial(y), dtype=object)
    coeffs: list[tuple] = []
    F = G
    for t in range(stages):
        coeffs.append(_coefficients(sys, list(F), t, y, penv))
        F = closed_form_solution(
            lambda u, _p: coeffs[u][0],
            lambda u, _p: coeffs[u][1],
            G,
            t + 1,
        )
    return list(F)


# precision-bounded evaluation ----------------------------------------------------


@dataclass(frozen=True)
class PrecisionSchedule:
    alpha: int
    p_h: Callable
    levels: tuple[int, ...]

    @property
    def stages(self) -> int:
        return len(self.levels) - 1


def plan_precision(alpha: int, p_h: Callable, Z: Sequence, Y, l: int, n: int) -> PrecisionSchedule:
    """Per-stage precisions ``p(i) = alpha * p(i+1) + p_h(Z_i, l(i), Y)``, ``p(l) = n``.

    Closed form: ``p(i) = alpha^(l-i) n + sum_{k=i}^{l-1} alpha^(k-i) p_h(Z_k, l(k), Y)``.
    """
    if alpha < 1 or l < 0 or n < 0:
        raise ValueError("need alpha >= 1, l >= 0, n >= 0")
    if len(Z) < l:
        raise ValueError(f"need {l} stage bounds, got {len(Z)}")
    levels = [0] * (l + 1)
    levels[l] = n
    for i in range(l - 1, -1, -1):
        levels[i] = alpha * levels[i + 1] + int(p_h(Z[i], bit_length(i), Y))
    return PrecisionSchedule(alpha, p_h, tuple(levels))


def solve_rounded(sys: LLODESystem, x: int, y: Sequence, n: int, sched: PrecisionSchedule) -> list[Dyadic]:
    """Staged approximation: stage ``i`` is kept to ``p(i)`` bits.

    Stage ``i + 1`` is the exact update of the rounded stage ``i``, rounded to
    ``p(i+1) + 1`` bits.  The result is within ``2^-n`` of the exact value
    when ``alpha * m + p_h`` input bits give ``m + 1`` output bits for every
    stage map, i.e. the modulus leaves one bit for the stage rounding.
    """
    stages = _stages(x)
    if sched.stages < stages:
        raise ScheduleTooShort(f"schedule covers {sched.stages} stages, need {stages}")
    if sched.levels[-1] != n:
        raise ValueError("schedule was planned for a different output precision")
    penv = sys._param_env(y)
    p = sched.levels[sched.stages - stages :]
    F = [dy_round(v, p[0]) for v in sys.initial(y)]
    for t in range(stages):
        F = [dy_round(v, p[t + 1] + 1) for v in sys.step(F, t, y, penv)]
    return F


# growth monitoring ---------------------------------------------------------------


def sup_int_norm(values: Sequence[Dyadic]) -> int:
    """Largest ``ceil(|v|)`` over the components (0 for an empty vector)."""
    return max((abs(as_dyadic(v)).ceil() for v in values), default=0)


def _trajectory(sys: LLODESystem, x: int, y: Sequence) -> list[list[Dyadic]]:
    penv = sys._param_env(y)
    F = sys.initial(y)
    out = [F]
    for t in range(_stages(x)):
        F = sys.step(F, t, y, penv)
        out.append(F)
    return out


def growth_report(sys: LLODESystem, x: int, y: Sequence = ()) -> list[int]:
    """``l(|||F(t)|||)`` for ``t = 0 .. l(x)``."""
    return [bit_length(sup_int_norm(F)) for F in _trajectory(sys, x, y)]


def component_trace(sys: LLODESystem, x: int, y: Sequence = ()) -> list[list[int]]:
    """Per-component ``l(ceil|F_i(t)|)`` for every stage."""
    return [[bit_length(abs(v).ceil()) for v in F] for F in _trajectory(sys, x, y)]


def format_trace(trace: Sequence) -> str:
    lines = []
    for t, row in enumerate(trace):
        vec = row if isinstance(row, (list, tuple)) else [row]
        lines.append(f"step {t}: " + " ".join(str(v) for v in vec))
    return "\n".join(lines) + "\n"
