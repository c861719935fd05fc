"""Property suites shared by the ``selftest`` command and the test-suite.

Every suite takes a ``random.Random`` and returns a :class:`SuiteResult`
whose ``detail`` depends only on the seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import algebra as alg
from .calculus import delta, discrete_integral, falling_exp, falling_power
from .codec import decode, encode, word_of
from .dyadic import Dyadic, bit_length, dy_round
from .llode import LLODESystem, plan_precision, solve_explicit, solve_iterative, solve_rounded
from .machine import (
    Configuration,
    TMSpec,
    compile_exec,
    compile_next,
    exec_compiled,
    gamma_config,
    gamma_word,
    gamma_word_inv,
    load_fixture,
    sweep_next,
    tm_run_direct,
)
from .sgpoly import Div2, IntConst, SgnBar, Var, const, decompose_linear, eval_expr

__all__ = [
    "SuiteResult",
    "SUITES",
    "run_suites",
    "random_dyadic",
    "random_system",
    "third_system",
    "rounding_schedule",
    "stage_bounds",
    "stage_modulus",
    "corrupt_machine",
]


@dataclass(frozen=True)
class SuiteResult:
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{self.name}: {'PASS' if self.ok else 'FAIL'} ({self.detail})"


# generators --------------------------------------------------------------------------


def random_dyadic(rng: random.Random, mant_bits: int = 8, max_exp: int = 4, signed: bool = True) -> Dyadic:
    lim = (1 << mant_bits) - 1
    m = rng.randint(-lim if signed else 0, lim)
    return Dyadic(m, rng.randint(0, max_exp))


def random_system(rng: random.Random, dim: int | None = None, sgbar: bool = True, n_params: int = 1) -> LLODESystem:
    """A random essentially linear system over ``f0..``, parameters ``y0..`` and clock ``x``.

    Coefficients are dyadic constants (exponent at most 4) possibly scaled by
    the clock, a parameter, or an sg-bar of an affine form in the state.
    """
    dim = rng.randint(1, 3) if dim is None else dim
    fvars = [f"f{i}" for i in range(dim)]
    params = [f"y{i}" for i in range(n_params)]

    def rc():
        return const(Dyadic(rng.randint(-6, 6), rng.randint(0, 4)))

    def affine():
        e = rc()
        for v in fvars + params:
            if rng.random() < 0.5:
                e = e + rc() * Var(v)
        return e

    def coeff():
        k = rng.randint(0, 3 if sgbar else 2)
        if k == 0:
            return rc()
        if k == 1:
            return rc() * Var("x")
        if k == 2 and params:
            return rc() * Var(rng.choice(params))
        if k == 3:
            return rc() * SgnBar(affine())
        return rc()

    rhs = []
    for _ in range(dim):
        e = coeff()
        for v in fvars:
            if rng.random() < 0.7:
                e = e + coeff() * Var(v)
        rhs.append(e)
    init = [rc() + (rc() * Var(params[0]) if params else IntConst(0)) for _ in range(dim)]
    return LLODESystem(tuple(fvars), tuple(params), tuple(init), tuple(rhs))


def third_system() -> LLODESystem:
    """``s(2^k) = sum_{j=1}^{k+1} 4^-j``, converging to 1/3 at rate ``4^-(k+1)``."""
    w = Var("w")
    q = Div2(Div2(w))
    return LLODESystem(("s", "w"), (), (IntConst(0), IntConst(1)), (q, q - w))


def third_term() -> alg.ELim:
    sys = third_system()
    f = alg.LLODETerm(sys, (alg.N,), alg.R)
    return alg.ELim(alg.Compose(alg.proj(1, (alg.R, alg.R)), (f,)))


def decaying_term(witness=(1, 1)) -> alg.ELimStar:
    """Operand with ``g(2^k) = 2 * 2^-k``: its limit is 0."""
    w = Var("w")
    sys = LLODESystem(("w",), (), (IntConst(4),), (IntConst(0) - Div2(w),))
    return alg.ELimStar(alg.LLODETerm(sys, (alg.N,), alg.R), tuple(witness))


def stage_bounds(sys: LLODESystem, x: int, y) -> list[Dyadic]:
    """``|||I + A(t)|||`` (largest absolute row sum) along the exact trajectory."""
    penv = sys._param_env(y)
    dec = sys.decomposition
    Z = []
    F = sys.initial(y)
    for t in range(bit_length(x)):
        env = sys._env(F, t, y, penv)
        rows = [
            sum((abs(eval_expr(a, env) + (1 if i == j else 0)) for j, a in enumerate(row)), Dyadic(0))
            for i, row in enumerate(dec.A)
        ]
        Z.append(max(rows))
        F = sys.step(F, t, y, penv)
    return Z


def stage_modulus(z, _lt, _y) -> int:
    """Bits per stage: ``k + 1`` with ``2^k >= z``."""
    return bit_length(max(z.ceil() - 1, 0)) + 1


def rounding_schedule(sys: LLODESystem, x: int, y, n: int):
    """Plan precisions for ``solve_rounded`` on an sg-bar-free system.

    The stage map ``F -> (I + A) F + B`` multiplies errors by at most
    ``Z = |||I + A|||``; with ``2^k >= Z`` a budget of ``k + 1`` bits per
    stage absorbs both the growth and the stage rounding, so ``alpha = 1``.
    """
    return plan_precision(1, stage_modulus, stage_bounds(sys, x, y), y, bit_length(x), n)


# suites ------------------------------------------------------------------------------


def _suite_dyadic(rng):
    bad = 0
    for _ in range(200):
        a, b = random_dyadic(rng, 12, 8), random_dyadic(rng, 12, 8)
        fa, fb = a.to_fraction(), b.to_fraction()
        if (a + b).to_fraction() != fa + fb or (a - b).to_fraction() != fa - fb or (a * b).to_fraction() != fa * fb:
            bad += 1
        n = rng.randint(0, 8)
        if abs(dy_round(a, n).to_fraction() - fa) > Fraction(1, 2 ** (n + 1)):
            bad += 1
    return bad == 0, f"200 pairs, {bad} failures"


def _suite_closed_form(rng):
    bad = 0
    for _ in range(25):
        sys = random_system(rng)
        x, y = rng.randint(0, 31), [random_dyadic(rng, 4, 2)]
        if solve_explicit(sys, x, y) != solve_iterative(sys, x, y):
            bad += 1
    return bad == 0, f"25 systems, {bad} mismatches"


def _suite_calculus(rng):
    bad = 0
    for _ in range(40):
        cs = [rng.randint(-9, 9) for _ in range(4)]
        F = lambda x, _p, cs=cs: Dyadic(sum(c * x**k for k, c in enumerate(cs)))  # noqa: E731
        a, b = rng.randint(-10, 10), rng.randint(-10, 10)
        if discrete_integral(lambda x, p: delta(F, x, p), a, b) != F(b, ()) - F(a, ()):
            bad += 1
        m, x = rng.randint(1, 6), rng.randint(-6, 12)
        if falling_power(x + 1, m) - falling_power(x, m) != m * falling_power(x, m - 1):
            bad += 1
        U = lambda t, _p, cs=cs: Dyadic(cs[0] * t + cs[1] * t * t)  # noqa: E731
        x = rng.randint(0, 8)
        lhs = falling_exp(U, x + 1) - falling_exp(U, x)
        if lhs != delta(U, x) * falling_exp(U, x):
            bad += 1
    return bad == 0, f"120 identities, {bad} failures"


def _suite_machines(rng, corrupt=False):
    checked = bad = 0
    for name in ("identity", "successor", "scanner"):
        spec = load_fixture(name)
        oracle = corrupt_machine(spec) if corrupt and name == "successor" else spec
        rep = sweep_next(oracle, 2, exprs=compile_next(spec))
        checked += rep.checked
        bad += len(rep.mismatches)
        sys = compile_exec(spec)
        for _ in range(4):
            w = "".join(rng.choice("13") for _ in range(rng.randint(0, 4)))
            t = rng.randint(0, 5)
            c = Configuration(spec.initial, "", w)
            checked += 1
            if exec_compiled(sys, 1 << t, gamma_config(c)) != gamma_config(tm_run_direct(oracle, w, t)):
                bad += 1
    return bad == 0, f"{checked} configurations, {bad} mismatches"


def _suite_codec(rng):
    bad = 0
    for _ in range(30):
        d = abs(random_dyadic(rng, 8, 6))
        w = word_of(d)
        if encode(1 << (len(w) // 2), gamma_word(w)) != d:
            bad += 1
    seen = set()
    for n in range(256):
        v = decode(n)
        gamma_word_inv(v)
        seen.add(v)
    bad += 256 - len(seen)
    if encode(1 << 4, gamma_word("13111333")) != Dyadic(11, 1):
        bad += 1
    return bad == 0, f"30 round trips, 256 decodes, {bad} failures"


def _suite_limits(_rng):
    third = third_term()
    bad = 0
    for n in range(0, 25):
        v = alg.eval_approx(third, [], n)[0]
        if abs(v.to_fraction() - Fraction(1, 3)) > Fraction(1, 2**n):
            bad += 1
    if not alg.cauchy_check(third, [], 20).ok:
        bad += 1
    decay = decaying_term()
    for n in range(0, 25):
        if abs(alg.eval_elimstar(decay, [], n)[0]) > Dyadic(1, n):
            bad += 1
    return bad == 0, f"50 precisions, {bad} failures"


def _suite_rounded(rng):
    bad = 0
    for _ in range(10):
        sys = random_system(rng, sgbar=False)
        x, y = rng.randint(1, 31), [random_dyadic(rng, 4, 2)]
        exact = solve_iterative(sys, x, y)
        n = rng.randint(0, 30)
        sched = rounding_schedule(sys, x, y, n)
        got = solve_rounded(sys, x, y, n, sched)
        if any(abs(a - b) > Dyadic(1, n) for a, b in zip(got, exact)):
            bad += 1
    return bad == 0, f"10 systems, {bad} failures"


def _suite_sorts(_rng):
    R, N = alg.R, alg.N
    f = alg.Compose(alg.Base("half", (N,)), (alg.proj(1, (N,)),))  # N -> R
    g = alg.Base("sgnbar", (R,))  # R -> R
    h = alg.Base("length", (N,))  # N -> N
    ok = alg.typecheck(alg.Compose(g, (f,))) == alg.Signature((N,), (R,))
    try:
        alg.typecheck(alg.Compose(h, (f,)))
        ok = False
    except alg.SortMismatch:
        pass
    d = decompose_linear([Var("a") * SgnBar(Var("a"))], ["a"])
    ok = ok and len(d.A) == 1
    return ok, "2 compositions"


SUITES: dict[str, Callable] = {
    "dyadic": _suite_dyadic,
    "closed-form": _suite_closed_form,
    "calculus": _suite_calculus,
    "machines": _suite_machines,
    "codec": _suite_codec,
    "limits": _suite_limits,
    "rounded": _suite_rounded,
    "sorts": _suite_sorts,
}


def corrupt_machine(spec: TMSpec) -> TMSpec:
    """A copy with one transition's written symbol flipped between 1 and 3."""
    delta = dict(spec.delta)
    key = sorted(k for k, v in delta.items() if v[1] in (1, 3))[0]
    q2, x, m = delta[key]
    delta[key] = (q2, 4 - x, m)
    return TMSpec(spec.n_states, spec.initial, delta, spec.accepting, spec.name + "-corrupt")


def run_suites(seed: int = 0, corrupt: bool = False) -> list[SuiteResult]:
    out = []
    for name, fn in SUITES.items():
        rng = random.Random(f"{seed}:{name}")
        try:
            ok, detail = fn(rng, corrupt) if name == "machines" else fn(rng)
        except Exception as exc:  # a crash is a failed suite, not a crashed report
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(SuiteResult(name, ok, detail))
    return out
