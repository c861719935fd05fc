"""Acceptance criteria, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -s`` to see the lines, or
``python tests/test_acceptance.py`` for the report alone.
"""

import contextlib
import io
import itertools
import random
import time
from fractions import Fraction

import numpy as np

from lenode import algebra as alg
from lenode.calculus import delta, discrete_integral, falling_exp, falling_power
from lenode.cli import main
from lenode.codec import decode, encode, word_of
from lenode.dyadic import Dyadic, bit_length
from lenode.llode import solve_explicit, solve_iterative, solve_rounded
from lenode.machine import (
    Configuration,
    compile_exec,
    enumerate_configs,
    exec_compiled,
    gamma_config,
    gamma_word,
    gamma_word_inv,
    is_encodable,
    load_fixture,
    sweep_next,
    tm_step_direct,
)
from lenode.selftest import (
    decaying_term,
    random_dyadic,
    random_system,
    rounding_schedule,
    stage_bounds,
    stage_modulus,
    third_term,
)

SEED = 20240601

# collected for the end-of-run summary, see conftest.py
LINES: list[str] = []


def report(k, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {k}. {title}: {detail}"
    LINES.append(line)
    print(line)
    return ok


def criterion_closed_form():
    rng = random.Random(f"{SEED}:1")
    t0 = time.perf_counter()
    bad = 0
    for _ in range(100):
        sys = random_system(rng, dim=rng.randint(1, 3))
        x, y = rng.randint(0, 31), [random_dyadic(rng, 6, 4)]
        bad += solve_explicit(sys, x, y) != solve_iterative(sys, x, y)
    dt = time.perf_counter() - t0
    return report(1, "closed form vs recurrence", bad == 0 and dt < 10, f"100 systems, {bad} mismatches, {dt:.2f}s")


def _poly(cs):
    return lambda x, _p=(): Dyadic(sum(c * x**k for k, c in enumerate(cs)))


def criterion_calculus():
    rng = random.Random(f"{SEED}:2")
    counts = dict.fromkeys(("fundamental", "falling power", "falling exp", "integral derivative"), 0)
    bad = 0
    for _ in range(100):
        F = _poly([rng.randint(-9, 9) for _ in range(5)])
        a, b = rng.randint(-12, 12), rng.randint(-12, 12)
        bad += discrete_integral(lambda x, p: delta(F, x, p), a, b) != F(b) - F(a)
        counts["fundamental"] += 1

        m, x = rng.randint(1, 7), rng.randint(-8, 20)
        bad += falling_power(x + 1, m) - falling_power(x, m) != m * falling_power(x, m - 1)
        counts["falling power"] += 1

        M = np.array([[random_dyadic(rng, 3, 2) for _ in range(2)] for _ in range(2)], dtype=object)
        N = np.array([[random_dyadic(rng, 3, 2) for _ in range(2)] for _ in range(2)], dtype=object)
        U = lambda t, _p=(): M * t + N * (t * t)  # noqa: E731
        x = rng.randint(0, 8)
        bad += not (falling_exp(U, x + 1) - falling_exp(U, x) == delta(U, x) @ falling_exp(U, x)).all()
        counts["falling exp"] += 1

        cs = [rng.randint(-5, 5) for _ in range(6)]
        f = lambda u, t, cs=cs: Dyadic(cs[0] + cs[1] * u + cs[2] * t + cs[3] * u * t + cs[4] * t * t + cs[5] * u * u * t)  # noqa: E731
        a0, a1, b0, b1 = rng.randint(-8, 8), rng.randint(-2, 2), rng.randint(-8, 8), rng.randint(-2, 2)
        lo = lambda u: a0 + a1 * u  # noqa: E731
        hi = lambda u: b0 + b1 * u  # noqa: E731
        G = lambda u, _p=(): discrete_integral(lambda t, _q: f(u, t), lo(u), hi(u))  # noqa: E731
        x = rng.randint(0, 4)
        rhs = (
            discrete_integral(lambda t, _q: f(x + 1, t) - f(x, t), lo(x), hi(x))
            + discrete_integral(lambda t, _q: f(x + 1, lo(x + 1) + t), 0, -(lo(x + 1) - lo(x)))
            + discrete_integral(lambda t, _q: f(x + 1, hi(x) + t), 0, hi(x + 1) - hi(x))
        )
        bad += delta(G, x) != rhs
        counts["integral derivative"] += 1
    ok = bad == 0 and min(counts.values()) >= 100
    detail = ", ".join(f"{k} {v}" for k, v in counts.items()) + f"; {bad} failures"
    return report(2, "finite calculus identities", ok, detail)


def criterion_machines():
    t0 = time.perf_counter()
    checked = bad = 0
    for name in ("identity", "successor", "scanner"):
        spec = load_fixture(name)
        rep = sweep_next(spec, 4)
        checked += rep.checked
        bad += len(rep.mismatches)
        sys = compile_exec(spec)
        starts = list(enumerate_configs(spec, 2))
        starts += [Configuration(spec.initial, "", w) for w in _words(3, 4)]
        for c in starts:
            want = c
            for t in range(7):
                if t:
                    want = tm_step_direct(spec, want)
                if not is_encodable(want):
                    break
                checked += 1
                bad += exec_compiled(sys, 1 << t, gamma_config(c)) != gamma_config(want)
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 30
    return report(3, "compiled machines", ok, f"{checked} comparisons, {bad} mismatches, {dt:.2f}s")


def _words(lo, hi):
    for n in range(lo, hi + 1):
        yield from map("".join, itertools.product("13", repeat=n))


def criterion_codec():
    rng = random.Random(f"{SEED}:4")
    bad = 0
    for _ in range(100):
        d = Dyadic(rng.randint(0, 255), rng.randint(0, 6))
        w = word_of(d)
        bad += encode(1 << (len(w) // 2), gamma_word(w)) != d
    seen = set()
    for n in range(1 << 10):
        v = decode(n)
        gamma_word_inv(v)  # raises outside the image
        seen.add(v)
    bad += (1 << 10) - len(seen)
    return report(4, "codec round trips", bad == 0, f"100 round trips, 1024 decodes, {bad} failures")


def criterion_worked_example():
    v = encode(1 << 4, gamma_word("13111333"))
    return report(5, "pair word 13111333", v == Dyadic(11, 1), f"encodes to {v.decimal()}")


def criterion_limits():
    third = third_term()
    worst = Fraction(0)
    bad = 0
    for n in range(41):
        err = abs(alg.eval_approx(third, [], n)[0].to_fraction() - Fraction(1, 3))
        bad += err > Fraction(1, 2**n)
        worst = max(worst, err * 2**n)
    decay = decaying_term((1, 1))
    for n in range(41):
        err = abs(alg.eval_elimstar(decay, [], n)[0].to_fraction())
        bad += err > Fraction(1, 2**n)
        worst = max(worst, err * 2**n)
    return report(6, "limit evaluation", bad == 0, f"82 precisions, worst error {float(worst):.3f} * 2^-n")


def criterion_rounded():
    rng = random.Random(f"{SEED}:7")
    bad = sched_bad = runs = 0
    for _ in range(50):
        sys = random_system(rng, sgbar=False)
        x, y = rng.randint(1, 31), [random_dyadic(rng, 4, 2)]
        exact = solve_iterative(sys, x, y)
        Z = stage_bounds(sys, x, y)
        l = bit_length(x)
        for n in range(31):
            s = rounding_schedule(sys, x, y, n)
            sched_bad += s.levels[l] != n
            sched_bad += any(s.levels[i] != s.alpha * s.levels[i + 1] + stage_modulus(Z[i], bit_length(i), y) for i in range(l))
            got = solve_rounded(sys, x, y, n, s)
            bad += any(abs(a - b) > Dyadic(1, n) for a, b in zip(got, exact))
            runs += 1
    ok = bad == 0 and sched_bad == 0
    return report(7, "rounded evaluation", ok, f"{runs} runs on 50 systems, {bad} out of tolerance, {sched_bad} schedule faults")


def criterion_sorts():
    N, R = alg.N, alg.R
    f = alg.Compose(alg.Base("half", (N,)), (alg.proj(1, (N,)),))
    accepted = alg.typecheck(alg.Compose(alg.Base("sgnbar", (R,)), (f,))) == alg.Signature((N,), (R,))
    try:
        alg.typecheck(alg.Compose(alg.Base("length", (N,)), (f,)))
        rejected = False
    except alg.SortMismatch:
        rejected = True
    return report(8, "sort discipline", accepted and rejected, f"R->R after N->R accepted={accepted}, N->N after N->R rejected={rejected}")


def criterion_determinism():
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = main(["selftest", "--seed", "7"])
        outs.append((code, buf.getvalue().encode()))
    ok = outs[0] == outs[1] and outs[0][0] == 0
    return report(9, "selftest determinism", ok, f"{len(outs[0][1])} bytes, identical={outs[0] == outs[1]}")


CRITERIA = [
    criterion_closed_form,
    criterion_calculus,
    criterion_machines,
    criterion_codec,
    criterion_worked_example,
    criterion_limits,
    criterion_rounded,
    criterion_sorts,
    criterion_determinism,
]


def test_closed_form():
    assert criterion_closed_form()


def test_calculus_identities():
    assert criterion_calculus()


def test_machines():
    assert criterion_machines()


def test_codec():
    assert criterion_codec()


def test_worked_example():
    assert criterion_worked_example()


def test_limits():
    assert criterion_limits()


def test_rounded():
    assert criterion_rounded()


def test_sorts():
    assert criterion_sorts()


def test_determinism():
    assert criterion_determinism()


if __name__ == "__main__":
    import sys

    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
