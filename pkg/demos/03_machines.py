"""
Turing machines as length-ODEs
==============================

A one-step map compiled to sg-polynomials, then iterated by a linear
length-ODE whose clock 2^t runs t steps.
"""

from pathlib import Path

from lenode import compile_exec, compile_next, parse_tm
from lenode.machine import (
    Configuration,
    eval_next,
    exec_compiled,
    gamma_config,
    gamma_word_inv,
    run_compiled,
    sweep_next,
    tm_run_direct,
)

here = Path(__file__).parent
succ = parse_tm((here / "machines" / "successor.tm").read_text(), "successor")

# configurations become three numbers: state, left tape, right tape in base 4
c = Configuration(0, "", "13")
enc = gamma_config(c)
print(c, "->", [str(v) for v in enc])

# one compiled step agrees with one direct step
nxt = compile_next(succ)
print("next:", [str(v) for v in eval_next(nxt, enc)])

# exhaustive check over short tapes
rep = sweep_next(succ, 3)
print(f"checked {rep.checked}, skipped {rep.skipped}, mismatches {len(rep.mismatches)}")

# t steps = one solve at clock 2^t
exe = compile_exec(succ, nxt)
for t in range(6):
    got = exec_compiled(exe, 1 << t, enc)
    print(t, gamma_word_inv(got.lbar) or "-", gamma_word_inv(got.rbar) or "-", got == gamma_config(tm_run_direct(succ, "13", t)))

# bits least significant first, 3 codes 1: 13 is 2, so the successor writes 33
print(run_compiled(succ, "13", 40, exe)[1])
