"""
Linear length-ODEs
==================

Systems that move only when the bit length of the clock grows, solved
three ways: stage by stage, in closed form, and with rounded stages.
"""

from lenode import LLODESystem, solve_explicit, solve_iterative, solve_rounded
from lenode.dsl import parse_expr
from lenode.llode import format_trace, growth_report
from lenode.selftest import random_system, rounding_schedule
from lenode.sgpoly import IntConst, Var
import random

# f' = f along the length: f(x) = 2^len(x)
pow2 = LLODESystem(("f",), (), (IntConst(1),), (Var("f"),))
print([int(solve_iterative(pow2, x)[0]) for x in range(10)])

# the clock only matters at x = 2^t - 1, so sums over stages appear
clocked = LLODESystem(("f",), (), (IntConst(0),), (Var("x"),))
print([int(solve_iterative(clocked, x)[0]) for x in (1, 3, 7, 15)])

# the closed form multiplies stage matrices instead of stepping
rng = random.Random(1)
sys = random_system(rng, dim=2)
print("explicit == iterative:", solve_explicit(sys, 29, [3]) == solve_iterative(sys, 29, [3]))

# growth stays polynomial in the length for these systems
print(format_trace(growth_report(pow2, 255)), end="")

# rounded stages: each stage keeps a planned number of bits
halving = LLODESystem(("w",), (), (IntConst(1),), (parse_expr("-half(w) + 1/2^3"),))
for n in (2, 8, 20):
    sched = rounding_schedule(halving, 1000, (), n)
    approx = solve_rounded(halving, 1000, (), n, sched)[0]
    exact = solve_iterative(halving, 1000)[0]
    print(n, sched.levels, approx, "error", abs(approx - exact))
