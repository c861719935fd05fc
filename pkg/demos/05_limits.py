"""
Limits with a convergence rate
==============================

A function of a precision argument that converges fast enough can be
turned into its limit, evaluated to any requested number of bits.
"""

from fractions import Fraction
from pathlib import Path

from lenode import eval_approx, parse_program
from lenode.algebra import cauchy_check, eval_elimstar, is_normal_form

prog = parse_program((Path(__file__).parent / "programs" / "basics.ldl").read_text())
third = prog.term("third")
print("normal form:", is_normal_form(third))

# partial sums of 4^-j sampled at 2^k
for n in (0, 4, 16, 40):
    v = eval_approx(third, [], n)[0]
    print(n, v, float(abs(v.to_fraction() - Fraction(1, 3)) * 2**n))

# a necessary check on the rate: consecutive gaps stay below 2^-k + 2^-(k+1)
print("cauchy:", cauchy_check(third, [], 30).ok)

# with a modulus p(n) = n + 1 the operand is sampled further out
vanish = prog.term("vanish")
print([str(eval_elimstar(vanish, [], n)[0]) for n in range(6)])
