"""
Dyadic numbers and sg-polynomials
=================================

Exact arithmetic on m/2^e, the sg-bar ramp, and the degree audit that
decides whether a right-hand side is essentially linear.
"""

from lenode import Dyadic, parse_dyadic, build_if, build_selector, decompose_linear, degree, eval_expr, sgbar
from lenode.dsl import parse_expr
from lenode.sgpoly import NotEssentiallyLinear, Var, to_source

# every value is a mantissa over a power of two, kept in lowest terms
a = Dyadic(3, 2)
b = Dyadic(5, 3)
print(a, "+", b, "=", a + b, "=", (a + b).decimal())

# sgb is 0 below 1/4, 1 above 3/4, a ramp in between
for v in ("0", "1/2^2", "1/2^1", "3/2^2", "1"):
    print(f"sgb({v}) = {sgbar(parse_dyadic(v))}")

# degrees: anything under sgb counts as constant
P = parse_expr("x * sgb((x*x - z) * y) + y*y*y")
print({v: degree(P, v) for v in "xyz"})

# a selector is constant s on each range [s, s + w]: here 0 on {0}, 1 on [1, 2], 3 on [3, 4]
sel = build_selector([0, 1, 3], [0, 1, 1], Var("s"))
print([str(eval_expr(sel, {"s": parse_dyadic(k)})) for k in ("0", "1", "7/2^2", "3", "13/2^2")])

branch = build_if(Var("b"), Var("t"), Var("e"))
print(to_source(branch))

# linear in f, g: the decomposition gives A and B symbolically
dec = decompose_linear([parse_expr("sgb(f) * g + 2*f - 1"), parse_expr("half(g)")], ["f", "g"])
print([[to_source(c) for c in row] for row in dec.A], [to_source(c) for c in dec.B])

try:
    decompose_linear([parse_expr("f * g")], ["f", "g"])
except NotEssentiallyLinear as exc:
    print("rejected:", exc)
