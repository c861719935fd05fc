"""
From integers to words and back
===============================

Natural numbers become {1,3}-words, a machine rewrites them, and a
length-ODE reads the pair encoding of the answer as a dyadic.
"""

from pathlib import Path

from lenode import decode, direct_pipeline, encode, parse_dyadic, parse_tm, word_of
from lenode.codec import BudgetExceeded, decode_pair
from lenode.machine import gamma_word, gamma_word_inv

# integer pairs 11/13 then fraction pairs 31/33
for d in ("5", "11/2^1", "3/2^2"):
    w = word_of(parse_dyadic(d))
    print(d, "->", w, "->", encode(1 << (len(w) // 2), gamma_word(w)))

# decode writes the bits of n most significant first
print([gamma_word_inv(decode(n)) for n in range(8)])
print("pairs of (6, 3):", gamma_word_inv(decode_pair(6, 3)))

# the whole pipeline under a clock B(B(B(max(m, n))))
here = Path(__file__).parent
halving = parse_tm((here / "machines" / "halving.tm").read_text(), "halving")
for m in range(6):
    print(m, "->", direct_pipeline(halving, 3, m, 0))

# one layer of B is too little time for a longer input
try:
    direct_pipeline(halving, 1, 6, 7)
except BudgetExceeded as exc:
    print("budget:", exc)
