"""
How many comparisons does noisy sorting need?
=============================================

Each comparison is answered through a binary symmetric channel that lies
with probability p.  Three constants sit in front of ``n log2 n``: the
information-theoretic lower bound, the cost of the pivot-bucket sort, and
the older upper bound it improves on.
"""
from noisysort import constants, f_p
from noisysort.primitives import search_floor, search_target

# at p = 0.1 the three constants are about 1.883, 2.278 and 6.213
for p in (0.01, 0.05, 0.1, 0.2, 0.3):
    c = constants(p)
    print(f"p={p:<5} lower={c.lower_only:7.4f}  sort={c.sort_constant:7.4f}  previous={c.prior_upper:8.4f}")

# as p shrinks the sorting constant approaches 1: noiseless comparisons
print()
for p in (1e-2, 1e-3, 1e-4):
    print(f"p={p:g}: sort constant {constants(p).sort_constant:.4f}")

# one comparison at error delta costs f_p(delta) queries on average
print()
for delta in (0.05, 0.01, 1e-3, 1e-6):
    print(f"f_0.1({delta:g}) = {f_p(0.1, delta)}")

# searching among 2^16 sorted items at error 0.01
n, delta = 2**16, 0.01
print()
print(f"search floor {search_floor(n, 0.1, delta):.2f}, achievable {search_target(n, 0.1, delta):.2f}")
