"""
Sorting with noisy comparisons
==============================

The main sort samples pivots, routes every element to a bucket with a cheap
coarse search, sorts each small bucket carefully, trims bucket ends that do
not belong, and reinserts the leftovers.  The ledger shows where the
queries went.
"""
import math

from noisysort import NoisyOracle, noisy_sort
from noisysort.sort import noisy_sort_with_plan, noisy_sort_budget
from noisysort.primitives import constants

p = 0.1
c = constants(p)

for n in (2**10, 2**12):
    oracle = NoisyOracle.random(n, p, seed=n)
    order, plan = noisy_sort_with_plan(oracle, list(range(n)))
    scale = n * math.log2(n)
    print(f"n={n}: sorted={oracle.is_sorted(order)}, {oracle.total_queries / scale:.3f} n log2 n queries"
          f" (budget {noisy_sort_budget(n, p) / scale:.3f})")
    print(f"  {len(plan.pivots) - 2} pivots, {len(plan.sorted_bucket_sizes)} buckets,"
          f" largest {max(plan.sorted_bucket_sizes)}, {len(plan.overflow)} reinserted")
    for tag, count in oracle.ledger_snapshot().by_tag.items():
        print(f"  {tag:14s}{count / scale:7.3f}")

# the two big shares head for 1/I(p) and 1/((1-2p) log2((1-p)/p))
print(f"limits: bucket-assign {c.lower_only:.3f}, bucket-sort {1 / c.walk_rate:.3f}")
