"""
Binary search when comparisons lie
==================================

The searcher keeps a posterior over the gaps between sorted items and
always asks about the item that halves the posterior mass.  The verified
variant finds a rough answer first and then double-checks both neighbours.
"""
import numpy as np

from noisysort import NoisyOracle, noisy_binary_search, posterior_search
from noisysort.primitives import search_floor, search_target

n, p, delta, trials = 2**14, 0.1, 1e-3, 300

for name, search in (("posterior", posterior_search), ("verified", noisy_binary_search)):
    costs, errors = [], 0
    for seed in range(trials):
        # target is element n; its position among the others is uniform
        oracle = NoisyOracle.random(n + 1, p, seed)
        listed = oracle.sorted_truth(range(n))
        out = search(oracle, listed, n, delta)
        errors += out.predecessor_index != oracle.rank(n)
        costs.append(out.queries_used)
    print(f"{name:9s}: error {errors / trials:.4f}, mean queries {np.mean(costs):.2f}")

print(f"floor {search_floor(n, p, delta):.2f}, optimal {search_target(n, p, delta):.2f}")
