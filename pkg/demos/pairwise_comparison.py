"""
Deciding one comparison under noise
===================================

Repeating a noisy comparison and taking a majority vote works, but a
sequential test that stops as soon as the posterior is confident enough
does better.  Here both run against the same simulated channel.
"""
import numpy as np

from noisysort import NoisyOracle, less_than
from noisysort.primitives import majority_compare, majority_repetitions, f_p

p, delta, trials = 0.1, 1e-3, 20_000

# sequential test: posterior odds move one step per answer
errors, queries = 0, []
for seed in range(trials):
    oracle = NoisyOracle([0, 1], p, seed)
    errors += not less_than(oracle, 0, 1, delta)
    queries.append(oracle.total_queries)
print(f"sequential: error {errors / trials:.5f}, mean queries {np.mean(queries):.3f} (bound {f_p(p, delta)})")

# fixed-length majority vote with the same error target
t = majority_repetitions(p, delta)
errors = 0
for seed in range(trials):
    oracle = NoisyOracle([0, 1], p, seed)
    errors += not majority_compare(oracle, 0, 1, t)
print(f"majority of {t}: error {errors / trials:.5f}, queries {t}")

# channel noise is also a source of fair coins
oracle = NoisyOracle([0, 1], p, seed=1)
bits = [oracle.extract_random_bit(0, 1) for _ in range(10_000)]
print(f"extracted bits: mean {np.mean(bits):.3f}, {oracle.total_queries / len(bits):.2f} queries per bit")
