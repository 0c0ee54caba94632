import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from noisysort.oracle import NEG_INF, POS_INF, NoisyOracle
from noisysort.primitives import f_p, restart_budget, threshold_steps
from noisysort.search import search_estimate
from noisysort.sort import (
    TAGS,
    noisy_sort,
    noisy_sort_budget,
    noisy_sort_with_plan,
    safe_noisy_sort,
    safe_simple_sort,
    safe_weak_sort,
    simple_sort,
    sort_inversion,
    weak_sort,
    weak_sort_estimate,
)


class TruthfulOracle(NoisyOracle):
    def noisy_compare(self, x, y, tag="compare"):
        super().noisy_compare(x, y, tag)
        return 1 if self.rank(x) < self.rank(y) else 0


def inversions(oracle, ids):
    r = [oracle.rank(a) for a in ids]
    return sum(1 for i in range(len(r)) for j in range(i + 1, len(r)) if r[i] > r[j])


def sigma3(q, trials):
    return 3 * math.sqrt(q * (1 - q) / trials)


# -- sort_inversion --------------------------------------------------------------------

@pytest.mark.parametrize("ids", [[], [0]])
def test_sort_inversion_trivial(ids):
    o = NoisyOracle.random(1, 0.1, 0)
    assert sort_inversion(o, ids, 0.01) == ids
    assert o.total_queries == 0


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32), st.sampled_from([0.3, 0.01, 1e-6]))
def test_sort_inversion_noiseless_cost_is_exact(n, seed, sigma):
    o = TruthfulOracle.random(n, 0.1, seed)
    ids = list(range(n))
    t = inversions(o, ids)
    r = [o.rank(a) for a in ids]
    # an element that becomes the new minimum walks to the front without a final failed comparison
    new_minima = sum(1 for i in range(1, n) if r[i] < min(r[:i]))
    out = sort_inversion(o, ids, sigma)
    assert o.is_sorted(out)
    assert o.total_queries == threshold_steps(0.1, sigma) * (n - 1 + t - new_minima)
    assert o.total_queries <= threshold_steps(0.1, sigma) * (n - 1 + t)


def test_sort_inversion_sorted_input_cost():
    n, sigma, trials = 10, 0.01, 2000
    f = f_p(0.1, sigma)
    assert (n - 1) * f == 33.75
    total = 0
    for seed in range(trials):
        o = NoisyOracle.random(n, 0.1, seed)
        sort_inversion(o, o.sorted_truth(range(n)), sigma)
        total += o.total_queries
    assert total / trials <= (n - 1) * f + (n - 1) * sigma * n**2 * f


def test_sort_inversion_union_bound():
    n, sigma, trials = 5, 1e-4, 10_000
    bad = 0
    budget = 0.0
    for seed in range(trials):
        o = NoisyOracle.random(n, 0.1, seed)
        ids = list(range(n))
        budget += (n - 1 + inversions(o, ids)) * sigma
        bad += not o.is_sorted(sort_inversion(o, ids, sigma))
    assert bad <= budget + 3 * math.sqrt(budget)


# -- simple_sort ---------------------------------------------------------------------------

def test_simple_sort_two_elements():
    o = TruthfulOracle.random(2, 0.1, 0)
    assert o.is_sorted(simple_sort(o, [0, 1], 0.05))
    assert o.total_queries > 0


def test_simple_sort_error_and_envelope():
    delta = 0.05
    for n, trials in ((256, 500), (1024, 40)):
        errors = total = 0
        for seed in range(trials):
            o = NoisyOracle.random(n, 0.1, seed)
            out = simple_sort(o, list(range(n)), delta)
            assert sorted(out) == list(range(n))
            errors += not o.is_sorted(out)
            total += o.total_queries
        scale = n * math.log2(n / delta) / (1 - (-0.1 * math.log2(0.1) - 0.9 * math.log2(0.9)))
        assert total / trials / scale <= 3
        if n == 256:
            assert errors / trials <= delta + sigma3(delta, trials)


# -- weak_sort -----------------------------------------------------------------------------

def test_weak_sort_trivial():
    o = NoisyOracle.random(1, 0.1, 0)
    assert weak_sort(o, [0], 0.1) == [0] and o.total_queries == 0


def test_weak_sort_dominant_term_example():
    outer = 2**12
    delta = 1 / (outer * math.log2(outer))
    assert f_p(0.1, delta / 36) == math.ceil(math.log2(36 * 2**12 * 12 - 1) / math.log2(9)) / 0.8 == 8.75


def _weak_sort_error(trials):
    n, delta = 30, 1e-4
    bad = 0
    for seed in range(trials):
        o = NoisyOracle.random(n, 0.1, seed)
        bad += not o.is_sorted(weak_sort(o, list(range(n)), delta))
    return bad / trials, delta + sigma3(delta, trials)


def test_weak_sort_error_rate():
    rate, bound = _weak_sort_error(10_000)
    assert rate <= bound


@pytest.mark.slow
def test_weak_sort_error_rate_full_scale():
    rate, bound = _weak_sort_error(100_000)
    assert rate <= bound


def test_safe_weak_sort_cap_and_restarts():
    n, delta = 36, 1 / (2**12 * 12)
    m = weak_sort_estimate(n, 0.1, delta)
    k = restart_budget(m)
    restarts = attempts = 0
    for seed in range(500):
        o = NoisyOracle.random(n, 0.1, seed)
        out = safe_weak_sort(o, list(range(n)), delta)
        assert sorted(out) == list(range(n))
        assert o.total_queries - o.restarts * k <= k
        restarts += o.restarts
        attempts += o.restarts + 1
    assert restarts / attempts <= 1 / math.log2(m)


def test_safe_weak_sort_pass_through():
    o = TruthfulOracle.random(8, 0.1, 0)
    assert o.is_sorted(safe_weak_sort(o, list(range(8)), 1e-3))
    assert o.restarts == 0


# -- safe_simple_sort -------------------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(st.integers(2, 80), st.floats(0.05, 3.0), st.integers(0, 2**32))
def test_safe_simple_sort_cap(n, c1, seed):
    o = NoisyOracle.random(n, 0.2, seed)
    ids = list(range(n))
    out = safe_simple_sort(o, ids, c1)
    assert o.total_queries <= math.ceil(c1 * n * math.log2(n))
    assert sorted(out) == ids
    if o.overflows:
        assert out == ids


def test_safe_simple_sort_n1024():
    n, trials = 1024, 200
    errors = overflows = 0
    for seed in range(trials):
        o = NoisyOracle.random(n, 0.1, seed)
        out = safe_simple_sort(o, list(range(n)))
        errors += not o.is_sorted(out)
        overflows += o.overflows
    assert errors / trials <= 0.05
    assert overflows / trials < 0.01


# -- noisy_sort ----------------------------------------------------------------------------

def check_plan(ids, out, plan, n):
    assert sorted(out) == sorted(ids)
    pivots = [a for a in plan.pivots if a not in (NEG_INF, POS_INF)]
    assert plan.pivots[0] == NEG_INF and plan.pivots[-1] == POS_INF
    parts = [set(pivots), set(plan.assignments), set(plan.overflow)]
    assert sum(len(s) for s in parts) == n
    assert set().union(*parts) == set(ids)
    assert all(s <= plan.size_limit for s in plan.sorted_bucket_sizes)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 140), st.sampled_from([0.05, 0.1, 0.25]), st.integers(0, 2**32))
def test_noisy_sort_structure(n, p, seed):
    o = NoisyOracle.random(n, p, seed)
    ids = list(range(n))
    out, plan = noisy_sort_with_plan(o, ids)
    check_plan(ids, out, plan, n)
    snap = o.ledger_snapshot()
    assert snap.total == sum(snap.by_tag.values())
    if n >= 64:
        assert set(snap.by_tag) <= set(TAGS)


def test_small_n_fallback_tag():
    o = NoisyOracle.random(40, 0.1, 0)
    out = noisy_sort(o, list(range(40)))
    assert set(o.ledger_snapshot().by_tag) == {"fallback"}
    assert sorted(out) == list(range(40))


class OnePivot:
    # stands in for the algorithm stream: only element 0 is sampled as a pivot
    def random(self, n):
        coins = np.ones(n)
        coins[0] = 0.0
        return coins


def test_oversized_bucket_goes_to_overflow():
    n = 2048
    o = NoisyOracle.random(n, 0.1, 2)
    o.rng = OnePivot()
    out, plan = noisy_sort_with_plan(o, list(range(n)))
    check_plan(list(range(n)), out, plan, n)
    assert plan.pivots[1:-1] == [0]
    big = max(o.rank(0), n - 1 - o.rank(0))
    assert big > plan.size_limit and len(plan.overflow) >= big
    assert o.ledger_snapshot().by_tag["reinsert"] > 0
    assert o.is_sorted(out)


def test_pivot_sort_overflow_keeps_permutation():
    # with c1 tiny the pivot sort overflows and hands back pivots in input order
    o = NoisyOracle.random(200, 0.1, 5)
    out, plan = noisy_sort_with_plan(o, list(range(200)), c1=0.01)
    check_plan(list(range(200)), out, plan, 200)
    assert o.overflows >= 1


def test_bucket_sizes_stay_bounded():
    # sampling alone: with probability >= 1 - 1/n every true bucket has at most 3 log2(n)^2 members
    n = 2**12
    logn = math.log2(n)
    rng = np.random.default_rng(0)
    trials = 2000
    bad = 0
    for _ in range(trials):
        picked = np.flatnonzero(rng.random(n) < 1 / logn)
        edges = np.concatenate(([-1], picked, [n]))
        if (np.diff(edges) - 1).max() > 3 * logn**2:
            bad += 1
    assert bad / trials <= 1 / n + 3 * math.sqrt(1 / n / trials)


def test_noisy_sort_budget_example():
    assert noisy_sort_budget(2**12, 0.1, 1.5) == 167920
    assert noisy_sort_budget(1, 0.1) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 120), st.floats(0.05, 1.5), st.integers(0, 2**32))
def test_safe_noisy_sort_cap(n, c2, seed):
    o = NoisyOracle.random(n, 0.1, seed)
    ids = list(range(n))
    out = safe_noisy_sort(o, ids, c2=c2)
    assert o.total_queries <= noisy_sort_budget(n, 0.1, c2)
    assert sorted(out) == ids
