"""Sorting with noisy comparisons.

The main entry point is :func:`noisy_sort`: sample about ``n / log2 n``
pivots, sort them, route every other element to a bucket between two pivots
with a cheap coarse search, sort each small bucket with strong pairwise
comparisons, trim bucket ends that do not belong, and finally reinsert
everything that was set aside.  The smaller sorts are building blocks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .oracle import NEG_INF, POS_INF, BudgetExceeded, NoisyOracle
from .primitives import _check_delta, constants, f_p, less_than, restart_wrap, safe_less_than
from .search import posterior_search, safe_binary_search, search_estimate

DEFAULT_C1 = 3.0
DEFAULT_C2 = 1.5
SMALL_N = 64

TAGS = ("pivot-sort", "bucket-assign", "bucket-sort", "trim", "reinsert")


def sort_inversion(
    oracle: NoisyOracle, ids: Sequence[int], sigma: float, tag: str = "sort-inversion"
) -> list[int]:
    """Insertion sort in which every adjacent comparison has error ``sigma``.

    Cheap when the input is nearly sorted: with ``t`` inversions it makes
    ``n - 1 + t`` comparisons when none of them err.
    """
    sigma = _check_delta(sigma, 0.5)
    a = list(ids)
    for i in range(1, len(a)):
        j = i
        while j > 0 and less_than(oracle, a[j], a[j - 1], sigma, tag):
            a[j - 1], a[j] = a[j], a[j - 1]
            j -= 1
    return a


def simple_sort(
    oracle: NoisyOracle, ids: Sequence[int], delta: float, tag: str = "simple-sort"
) -> list[int]:
    """Binary insertion sort; each insertion searches with error ``delta / n``."""
    delta = _check_delta(delta)
    per = delta / max(len(ids), 1)
    out: list[int] = []
    for x in ids:
        g = posterior_search(oracle, out, x, per, tag).predecessor_index if out else 0
        out.insert(g, x)
    return out


def weak_sort(oracle: NoisyOracle, ids: Sequence[int], delta: float, tag: str = "weak-sort") -> list[int]:
    """Sort with error ``delta``: a rough binary-insertion pass, then a careful insertion pass.

    The first pass errs with probability at most ``1/n**2``, leaving few
    inversions for the second pass, which compares neighbours at ``delta/n``.
    """
    delta = _check_delta(delta)
    n = len(ids)
    if n <= 1:
        return list(ids)
    rough = simple_sort(oracle, ids, 1 / n**2, tag)
    return sort_inversion(oracle, rough, delta / n, tag)


def weak_sort_estimate(n: int, p: float, delta: float) -> float:
    """Expected-query scale of :func:`weak_sort`, used to size its restart cap."""
    if n <= 1:
        return 0.0
    rough = sum(search_estimate(i, p, 1 / n**3) for i in range(1, n))
    fine = f_p(p, delta / n)
    return rough + n * fine + n * n * delta * fine


def safe_weak_sort(
    oracle: NoisyOracle, ids: Sequence[int], delta: float, tag: str = "weak-sort"
) -> list[int]:
    """:func:`weak_sort` with each attempt capped at ``m log2 m`` queries."""
    delta = _check_delta(delta)
    if len(ids) <= 1:
        return list(ids)
    m = weak_sort_estimate(len(ids), oracle.p, delta)
    out, _ = restart_wrap(oracle, lambda: weak_sort(oracle, ids, delta, tag), m)
    return out


def _capped(oracle: NoisyOracle, cap: int, fallback: list[int], run) -> list[int]:
    # run() under a hard query cap; on overflow hand back the fallback order
    try:
        with oracle.budget(cap) as mine:
            return run()
    except BudgetExceeded as exc:
        if exc.budget is not mine:
            raise
    oracle.overflows += 1
    return fallback


def safe_simple_sort(
    oracle: NoisyOracle,
    ids: Sequence[int],
    c1: float = DEFAULT_C1,
    tag: str = "simple-sort",
    delta: float | None = None,
) -> list[int]:
    """Binary insertion sort that never exceeds ``c1 * n * log2 n`` queries.

    Insertions use :func:`safe_binary_search` at error ``1/(n log2 n)``
    (capped at 1/4 for tiny inputs) unless a per-insertion ``delta`` is
    given; a finer ``delta`` stretches the cap by the same factor it
    lengthens each search.  If the cap is reached the input order is
    returned unchanged.
    """
    n = len(ids)
    if n <= 1:
        return list(ids)
    logn = math.log2(n)
    default = min(1 / (n * logn), 0.25)
    per = default if delta is None else _check_delta(delta, 0.5)
    stretch = max(1.0, (logn + math.log2(1 / per)) / (logn + math.log2(1 / default)))
    cap = math.ceil(c1 * n * logn * stretch)

    def run() -> list[int]:
        out: list[int] = []
        for x in ids:
            out.insert(safe_binary_search(oracle, out, x, per, tag).predecessor_index, x)
        return out

    return _capped(oracle, cap, list(ids), run)


@dataclass
class BucketPlan:
    """Where every element of a :func:`noisy_sort` run ended up.

    ``pivots`` is the sorted pivot list framed by the two infinite
    sentinels; ``assignments`` maps each element kept in a bucket to its gap
    index (bucket ``g`` lies between ``pivots[g]`` and ``pivots[g + 1]``);
    ``overflow`` lists the elements set aside for reinsertion, in the order
    they were set aside.
    """

    pivots: list = field(default_factory=list)
    assignments: dict[int, int] = field(default_factory=dict)
    overflow: list[int] = field(default_factory=list)
    sorted_bucket_sizes: list[int] = field(default_factory=list)
    size_limit: float = math.inf


def noisy_sort_with_plan(
    oracle: NoisyOracle, ids: Sequence[int], c1: float = DEFAULT_C1
) -> tuple[list[int], BucketPlan]:
    ids = list(ids)
    n = len(ids)
    if n < SMALL_N:
        # pivot sampling at rate 1/log2 n is meaningless this small
        out = weak_sort(oracle, ids, min(1 / math.log2(n), 0.5), "fallback") if n > 1 else ids
        limit = 6 * math.log2(max(n, 2)) ** 2
        return out, BucketPlan([NEG_INF, POS_INF], {a: 0 for a in ids}, [], [n], limit)

    logn = math.log2(n)
    fine = 1 / (n * logn)
    coins = oracle.rng.random(n)
    sample = [a for a, c in zip(ids, coins) if c < 1 / logn]
    # insertion error from the outer n: about 1/log2(n)^2 overall rather than 1/log2|S|
    pivots = safe_simple_sort(oracle, sample, c1, "pivot-sort", fine)
    chosen = set(pivots)

    buckets: list[list[int]] = [[] for _ in range(len(pivots) + 1)]
    for a in ids:
        if a not in chosen:
            g = safe_binary_search(oracle, pivots, a, 1 / logn, "bucket-assign").predecessor_index
            buckets[g].append(a)

    limit = 6 * logn**2
    plan = BucketPlan([NEG_INF, *pivots, POS_INF], size_limit=limit)
    overflow = plan.overflow
    arranged: list[int] = []
    for g, bucket in enumerate(buckets):
        if g > 0:
            arranged.append(pivots[g - 1])
        if len(bucket) > limit:
            overflow.extend(bucket)
            continue
        if not bucket:
            continue
        plan.sorted_bucket_sizes.append(len(bucket))
        bucket = safe_weak_sort(oracle, bucket, fine, "bucket-sort")
        lo_pivot = pivots[g - 1] if g > 0 else NEG_INF
        hi_pivot = pivots[g] if g < len(pivots) else POS_INF
        lo, hi = 0, len(bucket)
        while lo < hi and safe_less_than(oracle, bucket[lo], lo_pivot, fine, "trim"):
            overflow.append(bucket[lo])
            lo += 1
        while lo < hi and safe_less_than(oracle, hi_pivot, bucket[hi - 1], fine, "trim"):
            overflow.append(bucket[hi - 1])
            hi -= 1
        for a in bucket[lo:hi]:
            plan.assignments[a] = g
        arranged.extend(bucket[lo:hi])

    for x in overflow:
        g = safe_binary_search(oracle, arranged, x, fine, "reinsert").predecessor_index
        arranged.insert(g, x)
    return arranged, plan


def noisy_sort(oracle: NoisyOracle, ids: Sequence[int], c1: float = DEFAULT_C1) -> list[int]:
    """Sort ``ids`` with vanishing error in about ``sort_constant * n log2 n`` queries.

    Queries are tagged by phase: ``pivot-sort``, ``bucket-assign``,
    ``bucket-sort``, ``trim`` and ``reinsert`` (``fallback`` below 64
    elements, where the whole input goes through :func:`weak_sort`).
    """
    return noisy_sort_with_plan(oracle, ids, c1)[0]


def noisy_sort_budget(n: int, p: float, c2: float = DEFAULT_C2) -> int:
    """Hard query cap ``ceil(c2 * sort_constant * n * log2 n)``."""
    if n <= 1:
        return 0
    return math.ceil(c2 * constants(p).sort_constant * n * math.log2(n))


def safe_noisy_sort(
    oracle: NoisyOracle, ids: Sequence[int], c1: float = DEFAULT_C1, c2: float = DEFAULT_C2
) -> list[int]:
    """:func:`noisy_sort` stopped at :func:`noisy_sort_budget` queries.

    On overflow the input order is returned and ``oracle.overflows`` is
    incremented.
    """
    ids = list(ids)
    cap = noisy_sort_budget(len(ids), oracle.p, c2)
    return _capped(oracle, cap, ids, lambda: noisy_sort(oracle, ids, c1))
