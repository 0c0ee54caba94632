"""Noisy predecessor search over a sorted list.

The core search keeps a Bayesian posterior over the ``n + 1`` gaps a target
can fall into, always queries the element that splits posterior mass most
evenly, and stops once one gap holds ``1 - delta`` of the mass.  The safe and
verified variants wrap it with restart budgets and cheap pairwise checks.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate
from typing import Sequence

import numpy as np

from .oracle import NEG_INF, POS_INF, NoisyOracle
from .primitives import _check_delta, capacity, less_than, restart_wrap


_RESCALE_HI = 1e200
_RESCALE_LO = 1e-200
# masses are kept at or above this so no gap ever reaches probability zero
_FLOOR = 1e-290


class GapPosterior:
    """Posterior over predecessor gaps ``0..n`` for a search target.

    Gap ``i`` means "the target lies just above element ``i``" (1-based),
    gap 0 means it is below every element.  Each answer multiplies the gaps
    it agrees with by ``1-p`` and the rest by ``p``.  Weights are constant
    over runs of consecutive gaps and stored per run: run ``k`` covers
    ``lengths[k]`` gaps starting at ``starts[k]`` and carries total
    (unnormalized) mass ``masses[k]``.
    """

    def __init__(self, n: int, p: float):
        self.n = n
        self.p = p
        self.ratio = (1 - p) / p
        self.starts = [0]
        self.lengths = [n + 1]
        self.masses = [1.0]
        self.updates = 0

    def total(self) -> float:
        return sum(self.masses)

    def settled_gap(self, delta: float) -> int | None:
        """The gap holding at least ``1 - delta`` of the mass, if any (``delta < 1/2``)."""
        masses = self.masses
        top = max(masses)
        k = masses.index(top)
        if self.lengths[k] == 1 and top >= (1.0 - delta) * sum(masses):
            return self.starts[k]
        return None

    def map_gap(self) -> int:
        """A most probable gap (the lowest one on ties)."""
        dens = [m / l for m, l in zip(self.masses, self.lengths)]
        return self.starts[dens.index(max(dens))]

    def split_point(self) -> int:
        """Element index ``j`` in ``1..n`` whose query splits the mass most evenly.

        Ties go to the lower index.
        """
        n = self.n
        cum = list(accumulate(self.masses))
        half = cum[-1] * 0.5
        k = bisect_right(cum, half)
        if k >= len(cum):
            return n
        s, length = self.starts[k], self.lengths[k]
        base = cum[k - 1] if k else 0.0
        w = self.masses[k] / length
        jlo = min(s + int((half - base) // w), s + length - 1)
        if jlo < 1:
            return 1
        if jlo >= n:
            return n
        below = base + (jlo - s) * w
        # exact ties (which rounding can tip either way) go to the lower index
        return jlo if (half - below) - (below + w - half) <= 1e-12 * cum[-1] else jlo + 1

    def update(self, j: int, above: bool) -> None:
        """Absorb an answer saying the target is above (or below) element ``j``."""
        starts, lengths, masses = self.starts, self.lengths, self.masses
        k = bisect_right(starts, j) - 1
        s = starts[k]
        if s != j:
            left = j - s
            length = lengths[k]
            whole = masses[k]
            starts.insert(k + 1, j)
            lengths[k] = left
            lengths.insert(k + 1, length - left)
            masses[k] = whole * left / length
            masses.insert(k + 1, whole - masses[k])
            k += 1
        # pieces k.. are the gaps at or above j; scale the shorter side
        r = self.ratio
        if k > len(masses) - k:
            masses[k:] = [m * r for m in masses[k:]] if above else [m / r for m in masses[k:]]
        else:
            masses[:k] = [m / r for m in masses[:k]] if above else [m * r for m in masses[:k]]
        top = max(masses)
        if not _RESCALE_LO < top < _RESCALE_HI:
            masses[:] = [m / top for m in masses]
        if min(masses) < _FLOOR:
            masses[:] = [max(m, _FLOOR) for m in masses]
        self.updates += 1

    def weights(self) -> np.ndarray:
        """Normalized weights of all ``n + 1`` gaps."""
        dens = np.array(self.masses) / np.array(self.lengths)
        w = np.repeat(dens, self.lengths)
        return w / w.sum()


@dataclass(frozen=True)
class SearchOutcome:
    predecessor_index: int
    queries_used: int
    restarts: int = 0


def posterior_search(
    oracle: NoisyOracle, sorted_ids: Sequence[int], x: int, delta: float, tag: str = "search"
) -> SearchOutcome:
    """Find the gap of ``x`` among ``sorted_ids`` with error at most ``delta``.

    Returns the number of listed elements believed to be below ``x``.
    The list must already be sorted; that is not checked.
    """
    delta = _check_delta(delta, 0.5)
    n = len(sorted_ids)
    post = GapPosterior(n, oracle.p)
    compare = oracle.noisy_compare
    queries = 0
    while True:
        g = post.settled_gap(delta)
        if g is not None:
            return SearchOutcome(g, queries)
        j = post.split_point()
        above = compare(sorted_ids[j - 1], x, tag)
        queries += 1
        post.update(j, bool(above))


def search_estimate(n: int, p: float, delta: float) -> float:
    """Expected-query scale ``(log2 n + log2(1/delta)) / I(p)`` used to size restart caps."""
    return (math.log2(max(n, 1)) + math.log2(1 / delta)) / capacity(p)


def safe_binary_search(
    oracle: NoisyOracle, sorted_ids: Sequence[int], x: int, delta: float, tag: str = "search"
) -> SearchOutcome:
    """:func:`posterior_search` with each attempt capped at ``m log2 m`` queries."""
    delta = _check_delta(delta, 0.5)
    if not sorted_ids:
        return SearchOutcome(0, 0)
    start = oracle.total_queries
    m = search_estimate(len(sorted_ids), oracle.p, delta)
    out, restarts = restart_wrap(
        oracle, lambda: posterior_search(oracle, sorted_ids, x, delta, tag), m
    )
    return SearchOutcome(out.predecessor_index, oracle.total_queries - start, restarts)


def noisy_binary_search(
    oracle: NoisyOracle, sorted_ids: Sequence[int], x: int, delta: float, tag: str = "search"
) -> SearchOutcome:
    """Predecessor search with error ``delta`` at the optimal expected cost.

    For ``delta <= 1/log2 n`` a candidate gap is found with error
    ``1/log2 n`` and then confirmed by comparing ``x`` against both of its
    neighbours at error ``delta/4``; a failed confirmation restarts.  For
    larger ``delta`` the search gives up immediately with probability
    ``delta - 1/log2 n`` and otherwise runs the core search once.
    Lists shorter than 16 are treated as if padded to ``log2 n = 4``.
    """
    delta = _check_delta(delta)
    n = len(sorted_ids)
    if n == 0:
        return SearchOutcome(0, 0)
    coarse = 1.0 / max(math.log2(n), 4.0)
    start = oracle.total_queries
    if delta > coarse:
        if oracle.rng.random() < delta - coarse:
            return SearchOutcome(0, 0)
        out = posterior_search(oracle, sorted_ids, x, coarse, tag)
        return SearchOutcome(out.predecessor_index, oracle.total_queries - start)
    restarts = 0
    check = delta / 4
    while True:
        g = posterior_search(oracle, sorted_ids, x, coarse, tag).predecessor_index
        left = sorted_ids[g - 1] if g > 0 else NEG_INF
        right = sorted_ids[g] if g < n else POS_INF
        if less_than(oracle, left, x, check, tag) and less_than(oracle, x, right, check, tag):
            return SearchOutcome(g, oracle.total_queries - start, restarts)
        restarts += 1
        oracle.restarts += 1
