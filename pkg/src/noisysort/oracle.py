"""Noisy comparison oracle: a binary symmetric channel over a hidden total order.

Every comparison an algorithm makes goes through :class:`NoisyOracle`, which
flips the true answer with probability ``p``, counts the query under a caller
tag, and enforces any active query budgets.  Element ids are the dense
integers ``0..n-1``; ``truth_rank[i]`` is the hidden rank of element ``i``.

An oracle belongs to a single trial and is not safe to share between threads.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

NEG_INF = float("-inf")
POS_INF = float("inf")

_NOISE_BLOCK = 4096


class BudgetExceeded(Exception):
    """A query was refused because it would overrun an active budget."""

    def __init__(self, budget: "Budget"):
        super().__init__(f"query budget exhausted at {budget.limit} queries")
        self.budget = budget


@dataclass(eq=False)
class Budget:
    limit: int  # ledger total at which further queries are refused


@dataclass(frozen=True)
class QueryLedger:
    """Immutable snapshot of an oracle's counters."""

    total: int = 0
    by_tag: Mapping[str, int] = field(default_factory=dict)
    random_bits_extracted: int = 0

    def merge(self, other: "QueryLedger") -> "QueryLedger":
        tags = dict(self.by_tag)
        for tag, count in other.by_tag.items():
            tags[tag] = tags.get(tag, 0) + count
        return QueryLedger(
            self.total + other.total,
            dict(sorted(tags.items())),
            self.random_bits_extracted + other.random_bits_extracted,
        )

    def __sub__(self, other: "QueryLedger") -> "QueryLedger":
        tags = {t: c - other.by_tag.get(t, 0) for t, c in self.by_tag.items()}
        return QueryLedger(
            self.total - other.total,
            {t: c for t, c in tags.items() if c},
            self.random_bits_extracted - other.random_bits_extracted,
        )


def check_p(p: float) -> float:
    if not (isinstance(p, (int, float)) and 0.0 < p < 0.5):
        raise ValueError(f"crossover probability must lie in (0, 1/2), got {p!r}")
    return float(p)


class NoisyOracle:
    """Answers ``1{rank(x) < rank(y)}`` through a BSC with crossover ``p``.

    Parameters
    ----------
    truth_rank : sequence of int
        ``truth_rank[i]`` is the rank of element ``i``; must be a permutation
        of ``0..n-1``.
    p : float
        Crossover probability in the open interval (0, 1/2).
    seed : int or numpy.random.SeedSequence
        Master seed.  It is split into independent streams for channel noise
        and for algorithm randomness (``oracle.rng``).
    """

    def __init__(self, truth_rank: Sequence[int], p: float, seed=0):
        self.p = check_p(p)
        arr = np.asarray(truth_rank)
        if arr.ndim != 1 or (arr.size and arr.dtype.kind not in "iu"):
            raise ValueError("truth_rank must be a one-dimensional sequence of integers")
        if not np.array_equal(np.sort(arr), np.arange(arr.size)):
            raise ValueError("truth_rank must be a permutation of 0..n-1")
        self._rank_array = arr
        self._rank = arr.tolist()
        self.n = int(arr.size)
        ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        noise_ss, algo_ss = ss.spawn(2)
        self._noise = np.random.Generator(np.random.PCG64(noise_ss))
        self.rng = np.random.Generator(np.random.PCG64(algo_ss))
        self._flips: list[bool] = []
        self._pos = 0

        self._total = 0
        self._by_tag: dict[str, int] = {}
        self._random_bits = 0
        self._budgets: list[Budget] = []
        self._limit = math.inf
        # trial-level event counters, outside the query ledger
        self.restarts = 0
        self.overflows = 0

    @classmethod
    def random(cls, n: int, p: float, seed=0) -> "NoisyOracle":
        """Oracle over a uniformly random hidden permutation of ``n`` ids.

        The permutation comes from a third seed stream, independent of the
        channel noise and of the algorithm stream.
        """
        ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        oracle_ss, instance_ss = ss.spawn(2)
        rank = np.random.default_rng(instance_ss).permutation(n)
        return cls(rank, p, oracle_ss)

    # -- ground truth (never consulted by the algorithms) -------------------
    def rank(self, x: int) -> int:
        return self._rank[x]

    def sorted_truth(self, ids: Sequence[int]) -> list[int]:
        ids = np.fromiter(ids, dtype=np.int64)
        return ids[np.argsort(self._rank_array[ids], kind="stable")].tolist()

    def is_sorted(self, ids: Sequence[int]) -> bool:
        r = self._rank
        return all(r[a] < r[b] for a, b in zip(ids, ids[1:]))

    def true_predecessor(self, sorted_ids: Sequence[int], x: int) -> int:
        """Number of listed elements below ``x`` (its gap index)."""
        rx = self._rank[x]
        return sum(1 for a in sorted_ids if self._rank[a] < rx)

    # -- queries ------------------------------------------------------------
    def noisy_compare(self, x: int, y: int, tag: str = "compare") -> int:
        """One noisy query: returns ``1{x < y}`` flipped with probability p."""
        if x == y:
            raise ValueError(f"cannot compare element {x!r} with itself")
        n = self.n
        if not (0 <= x < n and 0 <= y < n):
            raise ValueError(f"element ids must lie in 0..{n - 1}, got {x!r}, {y!r}")
        if self._total >= self._limit:
            self._refuse()
        self._total += 1
        self._by_tag[tag] = self._by_tag.get(tag, 0) + 1
        i = self._pos
        if i >= len(self._flips):
            self._flips = (self._noise.random(_NOISE_BLOCK) < self.p).tolist()
            i = 0
        self._pos = i + 1
        return 1 if (self._rank[x] < self._rank[y]) != self._flips[i] else 0

    def extract_random_bit(self, x: int, y: int, tag: str = "random-bits") -> int:
        """Unbiased coin from channel noise.

        Query the pair twice; if the answers differ, return the first,
        otherwise try again.  Costs ``1/(p(1-p))`` queries on average.
        """
        while True:
            a = self.noisy_compare(x, y, tag)
            b = self.noisy_compare(x, y, tag)
            if a != b:
                self._random_bits += 1
                return a

    def ledger_snapshot(self) -> QueryLedger:
        return QueryLedger(self._total, dict(sorted(self._by_tag.items())), self._random_bits)

    @property
    def total_queries(self) -> int:
        return self._total

    # -- budgets ------------------------------------------------------------
    @contextmanager
    def budget(self, k: int) -> Iterator[Budget]:
        """Refuse any query beyond the next ``k`` while the block is active.

        Budgets nest; when several are exhausted at once the outermost one is
        reported, so an enclosing hard cap always wins over an inner restart.
        """
        b = Budget(self._total + max(0, int(k)))
        self._budgets.append(b)
        self._limit = min(self._limit, b.limit)
        try:
            yield b
        finally:
            self._budgets.remove(b)
            self._limit = min((x.limit for x in self._budgets), default=math.inf)

    def _refuse(self) -> None:
        for b in self._budgets:
            if self._total >= b.limit:
                raise BudgetExceeded(b)
        raise AssertionError("query limit out of sync with active budgets")


def noisy_compare(oracle: NoisyOracle, x: int, y: int, tag: str = "compare") -> int:
    return oracle.noisy_compare(x, y, tag)


def extract_random_bit(oracle: NoisyOracle, x: int, y: int) -> int:
    return oracle.extract_random_bit(x, y)


def ledger_snapshot(oracle: NoisyOracle) -> QueryLedger:
    return oracle.ledger_snapshot()


def sentinel_less(x, y) -> bool | None:
    """Resolve ``x < y`` exactly when either side is an infinite sentinel."""
    if x == NEG_INF or y == POS_INF:
        return x != y
    if x == POS_INF or y == NEG_INF:
        return False
    return None
