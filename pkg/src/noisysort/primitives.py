"""Pairwise comparison primitives and the closed-form constants around them."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, TypeVar

from .oracle import BudgetExceeded, NoisyOracle, check_p, sentinel_less

T = TypeVar("T")

# slack for ceilings of ratios that are integers in exact arithmetic
_CEIL_EPS = 1e-9


def _check_delta(delta: float, hi: float = 1.0) -> float:
    if not (0.0 < delta < hi):
        raise ValueError(f"error probability must lie in (0, {hi}), got {delta!r}")
    return float(delta)


def binary_entropy(p: float) -> float:
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def capacity(p: float) -> float:
    """BSC capacity ``I(p) = 1 - h(p)`` in bits per query."""
    return 1.0 - binary_entropy(p)


def walk_rate(p: float) -> float:
    """Expected log-odds gain per query, ``(1-2p) log2((1-p)/p)``."""
    return (1 - 2 * p) * math.log2((1 - p) / p)


@dataclass(frozen=True)
class ConstantsRecord:
    p: float
    h_p: float
    capacity: float
    walk_rate: float
    sort_constant: float
    lower_only: float
    prior_upper: float


def constants(p: float) -> ConstantsRecord:
    """All constants in front of ``n log2 n`` for crossover probability ``p``."""
    p = check_p(p)
    cap = capacity(p)
    rate = walk_rate(p)
    return ConstantsRecord(
        p=p,
        h_p=binary_entropy(p),
        capacity=cap,
        walk_rate=rate,
        sort_constant=1 / cap + 1 / rate,
        lower_only=1 / cap,
        prior_upper=2 / math.log2(1 / (0.5 + math.sqrt(p * (1 - p)))),
    )


def threshold_steps(p: float, delta: float) -> int:
    """Net log-odds steps needed before the posterior leaves ``(delta, 1-delta)``."""
    ratio = math.log2((1 - delta) / delta) / math.log2((1 - p) / p)
    return math.ceil(ratio - _CEIL_EPS)


def f_p(p: float, delta: float) -> float:
    """Expected-query bound for one comparison at error ``delta``.

    ``ceil(log((1-delta)/delta) / log((1-p)/p)) / (1-2p)``; clipped at zero
    for ``delta >= 1/2`` where the ceiling goes negative.
    """
    p = check_p(p)
    delta = _check_delta(delta)
    return max(0, threshold_steps(p, delta)) / (1 - 2 * p)


def search_target(n: int, p: float, delta: float) -> float:
    """Optimal expected queries for predecessor search among ``n`` sorted items.

    ``(1-delta) log2(n)/I(p) + 2 log2(1/delta)/((1-2p) log2((1-p)/p))``.
    """
    p = check_p(p)
    delta = _check_delta(delta)
    return (1 - delta) * math.log2(n) / capacity(p) + 2 * math.log2(1 / delta) / walk_rate(p)


def search_floor(n: int, p: float, delta: float) -> float:
    """Information-theoretic floor ``(1-delta) log2(n)/I(p)``."""
    p = check_p(p)
    delta = _check_delta(delta)
    return (1 - delta) * math.log2(n) / capacity(p)


@dataclass
class PosteriorOdds:
    """Posterior that ``x < y`` kept as integer counts of up/down answers.

    The log-odds is ``(steps_up - steps_down) * log((1-p)/p)``, so it stays
    an exact multiple of the step size and never drifts.
    """

    p: float
    steps_up: int = 0
    steps_down: int = 0

    @property
    def net(self) -> int:
        return self.steps_up - self.steps_down

    @property
    def queries(self) -> int:
        return self.steps_up + self.steps_down

    @property
    def log_odds_bits(self) -> float:
        return self.net * math.log2((1 - self.p) / self.p)

    @property
    def posterior(self) -> float:
        return 1.0 / (1.0 + ((1 - self.p) / self.p) ** -self.net)

    def update(self, answer: int) -> None:
        if answer:
            self.steps_up += 1
        else:
            self.steps_down += 1


def less_than_trace(
    oracle: NoisyOracle, x: int, y: int, delta: float, tag: str = "less-than"
) -> PosteriorOdds:
    """Run the sequential posterior test and return its final state."""
    delta = _check_delta(delta, 0.5)
    s = threshold_steps(oracle.p, delta)
    odds = PosteriorOdds(oracle.p)
    up = down = 0
    compare = oracle.noisy_compare
    while up - down < s and down - up < s:
        if compare(x, y, tag):
            up += 1
        else:
            down += 1
    odds.steps_up, odds.steps_down = up, down
    return odds


def less_than(oracle: NoisyOracle, x, y, delta: float, tag: str = "less-than") -> bool:
    """Decide ``x < y`` with error at most ``delta``.

    Keeps the posterior ``a`` that ``x < y`` starting from 1/2, applies the
    Bayes update after each noisy answer, and stops once ``a >= 1-delta``
    (true) or ``a <= delta`` (false).  Expected cost is at most
    ``f_p(p, delta)`` queries.  Infinite sentinels are resolved without a
    query.
    """
    known = sentinel_less(x, y)
    if known is not None:
        _check_delta(delta, 0.5)
        return known
    return less_than_trace(oracle, x, y, delta, tag).net > 0


def majority_compare(oracle: NoisyOracle, x: int, y: int, t: int, tag: str = "majority") -> bool:
    """Majority vote over exactly ``t`` (odd) noisy queries."""
    if t < 1 or t % 2 == 0:
        raise ValueError(f"repetition count must be odd and positive, got {t!r}")
    ones = sum(oracle.noisy_compare(x, y, tag) for _ in range(t))
    return 2 * ones > t


def majority_error(p: float, t: int) -> float:
    """Exact error of the ``t``-fold majority vote, ``P[Binomial(t, p) > t/2]``."""
    if t < 1 or t % 2 == 0:
        raise ValueError(f"repetition count must be odd and positive, got {t!r}")
    return sum(math.comb(t, k) * p**k * (1 - p) ** (t - k) for k in range(t // 2 + 1, t + 1))


def majority_repetitions(p: float, delta: float) -> int:
    """Smallest odd ``t`` whose majority vote errs with probability ``<= delta``."""
    t = 1
    while majority_error(p, t) > delta:
        t += 2
    return t


def restart_budget(m: float) -> int:
    """Per-attempt query cap ``k = ceil(m log2 m)``, floored at ``ceil(2m)`` for m < 2."""
    if m >= 2:
        return math.ceil(m * math.log2(m) - _CEIL_EPS)
    return max(math.ceil(2 * m), 1)


def restart_wrap(
    oracle: NoisyOracle, attempt: Callable[[], T], m: float, max_restarts: int | None = None
) -> tuple[T, int]:
    """Run ``attempt`` under a cap of ``restart_budget(m)`` queries, restarting on overflow.

    Each restart starts over with whatever channel noise and algorithm
    randomness come next.  Returns ``(result, restarts)``.  Budgets opened by
    enclosing code take precedence and propagate.
    """
    k = restart_budget(m)
    restarts = 0
    while True:
        try:
            with oracle.budget(k) as mine:
                return attempt(), restarts
        except BudgetExceeded as exc:
            if exc.budget is not mine:
                raise
        restarts += 1
        oracle.restarts += 1
        if max_restarts is not None and restarts > max_restarts:
            raise RuntimeError(f"attempt overflowed its budget {restarts} times")


def safe_less_than(oracle: NoisyOracle, x, y, delta: float, tag: str = "less-than") -> bool:
    """:func:`less_than` with every attempt capped at ``restart_budget(f_p(delta))`` queries."""
    known = sentinel_less(x, y)
    if known is not None:
        _check_delta(delta, 0.5)
        return known
    m = f_p(oracle.p, _check_delta(delta, 0.5))
    verdict, _ = restart_wrap(oracle, lambda: less_than_trace(oracle, x, y, delta, tag).net > 0, m)
    return verdict
