"""Monte Carlo benchmark harness.

Each trial gets its own seed (derived from the master seed and the trial
index), its own oracle over a uniformly random hidden permutation, and runs
one algorithm.  Trial reports are merged into an :class:`Aggregate` whose
values do not depend on trial order or on how many worker processes ran them.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import binomtest

from .oracle import NoisyOracle, check_p
from .primitives import (
    constants,
    f_p,
    less_than,
    majority_compare,
    majority_repetitions,
    search_floor,
    search_target,
)
from .search import noisy_binary_search
from .sort import DEFAULT_C1, DEFAULT_C2, noisy_sort, safe_noisy_sort, simple_sort, weak_sort

SORTS = ("noisy-sort", "safe-noisy-sort", "weak-sort", "simple-sort")
ALGORITHMS = SORTS + ("binary-search", "less-than", "majority-baseline")
NEEDS_DELTA = ("weak-sort", "simple-sort", "binary-search", "less-than", "majority-baseline")

CSV_COLUMNS = (
    "algorithm", "n", "p", "delta", "trials", "error_rate", "error_ci_lo", "error_ci_hi",
    "mean_queries", "std_queries", "p95_queries", "ratio_nlogn", "mean_restarts",
    "seed", "c1", "c2",
)


@dataclass(frozen=True)
class BenchConfig:
    algorithm: str
    n: int
    p: float
    delta: float | None = None
    trials: int = 1
    seed: int = 0
    c1: float = DEFAULT_C1
    c2: float = DEFAULT_C2

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.algorithm in ("less-than", "majority-baseline") and self.n < 2:
            raise ValueError(f"{self.algorithm} needs n >= 2")
        check_p(self.p)
        if self.algorithm in NEEDS_DELTA:
            if self.delta is None:
                raise ValueError(f"{self.algorithm} needs --delta")
            hi = 0.5 if self.algorithm == "less-than" else 1.0
            if not 0 < self.delta < hi:
                raise ValueError(f"delta must lie in (0, {hi}) for {self.algorithm}")
        if self.c1 <= 0 or self.c2 < 1:
            raise ValueError("c1 must be positive and c2 at least 1")


@dataclass
class TrialReport:
    seed: int
    n: int
    p: float
    delta: float | None
    algorithm: str
    correct: bool
    queries_total: int
    queries_by_tag: dict[str, int]
    restarts: int
    wall_nanos: int
    overflows: int = 0  # hard-cap overflows (safe sorts), each counted as an error


def trial_seed(master: int, index: int) -> int:
    """64-bit seed of trial ``index``; independent of how trials are scheduled."""
    ss = np.random.SeedSequence(master, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def run_trial(config: BenchConfig, index: int) -> TrialReport:
    seed = trial_seed(config.seed, index)
    t0 = time.perf_counter_ns()
    n, p, delta, alg = config.n, config.p, config.delta, config.algorithm
    if alg == "binary-search":
        # element n is the target; its rank among n + 1 is uniform
        oracle = NoisyOracle.random(n + 1, p, seed)
        listed = oracle.sorted_truth(range(n))
        out = noisy_binary_search(oracle, listed, n, delta)
        correct = out.predecessor_index == oracle.rank(n)
    elif alg in ("less-than", "majority-baseline"):
        oracle = NoisyOracle.random(n, p, seed)
        truth = oracle.rank(0) < oracle.rank(1)
        if alg == "less-than":
            verdict = less_than(oracle, 0, 1, delta)
        else:
            verdict = majority_compare(oracle, 0, 1, majority_repetitions(p, delta))
        correct = verdict == truth
    else:
        oracle = NoisyOracle.random(n, p, seed)
        ids = list(range(n))
        if alg == "noisy-sort":
            out = noisy_sort(oracle, ids, config.c1)
        elif alg == "safe-noisy-sort":
            out = safe_noisy_sort(oracle, ids, config.c1, config.c2)
        elif alg == "weak-sort":
            out = weak_sort(oracle, ids, delta)
        else:
            out = simple_sort(oracle, ids, delta)
        correct = oracle.overflows == 0 and sorted(out) == ids and oracle.is_sorted(out)
    ledger = oracle.ledger_snapshot()
    return TrialReport(
        seed=seed,
        n=n,
        p=p,
        delta=delta,
        algorithm=alg,
        correct=bool(correct),
        queries_total=ledger.total,
        queries_by_tag=dict(ledger.by_tag),
        restarts=oracle.restarts,
        wall_nanos=time.perf_counter_ns() - t0,
        overflows=oracle.overflows,
    )


def reference_scale(config: BenchConfig) -> float:
    """What ``mean_queries`` is divided by in the ``ratio_nlogn`` column.

    ``n log2 n`` for the sorts, the optimal search cost for binary search,
    and ``f_p(delta)`` for a single comparison.
    """
    n, p, delta = config.n, config.p, config.delta
    if config.algorithm in SORTS:
        return n * math.log2(n)
    if config.algorithm == "binary-search":
        return search_target(n, p, delta) if n > 1 else math.nan
    return f_p(p, delta)


@dataclass
class Aggregate:
    config: BenchConfig
    errors: int
    error_rate: float
    error_ci_lo: float
    error_ci_hi: float
    mean_queries: float
    std_queries: float
    p95_queries: float
    ratio_nlogn: float
    mean_restarts: float
    mean_queries_by_tag: dict[str, float]
    reports: list[TrialReport] = field(default_factory=list, repr=False)

    def row(self) -> dict:
        c = self.config
        return {
            "algorithm": c.algorithm,
            "n": c.n,
            "p": c.p,
            "delta": c.delta,
            "trials": c.trials,
            "error_rate": self.error_rate,
            "error_ci_lo": self.error_ci_lo,
            "error_ci_hi": self.error_ci_hi,
            "mean_queries": self.mean_queries,
            "std_queries": self.std_queries,
            "p95_queries": self.p95_queries,
            "ratio_nlogn": self.ratio_nlogn,
            "mean_restarts": self.mean_restarts,
            "seed": c.seed,
            "c1": c.c1,
            "c2": c.c2,
        }


def aggregate(config: BenchConfig, reports: Iterable[TrialReport]) -> Aggregate:
    """Merge trial reports; the result does not depend on their order."""
    reports = sorted(reports, key=lambda r: r.seed)
    k = len(reports)
    if k == 0:
        raise ValueError("no trial reports to aggregate")
    errors = sum(not r.correct for r in reports)
    ci = binomtest(errors, k).proportion_ci(0.95, method="wilson")
    q = np.sort(np.array([r.queries_total for r in reports], dtype=np.int64))
    mean = int(q.sum()) / k
    scale = reference_scale(config)
    tags: dict[str, int] = {}
    for r in reports:
        for tag, count in r.queries_by_tag.items():
            tags[tag] = tags.get(tag, 0) + count
    return Aggregate(
        config=config,
        errors=errors,
        error_rate=errors / k,
        error_ci_lo=float(ci.low),
        error_ci_hi=float(ci.high),
        mean_queries=mean,
        std_queries=float(q.std(ddof=1)) if k > 1 else 0.0,
        p95_queries=float(np.percentile(q, 95)),
        ratio_nlogn=mean / scale if scale else math.nan,
        mean_restarts=sum(r.restarts for r in reports) / k,
        mean_queries_by_tag={t: c / k for t, c in sorted(tags.items())},
        reports=reports,
    )


def run_trials(config: BenchConfig, parallel: int = 1) -> Aggregate:
    """Run ``config.trials`` independent trials and aggregate them.

    ``parallel > 1`` spreads trials over worker processes; the aggregate is
    identical either way (wall times aside).
    """
    indices = range(config.trials)
    if parallel > 1 and config.trials > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            reports = list(pool.map(run_trial, [config] * config.trials, indices))
    else:
        reports = [run_trial(config, i) for i in indices]
    return aggregate(config, reports)


def report_constants(p: float, delta: float | None = None, n: int | None = None) -> dict:
    """Constants record for ``p`` plus, given ``delta`` and ``n``, the search targets."""
    rec = asdict(constants(p))
    if delta is not None and n is not None:
        rec["search_floor"] = search_floor(n, p, delta)
        rec["search_target"] = search_target(n, p, delta)
        rec["f_p"] = f_p(p, delta)
    elif delta is not None:
        rec["f_p"] = f_p(p, delta)
    return rec


def format_constants(rec: dict) -> str:
    return "".join(f"{k}={v!r}\n" for k, v in rec.items())


def _cell(v):
    return "" if v is None else v


def to_csv(aggregates: Sequence[Aggregate]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for agg in aggregates:
        row = agg.row()
        writer.writerow([_cell(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def to_json(aggregates: Sequence[Aggregate], per_trial: bool = False) -> str:
    out = []
    for agg in aggregates:
        obj = agg.row()
        obj["mean_queries_by_tag"] = agg.mean_queries_by_tag
        if per_trial:
            obj["per_trial"] = [asdict(r) for r in agg.reports]
        out.append(obj)
    return json.dumps(out, indent=2) + "\n"


def emit(aggregates: Sequence[Aggregate], fmt: str = "csv", path=None, per_trial: bool = False) -> str:
    """Render aggregates as CSV or JSON; write to ``path`` when given.

    Floats use Python's shortest round-trip repr.  Raises ``OSError`` when
    the path cannot be written.
    """
    if not aggregates:
        raise ValueError("nothing to emit")
    if fmt == "csv":
        text = to_csv(aggregates)
    elif fmt == "json":
        text = to_json(aggregates, per_trial)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def read_csv(text: str) -> list[dict]:
    """Parse CSV produced by :func:`to_csv` back into typed rows."""
    ints = {"n", "trials", "seed"}
    rows = []
    for raw in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in raw.items():
            if k == "algorithm":
                row[k] = v
            elif v == "":
                row[k] = None
            else:
                row[k] = int(v) if k in ints else float(v)
        rows.append(row)
    return rows
