"""Optimal noisy sorting and noisy binary search against a simulated comparison channel."""
from .oracle import NEG_INF, POS_INF, BudgetExceeded, NoisyOracle, QueryLedger
from .primitives import (
    ConstantsRecord,
    PosteriorOdds,
    constants,
    f_p,
    less_than,
    majority_compare,
    restart_wrap,
    safe_less_than,
)
from .search import GapPosterior, SearchOutcome, noisy_binary_search, posterior_search, safe_binary_search
from .sort import (
    BucketPlan,
    noisy_sort,
    safe_noisy_sort,
    safe_simple_sort,
    safe_weak_sort,
    simple_sort,
    sort_inversion,
    weak_sort,
)

__all__ = [
    "NEG_INF", "POS_INF", "BudgetExceeded", "NoisyOracle", "QueryLedger",
    "ConstantsRecord", "PosteriorOdds", "constants", "f_p", "less_than", "majority_compare",
    "restart_wrap", "safe_less_than",
    "GapPosterior", "SearchOutcome", "noisy_binary_search", "posterior_search", "safe_binary_search",
    "BucketPlan", "noisy_sort", "safe_noisy_sort", "safe_simple_sort", "safe_weak_sort",
    "simple_sort", "sort_inversion", "weak_sort",
]
