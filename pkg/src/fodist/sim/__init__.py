"""Counting statistics, exhaustive oracles, Monte Carlo and witness search."""

from .counters import (
    CountStats,
    brute_force_expectation,
    brute_force_factorial_moment,
    count_stats,
    count_X,
    count_Y,
    count_Z,
    pairwise_factorial_moment,
    reference_count,
    statistic,
    tuple_counted,
)
from .experiments import (
    ExperimentRecord,
    StatisticSentence,
    distinguishing_probability,
    monte_carlo,
    summarize_counts,
    summarize_pairs,
)
from .witness import (
    WitnessOutcome,
    find_witness,
    nonextendible_patterns,
    part2_witness,
    verify_witness,
)
