"""Differential evolution with fixed, randomly dealt per-individual strategies."""

__version__ = "0.1.0"

from .algorithms import Budget, BudgetKind, RunResult, run_canonical_de, run_fixed_distribution, run_istratde
from .benchmarks import BenchmarkProblem, FunctionId, evaluate, make_problem, round_reported
from .core import (
    ELITE_DISTRIBUTION,
    POOL,
    BaseVectorKind,
    CrossoverKind,
    Population,
    StrategyConfig,
    StrategyDistribution,
    enumerate_pool,
    init_population,
    sample_strategy,
)
from .diagnostics import RankSumReport, RunTrace, Verdict, elitism_proportion, normalized_ranks, summarize, wilcoxon_rank_sum
from .engine import RngStream, derive_stream, evaluate_population

from .harness import ExperimentSpec, compare_experiments, pool_census, population_scaling_sweep, run_experiment
