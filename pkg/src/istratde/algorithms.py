"""Generation loops: canonical DE/rand/1/bin and fixed per-individual strategy DE.

Updates are synchronous: every individual of generation ``g`` reproduces from
the same snapshot of the population, and replacements are committed together
once the whole generation has been evaluated. Each reproduction event draws
its randomness from the counter-based stream ``(seed, g, i)``, so a
generation computed here in one vectorized pass matches the per-individual
operators in :mod:`istratde.operators` exactly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (
    MIN_POPULATION,
    BaseVectorKind,
    CrossoverKind,
    Population,
    StrategyConfig,
    StrategyDistribution,
    check_bounds,
    init_population,
    initial_vectors,
    strategy_hash,
)
from .diagnostics import RunTrace, elitism_proportion, normalized_ranks
from .engine import Lane, counter_uniforms, evaluate_population
from .errors import BudgetExhaustedBeforeInit, PopulationTooSmall
from .operators import pbest_count

__all__ = [
    "BudgetKind",
    "Budget",
    "RunResult",
    "StrategyArrays",
    "distinct_indices",
    "istratde_generation",
    "canonical_generation",
    "run_canonical_de",
    "run_istratde",
    "run_fixed_distribution",
]

ELITE_EPSILON = 1e-8


class BudgetKind(str, Enum):
    MAX_EVALUATIONS = "max_evaluations"
    MAX_GENERATIONS = "max_generations"


@dataclass(frozen=True)
class Budget:
    """Stopping rule. Evaluation budgets count the initial population."""

    kind: BudgetKind
    limit: int

    def __post_init__(self):
        object.__setattr__(self, "kind", BudgetKind(self.kind))
        if self.kind is BudgetKind.MAX_EVALUATIONS and self.limit < 1:
            raise ValueError("evaluation budget must be >= 1")
        if self.limit < 0:
            raise ValueError("generation budget must be >= 0")

    @classmethod
    def evaluations(cls, limit: int) -> "Budget":
        return cls(BudgetKind.MAX_EVALUATIONS, int(limit))

    @classmethod
    def generations(cls, limit: int) -> "Budget":
        return cls(BudgetKind.MAX_GENERATIONS, int(limit))

    def generations_for(self, n: int) -> int:
        """Whole generations that fit; a generation only runs if all N evaluations fit."""
        if self.kind is BudgetKind.MAX_GENERATIONS:
            return self.limit
        if self.limit < n:
            raise BudgetExhaustedBeforeInit(f"budget of {self.limit} evaluations cannot cover the initial {n}")
        return (self.limit - n) // n

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "limit": self.limit}


@dataclass
class RunResult:
    best_vector: np.ndarray
    best_value: float
    trace: RunTrace
    evaluations_used: int
    generations_used: int
    population: Population
    initial_strategy_hash: str = ""
    wall_clock_seconds: float = field(default=0.0, compare=False)

    @property
    def final_strategy_hash(self) -> str:
        return strategy_hash(self.population.strategies)


@dataclass(frozen=True)
class StrategyArrays:
    """Column view of a population's strategies for vectorized reproduction."""

    bl: np.ndarray
    br: np.ndarray
    dn: np.ndarray
    cs: np.ndarray
    f: np.ndarray
    cr: np.ndarray

    @classmethod
    def from_strategies(cls, strategies: Sequence[StrategyConfig]) -> "StrategyArrays":
        cols = np.array([(s.bl, s.br, s.dn, s.cs) for s in strategies], dtype=np.int64).reshape(-1, 4)
        params = np.array([(s.f, s.cr) for s in strategies], dtype=np.float64).reshape(-1, 2)
        return cls(cols[:, 0], cols[:, 1], cols[:, 2], cols[:, 3], params[:, 0].copy(), params[:, 1].copy())

    @property
    def max_draws(self) -> int:
        rand = (self.bl == BaseVectorKind.RAND).astype(np.int64) + (self.br == BaseVectorKind.RAND)
        return int(np.max(rand + 2 * self.dn))


def distinct_indices(u: np.ndarray, n: int) -> np.ndarray:
    """Row-wise sampling without replacement, excluding each row's own index.

    Draw ``t`` of row ``i`` takes the ``floor(u[i, t] * (n - 1 - t))``-th
    smallest index not yet used (the row index counts as used). This is the
    same rule :func:`istratde.operators.draw_distinct` applies one draw at a
    time.
    """
    rows, k = u.shape
    if n - 1 < k:
        raise PopulationTooSmall(f"cannot draw {k} distinct partners from a population of {n}")
    taken = np.empty((rows, k + 1), dtype=np.int64)
    taken[:, 0] = np.arange(rows)
    for t in range(k):
        r = (u[:, t] * (n - 1 - t)).astype(np.int64)
        used = np.sort(taken[:, : t + 1], axis=1)
        for c in range(t + 1):
            r += r >= used[:, c]
        taken[:, t + 1] = r
    return taken[:, 1:]


def _binomial_mask(uc: np.ndarray, cr: np.ndarray) -> np.ndarray:
    n, d = uc.shape[0], uc.shape[1] - 1
    start = (uc[:, 0] * d).astype(np.int64)
    take = uc[:, 1:] <= cr[:, None]
    take[np.arange(n), start] = True
    return take


def _exponential_mask(uc: np.ndarray, cr: np.ndarray) -> np.ndarray:
    d = uc.shape[1] - 1
    start = (uc[:, 0] * d).astype(np.int64)
    extend = uc[:, 1:d] <= cr[:, None]
    length = 1 + np.cumprod(extend, axis=1).sum(axis=1)
    offset = (np.arange(d)[None, :] - start[:, None]) % d
    return offset < length[:, None]


def _select(pop: Population, trials: np.ndarray, problem, parallelism) -> Population:
    fu = evaluate_population(problem, trials, parallelism)
    replace = fu <= pop.fitness
    vectors = np.where(replace[:, None], trials, pop.vectors)
    fitness = np.where(replace, fu, pop.fitness)
    return Population(vectors, fitness, pop.strategies, pop.generation + 1)


def istratde_generation(
    pop: Population,
    arrays: StrategyArrays,
    problem,
    seed: int,
    parallelism: Optional[int] = None,
) -> Population:
    """Advance a fixed-strategy population by one synchronous generation."""
    x, fit = pop.vectors, pop.fitness
    n, d = x.shape
    g = pop.generation
    rows = np.arange(n)
    col = rows[:, None]

    picks = distinct_indices(counter_uniforms(seed, g, col, Lane.INDEX, np.arange(arrays.max_draws)), n)
    up = counter_uniforms(seed, g, col, Lane.PBEST, np.arange(2))
    best = int(np.argmin(fit))
    top = np.argsort(fit, kind="stable")[: pbest_count(n)]

    pos = np.zeros(n, dtype=np.int64)

    def base(kind: np.ndarray, pbest_u: np.ndarray) -> np.ndarray:
        idx = np.where(kind == BaseVectorKind.CURRENT, rows, best)
        idx = np.where(kind == BaseVectorKind.PBEST, top[(pbest_u * top.size).astype(np.int64)], idx)
        is_rand = kind == BaseVectorKind.RAND
        idx = np.where(is_rand, picks[rows, np.minimum(pos, picks.shape[1] - 1)], idx)
        pos[:] += is_rand
        return idx

    bl = base(arrays.bl, up[:, 0])
    # br's pbest pick uses the next PBEST draw when bl already used one
    br = base(arrays.br, up[rows, (arrays.bl == BaseVectorKind.PBEST).astype(np.int64)])

    last = picks.shape[1] - 1
    acc = x[picks[rows, pos]] - x[picks[rows, pos + 1]]
    for k in range(1, 4):
        active = arrays.dn > k
        if not np.any(active):
            break
        a = picks[rows, np.minimum(pos + 2 * k, last)]
        b = picks[rows, np.minimum(pos + 2 * k + 1, last)]
        acc = np.where(active[:, None], acc + (x[a] - x[b]), acc)

    f = arrays.f[:, None]
    v = x[bl] + f * (x[br] - x[bl]) + f * acc

    uc = counter_uniforms(seed, g, col, Lane.CROSSOVER, np.arange(d + 1))
    trials = np.where(_binomial_mask(uc, arrays.cr), v, x)
    is_exp = arrays.cs == CrossoverKind.EXPONENTIAL
    if np.any(is_exp):
        trials = np.where(is_exp[:, None], np.where(_exponential_mask(uc, arrays.cr), v, x), trials)
    is_arith = arrays.cs == CrossoverKind.ARITHMETIC
    if np.any(is_arith):
        alpha = uc[:, :1]
        trials = np.where(is_arith[:, None], alpha * v + (1.0 - alpha) * x, trials)

    lb, ub = check_bounds(problem)
    trials = np.minimum(np.maximum(trials, lb), ub)
    return _select(pop, trials, problem, parallelism)


def canonical_generation(
    pop: Population,
    problem,
    f: float,
    cr: float,
    seed: int,
    parallelism: Optional[int] = None,
) -> Population:
    """One synchronous generation of DE/rand/1/bin."""
    x = pop.vectors
    n, d = x.shape
    col = np.arange(n)[:, None]
    r = distinct_indices(counter_uniforms(seed, pop.generation, col, Lane.INDEX, np.arange(3)), n)
    v = x[r[:, 0]] + f * (x[r[:, 1]] - x[r[:, 2]])
    uc = counter_uniforms(seed, pop.generation, col, Lane.CROSSOVER, np.arange(d + 1))
    trials = np.where(_binomial_mask(uc, np.full(n, cr)), v, x)
    lb, ub = check_bounds(problem)
    trials = np.minimum(np.maximum(trials, lb), ub)
    return _select(pop, trials, problem, parallelism)


def _drive(
    problem,
    pop: Population,
    step: Callable[[Population], Population],
    generations: int,
    track: int,
) -> RunResult:
    t0 = time.perf_counter()
    n = pop.size
    opt = float(getattr(problem, "optimum_value", 0.0))
    tracked = np.arange(min(track, n))
    trace = RunTrace()
    best_i = int(np.argmin(pop.fitness))
    best_value = float(pop.fitness[best_i])
    best_vector = pop.vectors[best_i].copy()
    evaluations = n

    def snapshot(p: Population):
        trace.record(p.generation, best_value, evaluations, elitism_proportion(p.fitness, opt, ELITE_EPSILON))
        if tracked.size:
            trace.rank_snapshots.append((p.generation, normalized_ranks(p.fitness, tracked)))

    snapshot(pop)
    initial_hash = strategy_hash(pop.strategies)
    for _ in range(generations):
        pop = step(pop)
        evaluations += n
        i = int(np.argmin(pop.fitness))
        if pop.fitness[i] < best_value:
            best_value = float(pop.fitness[i])
            best_vector = pop.vectors[i].copy()
        snapshot(pop)
    return RunResult(
        best_vector=best_vector,
        best_value=best_value,
        trace=trace,
        evaluations_used=evaluations,
        generations_used=generations,
        population=pop,
        initial_strategy_hash=initial_hash,
        wall_clock_seconds=time.perf_counter() - t0,
    )


def run_canonical_de(
    problem,
    n: int,
    f: float,
    cr: float,
    budget: Budget,
    seed: int,
    *,
    workers: Optional[int] = None,
    track: int = 0,
) -> RunResult:
    """Classic DE/rand/1/bin with population-wide F and CR."""
    if n < 4:
        raise PopulationTooSmall(f"DE/rand/1 needs at least 4 individuals, got {n}")
    if not (0.0 <= f <= 2.0 and 0.0 <= cr <= 1.0):
        raise ValueError(f"need F in [0, 2] and CR in [0, 1], got F={f}, CR={cr}")
    generations = budget.generations_for(n)
    x = initial_vectors(problem, n, seed)
    pop = Population(x, evaluate_population(problem, x, workers), None, 0)
    return _drive(problem, pop, lambda p: canonical_generation(p, problem, f, cr, seed, workers), generations, track)


def _run_fixed_strategies(problem, pop: Population, budget: Budget, seed: int, workers, track) -> RunResult:
    arrays = StrategyArrays.from_strategies(pop.strategies)
    generations = budget.generations_for(pop.size)
    return _drive(problem, pop, lambda p: istratde_generation(p, arrays, problem, seed, workers), generations, track)


def run_istratde(
    problem,
    n: int,
    budget: Budget,
    seed: int,
    pool_restriction: Optional[Sequence[int]] = None,
    *,
    workers: Optional[int] = None,
    track: int = 0,
) -> RunResult:
    """Each individual keeps the strategy, F and CR it was dealt at initialization.

    ``pool_restriction`` limits the deal to a subset of pool indices (the
    restricted-pool ablation).
    """
    if n < MIN_POPULATION:
        raise PopulationTooSmall(f"population size {n} < {MIN_POPULATION}")
    budget.generations_for(n)
    pop = init_population(problem, n, seed, pool_restriction, parallelism=workers)
    return _run_fixed_strategies(problem, pop, budget, seed, workers, track)


def run_fixed_distribution(
    problem,
    n: int,
    budget: Budget,
    seed: int,
    dist: StrategyDistribution,
    *,
    workers: Optional[int] = None,
    track: int = 0,
) -> RunResult:
    """Like :func:`run_istratde`, with components dealt from fixed categorical weights."""
    if not isinstance(dist, StrategyDistribution):
        dist = StrategyDistribution(*dist)
    if n < MIN_POPULATION:
        raise PopulationTooSmall(f"population size {n} < {MIN_POPULATION}")
    budget.generations_for(n)
    pop = init_population(problem, n, seed, distribution=dist, parallelism=workers)
    return _run_fixed_strategies(problem, pop, budget, seed, workers, track)
