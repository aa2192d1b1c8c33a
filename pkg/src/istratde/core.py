"""Strategy pool, per-individual strategy sampling and population initialization."""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional, Sequence

import numpy as np

from .engine import Lane, RngStream, counter_uniforms, evaluate_population
from .errors import (
    EmptyPoolRestriction,
    InvalidBounds,
    InvalidDistribution,
    PopulationTooSmall,
)

__all__ = [
    "BaseVectorKind",
    "CrossoverKind",
    "StrategyConfig",
    "StrategyDistribution",
    "ELITE_DISTRIBUTION",
    "Population",
    "POOL",
    "POOL_SIZE",
    "DIFF_COUNTS",
    "MIN_POPULATION",
    "enumerate_pool",
    "pool_index",
    "sample_strategy",
    "sample_strategies",
    "initial_vectors",
    "init_population",
    "strategy_hash",
]


class BaseVectorKind(IntEnum):
    RAND = 0
    BEST = 1
    PBEST = 2
    CURRENT = 3


class CrossoverKind(IntEnum):
    BINOMIAL = 0
    EXPONENTIAL = 1
    ARITHMETIC = 2


DIFF_COUNTS = (1, 2, 3, 4)

# 2 rand-drawn bases + 4 difference pairs, all distinct and distinct from the target
MIN_POPULATION = 11

_BASE_NAMES = {
    BaseVectorKind.RAND: "rand",
    BaseVectorKind.BEST: "best",
    BaseVectorKind.PBEST: "pbest",
    BaseVectorKind.CURRENT: "current",
}
_CX_NAMES = {
    CrossoverKind.BINOMIAL: "bin",
    CrossoverKind.EXPONENTIAL: "exp",
    CrossoverKind.ARITHMETIC: "arith",
}


def enumerate_pool() -> list[tuple[BaseVectorKind, BaseVectorKind, int, CrossoverKind]]:
    """All 192 discrete configurations, ordered bl-major, then br, dn, cs."""
    return list(itertools.product(BaseVectorKind, BaseVectorKind, DIFF_COUNTS, CrossoverKind))


POOL = tuple(enumerate_pool())
POOL_SIZE = len(POOL)


def pool_index(bl, br, dn: int, cs) -> int:
    """Position of a discrete configuration in :data:`POOL`."""
    return ((int(bl) * 4 + int(br)) * 4 + (int(dn) - 1)) * 3 + int(cs)


@dataclass(frozen=True)
class StrategyConfig:
    """One individual's fixed recipe: DE/bl-to-br/dn/cs with its own F and CR."""

    bl: BaseVectorKind
    br: BaseVectorKind
    dn: int
    cs: CrossoverKind
    f: float
    cr: float

    def __post_init__(self):
        object.__setattr__(self, "bl", BaseVectorKind(self.bl))
        object.__setattr__(self, "br", BaseVectorKind(self.br))
        object.__setattr__(self, "cs", CrossoverKind(self.cs))
        if self.dn not in DIFF_COUNTS:
            raise ValueError(f"dn must be one of {DIFF_COUNTS}, got {self.dn}")
        if not (0.0 <= self.f <= 1.0 and 0.0 <= self.cr <= 1.0):
            raise ValueError(f"f and cr must lie in [0, 1], got f={self.f}, cr={self.cr}")

    @property
    def discrete(self) -> tuple:
        return (self.bl, self.br, self.dn, self.cs)

    @property
    def pool_index(self) -> int:
        return pool_index(*self.discrete)

    @property
    def name(self) -> str:
        return f"DE/{_BASE_NAMES[self.bl]}-to-{_BASE_NAMES[self.br]}/{self.dn}/{_CX_NAMES[self.cs]}"

    @property
    def rand_draws(self) -> int:
        """Distinct random indices this strategy consumes per reproduction."""
        return int(self.bl == BaseVectorKind.RAND) + int(self.br == BaseVectorKind.RAND) + 2 * self.dn


def _check_weights(name: str, weights: Sequence[float], size: int) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (size,):
        raise InvalidDistribution(f"{name} needs {size} weights, got shape {w.shape}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InvalidDistribution(f"{name} weights must be finite and non-negative: {w.tolist()}")
    if abs(w.sum() - 1.0) > 1e-9:
        raise InvalidDistribution(f"{name} weights sum to {w.sum()!r}, not 1")
    return w


@dataclass(frozen=True)
class StrategyDistribution:
    """Independent categorical weights for each discrete strategy component.

    ``vector`` is indexed by :class:`BaseVectorKind` and shared by bl and br
    (drawn independently); ``diff_counts`` by dn - 1; ``crossover`` by
    :class:`CrossoverKind`.
    """

    vector: tuple[float, ...]
    diff_counts: tuple[float, ...]
    crossover: tuple[float, ...]
    _cdfs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        v = _check_weights("vector", self.vector, 4)
        d = _check_weights("diff_counts", self.diff_counts, 4)
        c = _check_weights("crossover", self.crossover, 3)
        object.__setattr__(self, "_cdfs", tuple(np.cumsum(w) for w in (v, d, c)))

    @classmethod
    def uniform(cls) -> "StrategyDistribution":
        return cls((0.25,) * 4, (0.25,) * 4, (1 / 3,) * 3)

    def pick(self, u: np.ndarray) -> np.ndarray:
        """Map uniforms of shape (..., 4) to pool indices."""
        vcdf, dcdf, ccdf = self._cdfs

        def cat(cdf, x):
            return np.minimum(np.searchsorted(cdf, x, side="right"), len(cdf) - 1)

        u = np.asarray(u)
        bl = cat(vcdf, u[..., 0])
        br = cat(vcdf, u[..., 1])
        dn = cat(dcdf, u[..., 2]) + 1
        cs = cat(ccdf, u[..., 3])
        return ((bl * 4 + br) * 4 + (dn - 1)) * 3 + cs


# Elite-derived weights used by the fixed-distribution variant.
ELITE_DISTRIBUTION = StrategyDistribution(
    vector=(0.26, 0.32, 0.32, 0.10),
    diff_counts=(0.40, 0.30, 0.20, 0.10),
    crossover=(0.60, 0.25, 0.15),
)


def _restriction_array(pool_restriction) -> Optional[np.ndarray]:
    if pool_restriction is None:
        return None
    arr = np.asarray(sorted(set(int(k) for k in pool_restriction)), dtype=np.int64)
    if arr.size == 0:
        raise EmptyPoolRestriction("pool restriction is empty")
    if arr[0] < 0 or arr[-1] >= POOL_SIZE:
        raise ValueError(f"pool indices must lie in [0, {POOL_SIZE}), got {arr.tolist()}")
    return arr


def _config(k: int, f: float, cr: float) -> StrategyConfig:
    bl, br, dn, cs = POOL[k]
    return StrategyConfig(bl, br, dn, cs, f, cr)


def sample_strategy(
    rng: RngStream,
    pool_restriction: Optional[Sequence[int]] = None,
    distribution: Optional[StrategyDistribution] = None,
) -> StrategyConfig:
    """Draw one individual's strategy from ``rng``'s initialization lanes.

    The discrete part is uniform over the (restricted) pool, or follows
    ``distribution`` when one is given; F and CR are independent U(0, 1).
    """
    allowed = _restriction_array(pool_restriction)
    srng = rng.lane(Lane.INIT_STRATEGY)
    if distribution is not None:
        k = int(distribution.pick(srng.uniform(4)))
    else:
        choices = POOL_SIZE if allowed is None else allowed.size
        j = srng.integers(choices)
        k = j if allowed is None else int(allowed[j])
    f, cr = rng.lane(Lane.INIT_PARAMS).uniform(2)
    return _config(k, float(f), float(cr))


def sample_strategies(
    seed: int,
    n: int,
    pool_restriction: Optional[Sequence[int]] = None,
    distribution: Optional[StrategyDistribution] = None,
) -> tuple[StrategyConfig, ...]:
    """Vectorized :func:`sample_strategy` for individuals 0..n-1 at generation 0."""
    allowed = _restriction_array(pool_restriction)
    idx = np.arange(n)[:, None]
    if distribution is not None:
        ks = distribution.pick(counter_uniforms(seed, 0, idx, Lane.INIT_STRATEGY, np.arange(4)))
    else:
        u = counter_uniforms(seed, 0, idx, Lane.INIT_STRATEGY, np.arange(1))[:, 0]
        choices = POOL_SIZE if allowed is None else allowed.size
        j = (u * choices).astype(np.int64)
        ks = j if allowed is None else allowed[j]
    params = counter_uniforms(seed, 0, idx, Lane.INIT_PARAMS, np.arange(2))
    return tuple(_config(int(k), float(p[0]), float(p[1])) for k, p in zip(ks, params))


def strategy_hash(strategies: Optional[Sequence[StrategyConfig]]) -> str:
    """SHA-256 over the exact strategy contents, F and CR bit patterns included."""
    h = hashlib.sha256()
    for s in strategies or ():
        h.update(np.array([s.bl, s.br, s.dn, s.cs], dtype=np.int64).tobytes())
        h.update(np.array([s.f, s.cr], dtype=np.float64).tobytes())
    return h.hexdigest()


@dataclass(frozen=True)
class Population:
    """Solution vectors, their fitness, and each individual's fixed strategy."""

    vectors: np.ndarray
    fitness: np.ndarray
    strategies: Optional[tuple[StrategyConfig, ...]]
    generation: int = 0

    def __post_init__(self):
        n = self.vectors.shape[0]
        if self.fitness.shape != (n,):
            raise ValueError("fitness length does not match number of vectors")
        if self.strategies is not None and len(self.strategies) != n:
            raise ValueError("strategies length does not match number of vectors")

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def check_bounds(problem) -> tuple[np.ndarray, np.ndarray]:
    lb = np.broadcast_to(np.asarray(problem.lb, dtype=np.float64), (problem.dim,))
    ub = np.broadcast_to(np.asarray(problem.ub, dtype=np.float64), (problem.dim,))
    if not (np.all(np.isfinite(lb)) and np.all(np.isfinite(ub))) or np.any(lb >= ub):
        raise InvalidBounds(f"need finite lb < ub in every coordinate, got lb={lb}, ub={ub}")
    return lb, ub


def initial_vectors(problem, n: int, seed: int) -> np.ndarray:
    """N points drawn coordinatewise uniform in the problem box."""
    lb, ub = check_bounds(problem)
    u = counter_uniforms(seed, 0, np.arange(n)[:, None], Lane.INIT_VECTOR, np.arange(problem.dim))
    return lb + u * (ub - lb)


def init_population(
    problem,
    n: int,
    seed: int,
    pool_restriction: Optional[Sequence[int]] = None,
    *,
    distribution: Optional[StrategyDistribution] = None,
    parallelism: Optional[int] = None,
) -> Population:
    if n < MIN_POPULATION:
        raise PopulationTooSmall(f"population size {n} < {MIN_POPULATION}")
    x = initial_vectors(problem, n, seed)
    strategies = sample_strategies(seed, n, pool_restriction, distribution)
    fitness = evaluate_population(problem, x, parallelism)
    return Population(x, fitness, strategies, 0)
