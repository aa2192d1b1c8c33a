"""Mutation, crossover, bound repair and selection for a single individual.

These are the per-individual reference operators. The generation drivers in
:mod:`istratde.algorithms` apply the same rules to the whole population in
one vectorized pass and read the same random streams, so the two paths agree
bit for bit.

Random draws come from :class:`~istratde.engine.RngStream` lanes:
distinct random indices from ``Lane.INDEX``, pbest picks from
``Lane.PBEST``, crossover draws from ``Lane.CROSSOVER``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .core import BaseVectorKind, CrossoverKind, Population, StrategyConfig
from .engine import Lane, RngStream
from .errors import DimensionMismatch, InsufficientPopulation

__all__ = [
    "TrialVector",
    "NAMED_STRATEGIES",
    "pbest_count",
    "top_indices",
    "draw_distinct",
    "select_base",
    "mutate_generalized",
    "mutate_named",
    "crossover_bin",
    "crossover_exp",
    "crossover_arith",
    "crossover",
    "repair_bounds",
    "select_greedy",
    "reproduce",
]

NAMED_STRATEGIES = ("rand/1", "best/1", "current/1", "current-to-pbest/1", "current-to-rand/1")


@dataclass(frozen=True)
class TrialVector:
    coords: np.ndarray
    j_rand: Optional[int] = None
    # (start, length) of the copied block, exponential crossover only
    segment: Optional[tuple[int, int]] = None
    alpha: Optional[float] = None


def pbest_count(n: int) -> int:
    """ceil(0.05 * n), at least 1, in exact integer arithmetic."""
    return max(1, -(-n // 20))


def top_indices(fitness: np.ndarray) -> np.ndarray:
    """Indices of the pbest candidates, best first; ties keep the lower index first."""
    return np.argsort(fitness, kind="stable")[: pbest_count(len(fitness))]


def draw_distinct(n: int, excluded: Iterable[int], rng: RngStream) -> int:
    """One index uniform over ``range(n)`` minus ``excluded``, using one draw."""
    eligible = np.setdiff1d(np.arange(n), np.fromiter(excluded, dtype=np.int64))
    if eligible.size == 0:
        raise InsufficientPopulation(f"no eligible index left among {n} individuals")
    return int(eligible[rng.integers(eligible.size)])


def select_base(kind, pop: Population, target: int, excluded: Iterable[int], rng: RngStream):
    """Pick a base vector; returns ``(index, vector)``.

    ``Rand`` draws from ``rng`` avoiding ``excluded`` and ``target``. ``Best``
    is the lowest-index argmin, ``Pbest`` is uniform over the top 5% and
    ``Current`` is the target itself.
    """
    kind = BaseVectorKind(kind)
    if kind is BaseVectorKind.CURRENT:
        idx = target
    elif kind is BaseVectorKind.BEST:
        idx = int(np.argmin(pop.fitness))
    elif kind is BaseVectorKind.PBEST:
        top = top_indices(pop.fitness)
        idx = int(top[rng.integers(top.size)])
    else:
        idx = draw_distinct(pop.size, set(excluded) | {target}, rng)
    return idx, pop.vectors[idx]


def mutate_generalized(pop: Population, target: int, s: StrategyConfig, rng: RngStream) -> np.ndarray:
    """Mutant ``x_bl + F (x_br - x_bl) + F * sum of dn difference vectors``.

    Rand-drawn bases and every difference-vector index are pairwise distinct
    and distinct from the target. Best, pbest and current bases are not
    excluded from later draws.
    """
    idx_rng = rng.lane(Lane.INDEX)
    pb_rng = rng.lane(Lane.PBEST)
    excluded = {target}

    def base(kind):
        i, vec = select_base(kind, pop, target, excluded, pb_rng if kind == BaseVectorKind.PBEST else idx_rng)
        if kind == BaseVectorKind.RAND:
            excluded.add(i)
        return vec

    x_bl = base(s.bl)
    x_br = base(s.br)
    acc = None
    for _ in range(s.dn):
        a = draw_distinct(pop.size, excluded, idx_rng)
        excluded.add(a)
        b = draw_distinct(pop.size, excluded, idx_rng)
        excluded.add(b)
        diff = pop.vectors[a] - pop.vectors[b]
        acc = diff if acc is None else acc + diff
    return x_bl + s.f * (x_br - x_bl) + s.f * acc


def mutate_named(name: str, pop: Population, target: int, f: float, rng: RngStream) -> np.ndarray:
    """The five textbook mutation strategies, written out literally."""
    if name not in NAMED_STRATEGIES:
        raise ValueError(f"unknown strategy {name!r}; expected one of {NAMED_STRATEGIES}")
    idx_rng = rng.lane(Lane.INDEX)
    x = pop.vectors
    excluded = {target}

    def draw():
        r = draw_distinct(pop.size, excluded, idx_rng)
        excluded.add(r)
        return r

    xi = x[target]
    if name == "rand/1":
        r1, r2, r3 = draw(), draw(), draw()
        return x[r1] + f * (x[r2] - x[r3])
    if name == "best/1":
        best = int(np.argmin(pop.fitness))
        r1, r2 = draw(), draw()
        return x[best] + f * (x[r1] - x[r2])
    if name == "current/1":
        r1, r2 = draw(), draw()
        return xi + f * (x[r1] - x[r2])
    if name == "current-to-pbest/1":
        top = top_indices(pop.fitness)
        pbest = int(top[rng.lane(Lane.PBEST).integers(top.size)])
        r1, r2 = draw(), draw()
        return xi + f * (x[pbest] - xi) + f * (x[r1] - x[r2])
    r1, r2, r3 = draw(), draw(), draw()
    return xi + f * (x[r1] - xi) + f * (x[r2] - x[r3])


def _pair(x, v):
    x = np.asarray(x, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if x.ndim != 1 or x.shape != v.shape or x.size < 1:
        raise DimensionMismatch(f"parent and mutant must be equal-length vectors, got {x.shape} and {v.shape}")
    return x, v


def crossover_bin(x, v, cr: float, rng: RngStream) -> TrialVector:
    x, v = _pair(x, v)
    d = x.size
    j_rand = rng.integers(d)
    take = rng.uniform(d) <= cr
    take[j_rand] = True
    return TrialVector(np.where(take, v, x), j_rand=j_rand)


def crossover_exp(x, v, cr: float, rng: RngStream) -> TrialVector:
    x, v = _pair(x, v)
    d = x.size
    start = rng.integers(d)
    length = 1
    while length < d and rng.uniform() <= cr:
        length += 1
    u = x.copy()
    pos = (start + np.arange(length)) % d
    u[pos] = v[pos]
    return TrialVector(u, segment=(start, length))


def crossover_arith(x, v, rng: RngStream, alpha: Optional[float] = None) -> TrialVector:
    x, v = _pair(x, v)
    a = rng.uniform() if alpha is None else float(alpha)
    return TrialVector(a * v + (1.0 - a) * x, alpha=a)


def crossover(kind, x, v, cr: float, rng: RngStream) -> TrialVector:
    kind = CrossoverKind(kind)
    if kind is CrossoverKind.BINOMIAL:
        return crossover_bin(x, v, cr, rng)
    if kind is CrossoverKind.EXPONENTIAL:
        return crossover_exp(x, v, cr, rng)
    return crossover_arith(x, v, rng)


def repair_bounds(u, lb, ub) -> np.ndarray:
    return np.minimum(np.maximum(np.asarray(u, dtype=np.float64), lb), ub)


def select_greedy(x, fx: float, u, fu: float):
    """One-to-one survivor selection; the trial wins ties."""
    if fu <= fx:
        return u, fu, True
    return x, fx, False


def reproduce(pop: Population, target: int, s: StrategyConfig, rng: RngStream, lb, ub) -> np.ndarray:
    """Mutation, the individual's own crossover, then clamping into the box."""
    v = mutate_generalized(pop, target, s, rng)
    trial = crossover(s.cs, pop.vectors[target], v, s.cr, rng.lane(Lane.CROSSOVER))
    return repair_bounds(trial.coords, lb, ub)
