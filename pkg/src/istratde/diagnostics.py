"""Run diagnostics (elitism proportion, normalized ranks) and rank-sum statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.stats import norm, rankdata

from .errors import EmptySample, SampleTooSmall, TooFewIndividuals

__all__ = [
    "RunTrace",
    "Verdict",
    "RankSumReport",
    "elitism_proportion",
    "normalized_ranks",
    "wilcoxon_rank_sum",
    "summarize",
]


@dataclass
class RunTrace:
    """Per-generation record of a run.

    Entry ``t`` describes the population after ``generations[t]``
    generations (entry 0 is the initial population).
    """

    generations: list[int] = field(default_factory=list)
    best_so_far: list[float] = field(default_factory=list)
    evaluations: list[int] = field(default_factory=list)
    elitism_proportion: list[float] = field(default_factory=list)
    rank_snapshots: list[tuple[int, np.ndarray]] = field(default_factory=list)

    def record(self, generation: int, best: float, evaluations: int, elite: float) -> None:
        self.generations.append(int(generation))
        self.best_so_far.append(float(best))
        self.evaluations.append(int(evaluations))
        self.elitism_proportion.append(float(elite))

    def __len__(self) -> int:
        return len(self.generations)


class Verdict(str, Enum):
    BETTER = "Better"
    SIMILAR = "Similar"
    WORSE = "Worse"

    @property
    def symbol(self) -> str:
        return {"Better": "+", "Similar": "≈", "Worse": "-"}[self.value]


@dataclass(frozen=True)
class RankSumReport:
    u_statistic: float
    p_value: float
    verdict: Verdict
    alpha: float


def elitism_proportion(fitness, optimum_value: float = 0.0, epsilon: float = 1e-8) -> float:
    """Fraction of individuals whose error from the optimum is below ``epsilon``.

    Accepts a fitness vector or anything with a ``fitness`` attribute.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    f = np.asarray(getattr(fitness, "fitness", fitness), dtype=np.float64)
    return float(np.count_nonzero(f - optimum_value < epsilon)) / f.size


def normalized_ranks(fitness, tracked: Optional[Sequence[int]] = None) -> np.ndarray:
    """Midrank of each tracked individual scaled to [0, 1] (best 0, worst 1)."""
    f = np.asarray(fitness, dtype=np.float64)
    n = f.size
    if n < 2:
        raise TooFewIndividuals(f"need at least 2 individuals, got {n}")
    # rankdata's average rank r satisfies r - 1 = #smaller + ties_excluding_self / 2
    ranks = (rankdata(f, method="average") - 1.0) / (n - 1)
    return ranks if tracked is None else ranks[np.asarray(tracked, dtype=np.int64)]


def wilcoxon_rank_sum(a, b, alpha: float = 0.05) -> RankSumReport:
    """Two-sided Mann-Whitney U test, normal approximation with tie and continuity corrections.

    ``u_statistic`` is U for sample ``a``. The verdict reads from ``a``'s
    side when errors are minimized: Better means ``a`` is significantly
    lower. A significant result with equal medians is reported as Similar.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    n, m = a.size, b.size
    if n < 3 or m < 3:
        raise SampleTooSmall(f"each sample needs at least 3 values, got {n} and {m}")
    pooled = np.concatenate([a, b])
    ranks = rankdata(pooled, method="average")
    u = float(ranks[:n].sum() - n * (n + 1) / 2.0)
    total = n + m
    _, counts = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(counts.astype(np.float64) ** 3 - counts)) / (total * (total - 1))
    var = n * m / 12.0 * ((total + 1) - tie_term)
    if var <= 0:
        p = 1.0
    else:
        z = (abs(u - n * m / 2.0) - 0.5) / np.sqrt(var)
        p = float(min(1.0, 2.0 * norm.sf(z)))

    med_a, med_b = np.median(a), np.median(b)
    if p < alpha and med_a < med_b:
        verdict = Verdict.BETTER
    elif p < alpha and med_a > med_b:
        verdict = Verdict.WORSE
    else:
        verdict = Verdict.SIMILAR
    return RankSumReport(u, p, verdict, alpha)


def summarize(samples) -> tuple[float, float]:
    """Mean and sample standard deviation (N - 1 denominator; 0 for one sample)."""
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptySample("cannot summarize an empty sample")
    if np.all(x == x[0]):
        return float(x[0]), 0.0
    sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    return float(np.mean(x)), sd
