"""Multi-run experiments: repeated runs, trace/summary files, rank-sum comparisons, sweeps.

File layout written by :func:`run_experiment` into ``out_dir``::

    trace_run000.csv   generation,evaluations,best_error,elitism_proportion
    ranks_run000.csv   generation,<one column per tracked individual>   (track > 0)
    summary.json       see SUMMARY_KEYS for the top-level field order

Everything in ``summary.json`` except ``metadata`` is a pure function of the
:class:`ExperimentSpec`, so two invocations with equal settings write
identical bytes apart from the recorded wall-clock time.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy.stats import chisquare

from . import __version__
from .algorithms import Budget, BudgetKind, RunResult, run_canonical_de, run_fixed_distribution, run_istratde
from .benchmarks import REPORT_THRESHOLD, FunctionId, make_problem, problem_from_record, round_reported
from .core import ELITE_DISTRIBUTION, MIN_POPULATION, POOL, POOL_SIZE, StrategyDistribution, sample_strategies
from .diagnostics import summarize, wilcoxon_rank_sum
from .errors import ConfigurationError, MismatchedProtocol, PopulationTooSmall

log = logging.getLogger(__name__)

__all__ = [
    "Algorithm",
    "ExperimentSpec",
    "TRACE_HEADER",
    "SUMMARY_KEYS",
    "run_experiment",
    "run_single",
    "load_summary",
    "compare_experiments",
    "population_scaling_sweep",
    "pool_census",
]

TRACE_HEADER = ("generation", "evaluations", "best_error", "elitism_proportion")
SUMMARY_KEYS = (
    "format",
    "spec",
    "problem",
    "budget",
    "runs",
    "final_errors",
    "mean",
    "sd",
    "median",
    "metadata",
)
SUMMARY_FORMAT = "istratde-summary/1"


class Algorithm(str, Enum):
    ISTRATDE = "istratde"
    CANONICAL_DE = "canonical_de"
    FIXED_DISTRIBUTION = "fixed_distribution"
    RESTRICTED_POOL = "restricted_pool"


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce a batch of independent runs.

    Repetition ``r`` uses run seed ``seed + r``. ``f`` and ``cr`` only apply
    to canonical DE; ``pool_indices`` only to the restricted pool;
    ``distribution`` only to the fixed-distribution variant (defaults to
    the elite-derived weights). ``out_dir``, ``workers`` and ``jobs`` do not
    affect results and are left out of :meth:`to_dict`.
    """

    algorithm: Algorithm
    function_id: FunctionId
    dim: int
    pop_size: int
    budget: Budget
    runs: int = 31
    seed: int = 0
    problem_seed: int = 0
    rotate: bool = False
    out_dir: Optional[str] = None
    trace_stride: int = 1
    track: int = 20
    f: float = 0.5
    cr: float = 0.9
    pool_indices: Optional[tuple[int, ...]] = None
    distribution: Optional[StrategyDistribution] = None
    workers: Optional[int] = field(default=None, compare=False)
    jobs: int = field(default=1, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        object.__setattr__(self, "function_id", FunctionId(self.function_id))
        if self.pool_indices is not None:
            object.__setattr__(self, "pool_indices", tuple(int(k) for k in self.pool_indices))
        if self.runs < 1:
            raise ConfigurationError("run count must be >= 1")
        if self.trace_stride < 1:
            raise ConfigurationError("trace stride must be >= 1")
        if self.track < 0:
            raise ConfigurationError("tracked individual count must be >= 0")
        if self.algorithm is Algorithm.RESTRICTED_POOL and not self.pool_indices:
            raise ConfigurationError("restricted_pool needs pool indices")

    def problem(self):
        return make_problem(self.function_id, self.dim, self.problem_seed, self.rotate)

    def to_dict(self) -> dict:
        dist = self.distribution
        if dist is None and self.algorithm is Algorithm.FIXED_DISTRIBUTION:
            dist = ELITE_DISTRIBUTION
        return {
            "algorithm": self.algorithm.value,
            "function_id": self.function_id.value,
            "dim": self.dim,
            "problem_seed": self.problem_seed,
            "rotate": self.rotate,
            "pop_size": self.pop_size,
            "budget": self.budget.to_dict(),
            "runs": self.runs,
            "seed": self.seed,
            "trace_stride": self.trace_stride,
            "track": self.track,
            "f": self.f,
            "cr": self.cr,
            "pool_indices": list(self.pool_indices) if self.pool_indices is not None else None,
            "distribution": (
                {"vector": list(dist.vector), "diff_counts": list(dist.diff_counts), "crossover": list(dist.crossover)}
                if dist is not None
                else None
            ),
        }

    @classmethod
    def from_dict(cls, d: dict, **overrides) -> "ExperimentSpec":
        dist = d.get("distribution")
        kwargs = dict(
            algorithm=d["algorithm"],
            function_id=d["function_id"],
            dim=int(d["dim"]),
            problem_seed=int(d.get("problem_seed", 0)),
            rotate=bool(d.get("rotate", False)),
            pop_size=int(d["pop_size"]),
            budget=Budget(BudgetKind(d["budget"]["kind"]), int(d["budget"]["limit"])),
            runs=int(d.get("runs", 31)),
            seed=int(d.get("seed", 0)),
            trace_stride=int(d.get("trace_stride", 1)),
            track=int(d.get("track", 20)),
            f=float(d.get("f", 0.5)),
            cr=float(d.get("cr", 0.9)),
            pool_indices=d.get("pool_indices"),
            distribution=StrategyDistribution(**{k: tuple(v) for k, v in dist.items()}) if dist else None,
        )
        kwargs.update(overrides)
        return cls(**kwargs)


def run_single(spec: ExperimentSpec, repetition: int) -> RunResult:
    """One repetition of ``spec`` with run seed ``spec.seed + repetition``."""
    problem = spec.problem()
    seed = spec.seed + repetition
    algo = spec.algorithm
    if algo is Algorithm.CANONICAL_DE:
        return run_canonical_de(
            problem, spec.pop_size, spec.f, spec.cr, spec.budget, seed, workers=spec.workers, track=spec.track
        )
    if algo is Algorithm.FIXED_DISTRIBUTION:
        dist = spec.distribution or ELITE_DISTRIBUTION
        return run_fixed_distribution(
            problem, spec.pop_size, spec.budget, seed, dist, workers=spec.workers, track=spec.track
        )
    restriction = spec.pool_indices if algo is Algorithm.RESTRICTED_POOL else None
    return run_istratde(
        problem, spec.pop_size, spec.budget, seed, restriction, workers=spec.workers, track=spec.track
    )


def _strided(n: int, stride: int) -> list[int]:
    rows = list(range(0, n, stride))
    if rows[-1] != n - 1:
        rows.append(n - 1)
    return rows


def _write_trace(path: Path, result: RunResult, stride: int, optimum: float) -> None:
    tr = result.trace
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for t in _strided(len(tr), stride):
            w.writerow(
                [tr.generations[t], tr.evaluations[t], repr(tr.best_so_far[t] - optimum), repr(tr.elitism_proportion[t])]
            )


def _write_ranks(path: Path, result: RunResult, stride: int) -> None:
    snaps = result.trace.rank_snapshots
    if not snaps:
        return
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["generation"] + [f"ind{i}" for i in range(len(snaps[0][1]))])
        for t in _strided(len(snaps), stride):
            g, ranks = snaps[t]
            w.writerow([g] + [repr(float(r)) for r in ranks])


def _run_and_write(args) -> dict:
    spec, r = args
    result = run_single(spec, r)
    problem_opt = 0.0
    if spec.out_dir is not None:
        out = Path(spec.out_dir)
        _write_trace(out / f"trace_run{r:03d}.csv", result, spec.trace_stride, problem_opt)
        _write_ranks(out / f"ranks_run{r:03d}.csv", result, spec.trace_stride)
    raw = result.best_value - problem_opt
    return {
        "run": r,
        "seed": spec.seed + r,
        "final_error": round_reported(result.best_value, REPORT_THRESHOLD, problem_opt),
        "raw_error": raw,
        "evaluations": result.evaluations_used,
        "generations": result.generations_used,
        "wall_clock_seconds": result.wall_clock_seconds,
    }


def run_experiment(spec: ExperimentSpec) -> dict:
    """Run every repetition, write traces and ``summary.json``, return the summary."""
    problem = spec.problem()
    if spec.algorithm is not Algorithm.CANONICAL_DE and spec.pop_size < MIN_POPULATION:
        raise PopulationTooSmall(f"population size {spec.pop_size} < {MIN_POPULATION}")
    spec.budget.generations_for(spec.pop_size)
    if spec.out_dir is not None:
        Path(spec.out_dir).mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    tasks = [(spec, r) for r in range(spec.runs)]
    if spec.jobs > 1 and spec.runs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as ex:
            runs = list(ex.map(_run_and_write, tasks))
    else:
        runs = [_run_and_write(t) for t in tasks]
    elapsed = time.perf_counter() - t0

    errors = [r["final_error"] for r in runs]
    mean, sd = summarize(errors)
    summary = {
        "format": SUMMARY_FORMAT,
        "spec": spec.to_dict(),
        "problem": problem.record(),
        "budget": spec.budget.to_dict(),
        "runs": [{k: v for k, v in r.items() if k != "wall_clock_seconds"} for r in runs],
        "final_errors": errors,
        "mean": mean,
        "sd": sd,
        "median": float(np.median(errors)),
        "metadata": {
            "wall_clock_seconds": elapsed,
            "run_wall_clock_seconds": [r["wall_clock_seconds"] for r in runs],
            "version": __version__,
        },
    }
    if spec.out_dir is not None:
        with open(Path(spec.out_dir) / "summary.json", "w") as fh:
            json.dump(summary, fh, indent=2, ensure_ascii=False)
            fh.write("\n")
    log.info("%s on %s: mean %.3e sd %.3e", spec.algorithm.value, spec.function_id.value, mean, sd)
    return summary


def load_summary(source: Union[str, os.PathLike, dict]) -> dict:
    if isinstance(source, dict):
        return source
    path = Path(source)
    if path.is_dir():
        path = path / "summary.json"
    with open(path) as fh:
        return json.load(fh)


def compare_experiments(summary_a, summary_b, alpha: float = 0.05) -> dict:
    """Rank-sum comparison of two experiments' final errors.

    The verdict is from ``a``'s side: ``Better`` (+) means ``a`` reached
    significantly lower errors. Both experiments must share the problem and
    the budget.
    """
    a, b = load_summary(summary_a), load_summary(summary_b)
    if a["problem"] != b["problem"]:
        raise MismatchedProtocol(f"problems differ: {a['problem']} vs {b['problem']}")
    if a["budget"] != b["budget"]:
        raise MismatchedProtocol(f"budgets differ: {a['budget']} vs {b['budget']}")
    report = wilcoxon_rank_sum(a["final_errors"], b["final_errors"], alpha)
    return {
        "problem": a["problem"],
        "budget": a["budget"],
        "a": {"algorithm": a["spec"]["algorithm"], "pop_size": a["spec"]["pop_size"], "mean": a["mean"], "sd": a["sd"]},
        "b": {"algorithm": b["spec"]["algorithm"], "pop_size": b["spec"]["pop_size"], "mean": b["mean"], "sd": b["sd"]},
        "u_statistic": report.u_statistic,
        "p_value": report.p_value,
        "alpha": alpha,
        "verdict": report.verdict.value,
        "symbol": report.verdict.symbol,
        "formatted": f"{a['mean']:.2E} ({a['sd']:.2E}){report.verdict.symbol}",
    }


def population_scaling_sweep(base: ExperimentSpec, sizes: Sequence[int], budget_fes: Optional[int] = None) -> dict:
    """Run ``base`` at each population size under one evaluation budget.

    With an ``out_dir`` each size writes into ``pop_<n>/`` plus a
    ``sweep.json`` table. ``normalized_mean`` divides each mean error by the
    largest mean in the sweep (all zeros stay zero).
    """
    budget = Budget.evaluations(budget_fes) if budget_fes is not None else base.budget
    sizes = [int(n) for n in sizes]
    if not sizes:
        raise ConfigurationError("sweep needs at least one population size")
    floor = 4 if base.algorithm is Algorithm.CANONICAL_DE else MIN_POPULATION
    for n in sizes:
        if n < floor:
            raise PopulationTooSmall(f"population size {n} < {floor}")
    if budget.kind is BudgetKind.MAX_EVALUATIONS and budget.limit < max(sizes):
        raise ConfigurationError(f"budget {budget.limit} is smaller than population {max(sizes)}")

    summaries = []
    for n in sizes:
        out = str(Path(base.out_dir) / f"pop_{n}") if base.out_dir is not None else None
        summaries.append(run_experiment(replace(base, pop_size=n, budget=budget, out_dir=out)))
    top = max(s["mean"] for s in summaries)
    table = [
        {
            "pop_size": n,
            "mean": s["mean"],
            "sd": s["sd"],
            "median": s["median"],
            "normalized_mean": s["mean"] / top if top > 0 else 0.0,
        }
        for n, s in zip(sizes, summaries)
    ]
    result = {"budget": budget.to_dict(), "table": table, "summaries": summaries}
    if base.out_dir is not None:
        with open(Path(base.out_dir) / "sweep.json", "w") as fh:
            json.dump({"budget": result["budget"], "table": table}, fh, indent=2)
            fh.write("\n")
    return result


def pool_census(
    samples: int,
    seed: int = 0,
    pool_restriction: Optional[Sequence[int]] = None,
    distribution: Optional[StrategyDistribution] = None,
) -> dict:
    """Count how often each pool configuration is dealt in ``samples`` assignments."""
    strategies = sample_strategies(seed, samples, pool_restriction, distribution)
    counts = np.bincount([s.pool_index for s in strategies], minlength=POOL_SIZE)
    support = np.arange(POOL_SIZE) if pool_restriction is None else np.unique(np.asarray(pool_restriction))
    observed = counts[support]
    chi2, p = chisquare(observed) if support.size > 1 else (0.0, 1.0)
    return {
        "samples": samples,
        "seed": seed,
        "counts": counts.tolist(),
        "labels": [f"{bl.name.lower()}-{br.name.lower()}/{dn}/{cs.name.lower()}" for bl, br, dn, cs in POOL],
        "mean_count": float(observed.mean()),
        "sd_count": float(observed.std(ddof=1)) if observed.size > 1 else 0.0,
        "chi_square": float(chi2),
        "p_value": float(p),
    }
